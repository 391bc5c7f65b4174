//! `render`: write a record or image file as 8-bit grayscale.

use std::path::{Path, PathBuf};

use specklenet_dataset::read_dataset;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::imageio::{load_gray_image, write_gray_image};

pub fn cmd_render(
    cfg: &RunConfig,
    record: Option<usize>,
    image: Option<PathBuf>,
    out: Option<PathBuf>,
) -> CliResult<()> {
    let out = out.unwrap_or_else(|| PathBuf::from("render.pgm"));
    let values = if let Some(path) = image {
        load_gray_image(&path)?
    } else {
        let index = record.ok_or_else(|| {
            CliError::Config("render needs --record <INDEX> (or --image <PATH>)".into())
        })?;
        record_values(&cfg.dataset_path, index)?
    };
    let (height, width) = values.dim();
    write_gray_image(&out, &values)?;
    println!("wrote {} ({width}x{height})", out.display());
    Ok(())
}

fn record_values(dataset: &Path, index: usize) -> CliResult<ndarray::Array2<f64>> {
    let records = read_dataset(dataset)?;
    let rec = records.get(index).ok_or_else(|| {
        CliError::Input(format!(
            "record {index} out of range (dataset has {} records)",
            records.len()
        ))
    })?;
    Ok(rec.image.intensity().to_owned())
}
