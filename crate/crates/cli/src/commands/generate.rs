//! `generate`: simulate speckle records and write a dataset container.

use std::time::Instant;

use specklenet_dataset::{generate_dataset, load_idx_limited, write_dataset};

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::samples::{class_counts, format_class_counts};

pub fn cmd_generate(cfg: &RunConfig) -> CliResult<()> {
    let start = Instant::now();
    log::info!(
        "loading up to {} digits from {} / {}",
        cfg.count,
        cfg.mnist_images.display(),
        cfg.mnist_labels.display()
    );
    let digits = load_idx_limited(&cfg.mnist_images, &cfg.mnist_labels, cfg.count)?;

    log::info!(
        "simulating {} {} records on a {}x{} grid",
        digits.len(),
        cfg.scenario.kind.name(),
        cfg.scenario.grid.shape().1,
        cfg.scenario.grid.shape().0,
    );
    let generation = cfg.generation();
    let records = generate_dataset(&generation, &digits, cfg.generation_seed)?;
    write_dataset(&cfg.dataset_path, &generation, &records)?;

    let counts = class_counts(records.iter().map(|r| r.label));
    println!("records: {}", records.len());
    println!("class counts: {}", format_class_counts(&counts));
    println!("wrote {}", cfg.dataset_path.display());
    println!("elapsed: {:.2} s", start.elapsed().as_secs_f64());
    Ok(())
}
