//! `stats`: first-order speckle statistics of records or an image.

use std::path::{Path, PathBuf};

use specklenet_dataset::read_dataset;
use specklenet_optics::{speckle_statistics, GridSpec, IntensityImage, SpeckleStats};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::imageio::load_gray_image;
use crate::report::write_histogram_csv;

pub fn cmd_stats(
    cfg: &RunConfig,
    image: Option<PathBuf>,
    record: Option<usize>,
    csv_out: Option<PathBuf>,
) -> CliResult<()> {
    let stats = if let Some(path) = image {
        let stats = image_stats(&path)?;
        println!("image: {}", path.display());
        print_single(&stats);
        stats
    } else {
        let records = read_dataset(&cfg.dataset_path)?;
        match record {
            Some(index) => {
                let rec = records.get(index).ok_or_else(|| {
                    CliError::Input(format!(
                        "record {index} out of range (dataset has {} records)",
                        records.len()
                    ))
                })?;
                let stats = speckle_statistics(&rec.image)?;
                println!("record: {index} (label {})", rec.label);
                print_single(&stats);
                stats
            }
            None => {
                let per_record: Vec<SpeckleStats> = records
                    .iter()
                    .map(|rec| speckle_statistics(&rec.image))
                    .collect::<Result<_, _>>()?;
                let aggregate = aggregate_stats(&per_record);
                let contrasts: Vec<f64> = per_record.iter().map(|s| s.contrast).collect();
                let min = contrasts.iter().copied().fold(f64::INFINITY, f64::min);
                let max = contrasts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                println!("records: {}", per_record.len());
                println!("mean contrast: {:.4} (min {min:.4}, max {max:.4})", aggregate.contrast);
                println!("mean intensity: {:.6e}", aggregate.mean_intensity);
                aggregate
            }
        }
    };

    if let Some(path) = csv_out {
        write_histogram_csv(&path, &stats)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn image_stats(path: &Path) -> CliResult<SpeckleStats> {
    let values = load_gray_image(path)?;
    let (height, width) = values.dim();
    // statistics are scale-free, so a nominal grid serves
    let grid = GridSpec::new(width, height, 1e-5, 632.8e-9)?;
    let image = IntensityImage::new(grid, values)?;
    Ok(speckle_statistics(&image)?)
}

fn print_single(stats: &SpeckleStats) {
    println!("mean intensity: {:.6e}", stats.mean_intensity);
    println!("std intensity: {:.6e}", stats.std_intensity);
    println!("contrast: {:.4}", stats.contrast);
}

/// Dataset-level aggregate: per-record histograms (each normalized by
/// its own record mean) summed, scalar statistics averaged.
fn aggregate_stats(per_record: &[SpeckleStats]) -> SpeckleStats {
    let n = per_record.len() as f64;
    let mut histogram = vec![0u64; per_record[0].histogram.len()];
    for stats in per_record {
        for (total, &count) in histogram.iter_mut().zip(&stats.histogram) {
            *total += count;
        }
    }
    SpeckleStats {
        mean_intensity: per_record.iter().map(|s| s.mean_intensity).sum::<f64>() / n,
        std_intensity: per_record.iter().map(|s| s.std_intensity).sum::<f64>() / n,
        contrast: per_record.iter().map(|s| s.contrast).sum::<f64>() / n,
        histogram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregate_sums_histograms_and_averages_contrast() {
        let a = SpeckleStats {
            mean_intensity: 1.0,
            std_intensity: 1.0,
            contrast: 1.0,
            histogram: vec![2, 0, 1],
        };
        let b = SpeckleStats {
            mean_intensity: 3.0,
            std_intensity: 1.5,
            contrast: 0.5,
            histogram: vec![1, 1, 0],
        };
        let agg = aggregate_stats(&[a, b]);
        assert_eq!(agg.histogram, vec![3, 1, 1]);
        assert_eq!(agg.contrast, 0.75);
        assert_eq!(agg.mean_intensity, 2.0);
        assert_eq!(agg.std_intensity, 1.25);
    }
}
