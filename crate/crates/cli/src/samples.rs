//! Bridging dataset records to classifier samples.

use specklenet_classifier::{Sample, MIN_INPUT_SIZE};
use specklenet_dataset::SpeckleRecord;

use crate::error::{CliError, CliResult};

/// Convert records to 32-bit training samples, returning the (square)
/// input side. Records store binary32-exact values, so the cast is
/// lossless.
pub fn to_samples(records: &[SpeckleRecord]) -> CliResult<(usize, Vec<Sample<f32>>)> {
    let first = records
        .first()
        .ok_or_else(|| CliError::Config("dataset contains no records".into()))?;
    let (height, width) = first.image.grid().shape();
    if height != width {
        return Err(CliError::Config(format!(
            "classifier inputs must be square, got {height}x{width} records"
        )));
    }
    if height < MIN_INPUT_SIZE {
        return Err(CliError::Config(format!(
            "records are {height}x{width} but the network needs at least \
             {MIN_INPUT_SIZE}x{MIN_INPUT_SIZE} inputs"
        )));
    }
    let samples = records
        .iter()
        .map(|rec| Sample {
            image: rec.image.intensity().mapv(|v| v as f32),
            label: rec.label,
        })
        .collect();
    Ok((height, samples))
}

/// Histogram of record labels over the ten digit classes.
pub fn class_counts(labels: impl IntoIterator<Item = u8>) -> [u64; 10] {
    let mut counts = [0u64; 10];
    for label in labels {
        counts[usize::from(label)] += 1;
    }
    counts
}

/// Render class counts as `0:n0 1:n1 ... 9:n9`.
pub fn format_class_counts(counts: &[u64; 10]) -> String {
    counts
        .iter()
        .enumerate()
        .map(|(digit, n)| format!("{digit}:{n}"))
        .collect::<Vec<_>>()
        .join(" ")
}
