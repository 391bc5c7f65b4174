//! Report writers: JSON-lines training logs and histogram CSVs.

use std::io::{BufWriter, Write};
use std::path::Path;

use specklenet_classifier::EpochStats;
use specklenet_optics::SpeckleStats;

use crate::error::{CliError, CliResult};

/// Write one JSON object per line, one line per epoch.
pub fn write_jsonl_log(path: &Path, stats: &[EpochStats]) -> CliResult<()> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for entry in stats {
        let line = serde_json::to_string(entry)
            .map_err(|e| CliError::Config(format!("log serialization: {e}")))?;
        writeln!(w, "{line}").map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

/// Parse a JSON-lines training log (primarily for tests and tooling).
pub fn read_jsonl_log(path: &Path) -> CliResult<Vec<EpochStats>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    text.lines()
        .filter(|line| !line.trim().is_empty())
        .map(|line| {
            serde_json::from_str(line)
                .map_err(|e| CliError::Config(format!("{}: bad log line: {e}", path.display())))
        })
        .collect()
}

/// Write the normalized-intensity histogram as CSV with columns
/// `bin_center,count,density`.
pub fn write_histogram_csv(path: &Path, stats: &SpeckleStats) -> CliResult<()> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let densities = stats.densities();
    writeln!(w, "bin_center,count,density").map_err(|e| CliError::io(path, e))?;
    for (i, (&count, &density)) in stats.histogram.iter().zip(&densities).enumerate() {
        writeln!(w, "{},{},{}", SpeckleStats::bin_center(i), count, density)
            .map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}
