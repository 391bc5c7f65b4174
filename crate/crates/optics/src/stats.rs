//! First-order speckle statistics.
//!
//! Fully developed speckle has negative-exponential intensity
//! statistics, so its contrast (std/mean) is 1 and the histogram of
//! `I / mean` follows `exp(-x)`. These statistics are the standard
//! sanity check that a simulated scattering chain actually produces
//! speckle rather than structured diffraction.

use serde::{Deserialize, Serialize};

use crate::error::{OpticsError, OpticsResult};
use crate::intensity::IntensityImage;

/// Number of histogram bins.
pub const HISTOGRAM_BINS: usize = 64;
/// Histogram covers `I / mean` in `[0, HISTOGRAM_MAX)`; larger values
/// are clamped into the last bin.
pub const HISTOGRAM_MAX: f64 = 8.0;

/// Summary statistics of one intensity image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeckleStats {
    pub mean_intensity: f64,
    pub std_intensity: f64,
    /// `std / mean`; 1 for fully developed speckle.
    pub contrast: f64,
    /// Pixel counts of `I / mean` over [`HISTOGRAM_BINS`] uniform bins
    /// spanning `[0, HISTOGRAM_MAX)`.
    pub histogram: Vec<u64>,
}

impl SpeckleStats {
    pub fn bin_width() -> f64 {
        HISTOGRAM_MAX / HISTOGRAM_BINS as f64
    }

    /// Center of bin `i` in units of `I / mean`.
    pub fn bin_center(i: usize) -> f64 {
        (i as f64 + 0.5) * Self::bin_width()
    }

    /// Histogram normalized to a probability density over `I / mean`.
    pub fn densities(&self) -> Vec<f64> {
        let total: u64 = self.histogram.iter().sum();
        let norm = 1.0 / (total as f64 * Self::bin_width());
        self.histogram.iter().map(|&c| c as f64 * norm).collect()
    }
}

/// Compute mean, standard deviation, contrast, and the normalized-
/// intensity histogram of an image. All-zero images have no defined
/// contrast and are rejected.
pub fn speckle_statistics(image: &IntensityImage) -> OpticsResult<SpeckleStats> {
    let data = image.intensity();
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    if mean <= 0.0 {
        return Err(OpticsError::ZeroIntensity);
    }
    let var = data.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();

    let bin_width = SpeckleStats::bin_width();
    let mut histogram = vec![0u64; HISTOGRAM_BINS];
    for &v in data.iter() {
        let idx = ((v / mean) / bin_width) as usize;
        histogram[idx.min(HISTOGRAM_BINS - 1)] += 1;
    }

    Ok(SpeckleStats {
        mean_intensity: mean,
        std_intensity: std,
        contrast: std / mean,
        histogram,
    })
}
