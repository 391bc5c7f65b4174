//! Image preprocessing: crop, sensor noise, normalization.
//!
//! The preprocessing pipeline applies these in a fixed order —
//! crop, then noise, then normalization — because each stage changes
//! what the later ones see: noise strength follows the mean of the
//! *cropped* frame, and normalization must be last so every record
//! lands on the same [0, 1] scale regardless of noise draw.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use specklenet_optics::{GridSpec, IntensityImage};

use crate::error::{DatasetError, DatasetResult};

/// Where the crop window sits in the source frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CropAnchor {
    /// Window centered in the frame (a 512-pixel frame cropped to 200
    /// keeps rows and columns 156..356).
    #[default]
    Center,
    /// Window with its top-left corner at `(row, col)`.
    Offset { row: usize, col: usize },
}

/// Crop parameters of the preprocessing pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    /// Side of the square crop window in pixels.
    pub crop_size: usize,
    pub crop_anchor: CropAnchor,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            crop_size: 200,
            crop_anchor: CropAnchor::Center,
        }
    }
}

/// Cut a square `size`-pixel window out of an image. The window must
/// fit inside the frame.
pub fn crop(image: &IntensityImage, size: usize, anchor: CropAnchor) -> DatasetResult<IntensityImage> {
    let (ny, nx) = image.grid().shape();
    if size < 2 || size > ny || size > nx {
        return Err(DatasetError::InvalidConfig(format!(
            "crop size {size} must lie in [2, {}] for a {ny}x{nx} frame",
            ny.min(nx)
        )));
    }
    let (row0, col0) = match anchor {
        CropAnchor::Center => ((ny - size) / 2, (nx - size) / 2),
        CropAnchor::Offset { row, col } => {
            if row + size > ny || col + size > nx {
                return Err(DatasetError::InvalidConfig(format!(
                    "crop window at ({row}, {col}) of size {size} leaves the {ny}x{nx} frame"
                )));
            }
            (row, col)
        }
    };
    let window = image
        .intensity()
        .slice(ndarray::s![row0..row0 + size, col0..col0 + size])
        .to_owned();
    let grid = GridSpec::new(size, size, image.grid().pitch(), image.grid().wavelength())?;
    Ok(IntensityImage::new(grid, window)?)
}

/// Add Gaussian sensor noise with standard deviation
/// `sigma * mean(image)`, clamping readings at zero. `sigma = 0` is a
/// no-op. The noise stream is fully determined by `seed` (pixels are
/// drawn in row-major order).
pub fn add_noise(image: &IntensityImage, sigma: f64, seed: u64) -> DatasetResult<IntensityImage> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(DatasetError::InvalidConfig(format!(
            "noise sigma must be finite and non-negative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(image.clone());
    }
    let std = sigma * image.mean();
    let normal = Normal::new(0.0, std)
        .map_err(|e| DatasetError::InvalidConfig(format!("noise distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noisy = image
        .intensity()
        .mapv(|v| (v + normal.sample(&mut rng)).max(0.0));
    Ok(IntensityImage::new(*image.grid(), noisy)?)
}

/// Rescale an image affinely so its minimum maps to 0 and its maximum
/// to 1. A constant image has no such map and is rejected.
pub fn normalize(image: &IntensityImage) -> DatasetResult<IntensityImage> {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in image.intensity().iter() {
        min = min.min(v);
        max = max.max(v);
    }
    if !(max > min) {
        return Err(DatasetError::DegenerateInput(format!(
            "cannot normalize a constant image (all values are {min})"
        )));
    }
    let span = max - min;
    let scaled = image.intensity().mapv(|v| ((v - min) / span).clamp(0.0, 1.0));
    Ok(IntensityImage::new(*image.grid(), scaled)?)
}

/// The full preprocessing pipeline in its fixed order:
/// crop, then sensor noise, then normalization.
pub fn preprocess(
    image: &IntensityImage,
    cfg: &PreprocessConfig,
    noise_sigma: f64,
    noise_seed: u64,
) -> DatasetResult<IntensityImage> {
    let cropped = crop(image, cfg.crop_size, cfg.crop_anchor)?;
    let noisy = add_noise(&cropped, noise_sigma, noise_seed)?;
    normalize(&noisy)
}
