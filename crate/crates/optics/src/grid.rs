//! Sampled-grid metadata for all field and image types.

use serde::{Deserialize, Serialize};

use crate::error::{OpticsError, OpticsResult};

/// Sampling grid of a field plane: pixel counts, square pixel pitch in
/// meters, and the illumination wavelength in meters.
///
/// Arrays over this grid are stored row-major with shape `(ny, nx)`,
/// i.e. rows index y and columns index x. Physical coordinates are
/// centered: pixel `(row, col)` sits at
/// `((col - nx/2) * pitch, (row - ny/2) * pitch)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    nx: usize,
    ny: usize,
    pitch: f64,
    wavelength: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, pitch: f64, wavelength: f64) -> OpticsResult<Self> {
        if nx < 2 || ny < 2 {
            return Err(OpticsError::InvalidGrid(format!(
                "pixel counts must be >= 2, got {nx}x{ny}"
            )));
        }
        if !(pitch > 0.0) || !pitch.is_finite() {
            return Err(OpticsError::InvalidGrid(format!(
                "pitch must be positive and finite, got {pitch}"
            )));
        }
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(OpticsError::InvalidGrid(format!(
                "wavelength must be positive and finite, got {wavelength}"
            )));
        }
        Ok(Self {
            nx,
            ny,
            pitch,
            wavelength,
        })
    }

    /// Square grid helper.
    pub fn square(n: usize, pitch: f64, wavelength: f64) -> OpticsResult<Self> {
        Self::new(n, n, pitch, wavelength)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Array shape `(ny, nx)` (rows, cols).
    pub fn shape(&self) -> (usize, usize) {
        (self.ny, self.nx)
    }

    pub fn num_pixels(&self) -> usize {
        self.nx * self.ny
    }

    /// Physical side lengths `(width_x, height_y)` in meters.
    pub fn physical_size(&self) -> (f64, f64) {
        (self.nx as f64 * self.pitch, self.ny as f64 * self.pitch)
    }

    /// Centered physical coordinate `(x, y)` of pixel `(row, col)`.
    pub fn coord(&self, row: usize, col: usize) -> (f64, f64) {
        (
            (col as f64 - (self.nx / 2) as f64) * self.pitch,
            (row as f64 - (self.ny / 2) as f64) * self.pitch,
        )
    }

    /// Wavenumber `k = 2*pi / wavelength`.
    pub fn wavenumber(&self) -> f64 {
        std::f64::consts::TAU / self.wavelength
    }

    /// Copy of this grid with a different pitch (used by the lens relay).
    pub(crate) fn with_pitch(&self, pitch: f64) -> OpticsResult<Self> {
        Self::new(self.nx, self.ny, pitch, self.wavelength)
    }
}
