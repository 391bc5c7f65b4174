//! Amplitude transmittance masks (the "object" in a transmissive setup).

use ndarray::Array2;

use crate::error::{OpticsError, OpticsResult};
use crate::field::ComplexField;
use crate::grid::GridSpec;

/// Real transmittance mask with per-pixel values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMask {
    grid: GridSpec,
    transmittance: Array2<f64>,
}

impl AmplitudeMask {
    /// Wrap a transmittance array, checking shape and value range.
    pub fn new(grid: GridSpec, transmittance: Array2<f64>) -> OpticsResult<Self> {
        if transmittance.dim() != grid.shape() {
            return Err(OpticsError::GridMismatch {
                expected: grid.shape(),
                actual: transmittance.dim(),
            });
        }
        for &t in transmittance.iter() {
            if !(0.0..=1.0).contains(&t) || !t.is_finite() {
                return Err(OpticsError::Domain(format!(
                    "mask transmittance must lie in [0, 1], got {t}"
                )));
            }
        }
        Ok(Self {
            grid,
            transmittance,
        })
    }

    /// Fully transparent mask.
    pub fn transparent(grid: GridSpec) -> Self {
        Self {
            grid,
            transmittance: Array2::ones(grid.shape()),
        }
    }

    /// Fully opaque mask.
    pub fn opaque(grid: GridSpec) -> Self {
        Self {
            grid,
            transmittance: Array2::zeros(grid.shape()),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn transmittance(&self) -> &Array2<f64> {
        &self.transmittance
    }
}

/// Multiply a field by a mask's transmittance, pixel by pixel.
pub fn apply_mask(field: &ComplexField, mask: &AmplitudeMask) -> OpticsResult<ComplexField> {
    if field.grid().shape() != mask.grid().shape() {
        return Err(OpticsError::GridMismatch {
            expected: field.grid().shape(),
            actual: mask.grid().shape(),
        });
    }
    let amp = field.amplitude() * mask.transmittance().mapv(|t| num_complex::Complex64::new(t, 0.0));
    ComplexField::new(*field.grid(), amp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::plane_wave;

    fn grid() -> GridSpec {
        GridSpec::new(4, 4, 1e-5, 633e-9).unwrap()
    }

    #[test]
    fn rejects_out_of_range_transmittance() {
        let g = grid();
        let mut t = Array2::ones(g.shape());
        t[[0, 0]] = 1.5;
        assert!(AmplitudeMask::new(g, t.clone()).is_err());
        t[[0, 0]] = -0.1;
        assert!(AmplitudeMask::new(g, t).is_err());
    }

    #[test]
    fn opaque_mask_zeroes_field() {
        let g = grid();
        let f = plane_wave(g, 1.0).unwrap();
        let out = apply_mask(&f, &AmplitudeMask::opaque(g)).unwrap();
        assert_eq!(out.total_energy(), 0.0);
    }

    #[test]
    fn transparent_mask_preserves_field() {
        let g = grid();
        let f = plane_wave(g, 1.0).unwrap();
        let out = apply_mask(&f, &AmplitudeMask::transparent(g)).unwrap();
        assert_eq!(out.amplitude(), f.amplitude());
    }

    #[test]
    fn checkerboard_mask_halves_energy() {
        let g = grid();
        let f = plane_wave(g, 1.0).unwrap();
        let t = Array2::from_shape_fn(g.shape(), |(r, c)| ((r + c) % 2) as f64);
        let m = AmplitudeMask::new(g, t).unwrap();
        let out = apply_mask(&f, &m).unwrap();
        assert_eq!(out.total_energy(), f.total_energy() / 2.0);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let f = plane_wave(grid(), 1.0).unwrap();
        let other = GridSpec::new(8, 8, 1e-5, 633e-9).unwrap();
        assert!(apply_mask(&f, &AmplitudeMask::transparent(other)).is_err());
    }
}
