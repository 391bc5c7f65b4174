//! Intensity detection: the camera end of every scenario.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{OpticsError, OpticsResult};
use crate::field::ComplexField;
use crate::grid::GridSpec;

/// Captured intensity image in arbitrary detector units (all entries
/// non-negative).
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityImage {
    grid: GridSpec,
    intensity: Array2<f64>,
}

impl IntensityImage {
    pub fn new(grid: GridSpec, intensity: Array2<f64>) -> OpticsResult<Self> {
        if intensity.dim() != grid.shape() {
            return Err(OpticsError::GridMismatch {
                expected: grid.shape(),
                actual: intensity.dim(),
            });
        }
        for &v in intensity.iter() {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(OpticsError::Domain(format!(
                    "intensity values must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(Self { grid, intensity })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn intensity(&self) -> &Array2<f64> {
        &self.intensity
    }

    pub fn into_intensity(self) -> Array2<f64> {
        self.intensity
    }

    pub fn mean(&self) -> f64 {
        self.intensity.iter().sum::<f64>() / self.intensity.len() as f64
    }
}

/// How the detector converts a complex amplitude into a reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DetectionModel {
    /// Standard time-averaged response `I = |a|^2`.
    #[default]
    ModulusSquared,
    /// Instantaneous-real-part variant `I = Re(a)^2`, kept for
    /// comparison studies; discards half the interference information.
    RealPartSquared,
}

/// Detect a field with the standard time-averaged response `I = |a|^2`.
pub fn capture_intensity(field: &ComplexField) -> IntensityImage {
    capture_intensity_with(field, DetectionModel::ModulusSquared)
}

/// Detect a field under an explicit [`DetectionModel`].
pub fn capture_intensity_with(field: &ComplexField, model: DetectionModel) -> IntensityImage {
    let intensity = match model {
        DetectionModel::ModulusSquared => field.amplitude().mapv(|a| a.norm_sqr()),
        DetectionModel::RealPartSquared => field.amplitude().mapv(|a| a.re * a.re),
    };
    IntensityImage {
        grid: *field.grid(),
        intensity,
    }
}

/// Whether two sources maintain a fixed phase relation at the detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coherence {
    Coherent,
    Incoherent,
}

/// Intensity at a point lit by two sources of intensities `i1`, `i2`
/// with phase difference `delta_phi`:
/// incoherent sources add as `i1 + i2`; coherent sources interfere as
/// `i1 + i2 + 2 sqrt(i1 i2) cos(delta_phi)`.
pub fn two_point_intensity(
    i1: f64,
    i2: f64,
    delta_phi: f64,
    coherence: Coherence,
) -> OpticsResult<f64> {
    if !(i1 >= 0.0) || !(i2 >= 0.0) {
        return Err(OpticsError::Domain(format!(
            "point intensities must be non-negative, got ({i1}, {i2})"
        )));
    }
    Ok(match coherence {
        Coherence::Incoherent => i1 + i2,
        Coherence::Coherent => i1 + i2 + 2.0 * (i1 * i2).sqrt() * delta_phi.cos(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::plane_wave;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn grid() -> GridSpec {
        GridSpec::new(8, 8, 1e-5, 633e-9).unwrap()
    }

    #[test]
    fn uniform_amplitude_two_gives_intensity_four() {
        let f = plane_wave(grid(), 2.0).unwrap();
        let img = capture_intensity(&f);
        for &v in img.intensity().iter() {
            assert_relative_eq!(v, 4.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn intensity_invariant_under_global_phase() {
        let g = grid();
        let mut f = plane_wave(g, 1.5).unwrap();
        let a = capture_intensity(&f);
        let rot = Complex64::from_polar(1.0, 1.234);
        f.amplitude_mut().mapv_inplace(|v| v * rot);
        let b = capture_intensity(&f);
        for (x, y) in a.intensity().iter().zip(b.intensity().iter()) {
            assert_relative_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn real_part_squared_differs_from_modulus() {
        let g = grid();
        let mut f = plane_wave(g, 1.0).unwrap();
        f.amplitude_mut()
            .mapv_inplace(|_| Complex64::new(0.0, 1.0));
        let standard = capture_intensity_with(&f, DetectionModel::ModulusSquared);
        let real_sq = capture_intensity_with(&f, DetectionModel::RealPartSquared);
        assert_relative_eq!(standard.intensity()[[0, 0]], 1.0, epsilon = 1e-15);
        assert_relative_eq!(real_sq.intensity()[[0, 0]], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn negative_intensity_image_rejected() {
        let g = grid();
        let mut arr = Array2::zeros(g.shape());
        arr[[1, 1]] = -0.5;
        assert!(IntensityImage::new(g, arr).is_err());
    }

    #[test]
    fn two_point_constructive_and_destructive() {
        assert_relative_eq!(
            two_point_intensity(1.0, 1.0, 0.0, Coherence::Coherent).unwrap(),
            4.0,
            epsilon = 1e-15
        );
        let destructive = two_point_intensity(1.0, 1.0, std::f64::consts::PI, Coherence::Coherent)
            .unwrap();
        assert!(destructive.abs() < 1e-15);
    }

    #[test]
    fn two_point_incoherent_sums() {
        assert_relative_eq!(
            two_point_intensity(3.0, 5.0, 2.1, Coherence::Incoherent).unwrap(),
            8.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn two_point_rejects_negative() {
        assert!(two_point_intensity(-1.0, 1.0, 0.0, Coherence::Coherent).is_err());
        assert!(two_point_intensity(1.0, -1.0, 0.0, Coherence::Incoherent).is_err());
    }

    #[test]
    fn destructive_interference_pixelwise() {
        // two unit fields pi out of phase cancel exactly
        let g = grid();
        let mut f = plane_wave(g, 1.0).unwrap();
        let minus_one = Complex64::new(-1.0, 0.0);
        let sum = f.amplitude() + &f.amplitude().mapv(|a| a * minus_one);
        f.amplitude_mut().assign(&sum);
        let img = capture_intensity(&f);
        for &v in img.intensity().iter() {
            assert!(v < 1e-15);
        }
    }
}
