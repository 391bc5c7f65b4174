//! Complex scalar field sampled on a [`GridSpec`], plus source fields.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{OpticsError, OpticsResult};
use crate::grid::GridSpec;

/// Monochromatic scalar field: complex amplitude per pixel plus the grid
/// metadata it is sampled on. Arrays are row-major `(ny, nx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    amplitude: Array2<Complex64>,
}

impl ComplexField {
    /// Wrap an amplitude array, checking its shape against the grid.
    pub fn new(grid: GridSpec, amplitude: Array2<Complex64>) -> OpticsResult<Self> {
        if amplitude.dim() != grid.shape() {
            return Err(OpticsError::GridMismatch {
                expected: grid.shape(),
                actual: amplitude.dim(),
            });
        }
        Ok(Self { grid, amplitude })
    }

    /// All-zero field.
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            amplitude: Array2::zeros(grid.shape()),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn amplitude(&self) -> &Array2<Complex64> {
        &self.amplitude
    }

    pub fn amplitude_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.amplitude
    }

    pub fn into_amplitude(self) -> Array2<Complex64> {
        self.amplitude
    }

    /// Per-pixel intensity `|a|^2`.
    pub fn intensity(&self) -> Array2<f64> {
        self.amplitude.mapv(|a| a.norm_sqr())
    }

    /// Total energy `sum(|a|^2) * pitch^2`, i.e. intensity integrated over
    /// the plane.
    pub fn total_energy(&self) -> f64 {
        let p = self.grid.pitch();
        self.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>() * p * p
    }
}

/// Uniform plane wave at normal incidence: every pixel is
/// `amplitude + 0i`.
pub fn plane_wave(grid: GridSpec, amplitude: f64) -> OpticsResult<ComplexField> {
    if !(amplitude > 0.0) || !amplitude.is_finite() {
        return Err(OpticsError::InvalidConfig(format!(
            "plane-wave amplitude must be positive and finite, got {amplitude}"
        )));
    }
    let amp = Array2::from_elem(grid.shape(), Complex64::new(amplitude, 0.0));
    ComplexField::new(grid, amp)
}

/// Spherical wavelet from a point source at `source_position`, sampled on
/// the plane `z = plane_z`: `a = exp(i k r) / r` with `r` the exact 3-D
/// distance from the source to each grid point.
pub fn point_source_field(
    grid: GridSpec,
    source_position: (f64, f64, f64),
    plane_z: f64,
) -> OpticsResult<ComplexField> {
    let (sx, sy, sz) = source_position;
    if plane_z == sz {
        return Err(OpticsError::DegenerateGeometry(format!(
            "point source lies in the sampled plane z = {plane_z}; 1/r diverges"
        )));
    }
    let k = grid.wavenumber();
    let dz = plane_z - sz;
    let (ny, nx) = grid.shape();
    let mut amp = Array2::zeros((ny, nx));
    for row in 0..ny {
        for col in 0..nx {
            let (x, y) = grid.coord(row, col);
            let r = ((x - sx).powi(2) + (y - sy).powi(2) + dz * dz).sqrt();
            amp[[row, col]] = Complex64::from_polar(1.0 / r, k * r);
        }
    }
    ComplexField::new(grid, amp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid() -> GridSpec {
        GridSpec::new(8, 8, 1e-5, 633e-9).unwrap()
    }

    #[test]
    fn shape_mismatch_rejected() {
        let g = grid();
        let arr = Array2::<Complex64>::zeros((4, 8));
        assert!(matches!(
            ComplexField::new(g, arr),
            Err(OpticsError::GridMismatch { .. })
        ));
    }

    #[test]
    fn plane_wave_is_uniform() {
        let f = plane_wave(grid(), 1.0).unwrap();
        for a in f.amplitude().iter() {
            assert_eq!(*a, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn plane_wave_energy_scales_quadratically() {
        let g = grid();
        let e1 = plane_wave(g, 1.0).unwrap().total_energy();
        let e2 = plane_wave(g, 2.0).unwrap().total_energy();
        assert_relative_eq!(e2, 4.0 * e1, max_relative = 1e-12);
    }

    #[test]
    fn plane_wave_rejects_nonpositive_amplitude() {
        assert!(plane_wave(grid(), 0.0).is_err());
        assert!(plane_wave(grid(), -1.0).is_err());
    }

    #[test]
    fn point_source_in_plane_rejected() {
        assert!(point_source_field(grid(), (0.0, 0.0, 0.1), 0.1).is_err());
    }

    #[test]
    fn point_source_spherical_symmetry() {
        // on-axis source: grid points equidistant from the axis see the
        // same complex value
        let g = GridSpec::new(9, 9, 1e-5, 633e-9).unwrap();
        let f = point_source_field(g, (0.0, 0.0, -0.05), 0.0).unwrap();
        // (4, 6) and (6, 4) are both 2 pixels from the center, on x and y
        assert_eq!(f.amplitude()[[4, 6]], f.amplitude()[[6, 4]]);
        assert_eq!(f.amplitude()[[4, 2]], f.amplitude()[[2, 4]]);
    }

    #[test]
    fn point_source_inverse_distance_envelope() {
        let g = grid();
        let near = point_source_field(g, (0.0, 0.0, -0.05), 0.0).unwrap();
        let far = point_source_field(g, (0.0, 0.0, -0.10), 0.0).unwrap();
        // on-axis pixel: doubling the distance halves |a|
        let a_near = near.amplitude()[[4, 4]].norm();
        let a_far = far.amplitude()[[4, 4]].norm();
        assert_relative_eq!(a_near, 2.0 * a_far, max_relative = 1e-12);
    }

    #[test]
    fn point_source_phase_matches_scalar_evaluation() {
        // independent scalar oracle: evaluate exp(i k r)/r by hand at two
        // pixels and compare
        let g = grid();
        let f = point_source_field(g, (1e-5, -2e-5, -0.03), 0.0).unwrap();
        let k = std::f64::consts::TAU / g.wavelength();
        for (row, col) in [(0usize, 0usize), (5, 2)] {
            let (x, y) = g.coord(row, col);
            let r = ((x - 1e-5).powi(2) + (y + 2e-5).powi(2) + 0.03f64.powi(2)).sqrt();
            let expected = Complex64::from_polar(1.0 / r, k * r);
            let got = f.amplitude()[[row, col]];
            assert_relative_eq!(got.re, expected.re, max_relative = 1e-12);
            assert_relative_eq!(got.im, expected.im, max_relative = 1e-12);
        }
    }
}
