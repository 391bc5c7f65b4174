//! Free-space propagation by the band-limited angular-spectrum method.
//!
//! The field's 2-D spectrum is multiplied by the exact scalar transfer
//! function
//!
//! ```text
//! H(fx, fy) = exp(i * 2*pi * (d / lambda) * sqrt(1 - (lambda fx)^2 - (lambda fy)^2))
//! ```
//!
//! for propagating components; evanescent components (negative radicand)
//! are attenuated to zero whenever `d != 0`. `|H| = 1` on the propagating
//! band, so the method conserves energy there and composes exactly:
//! propagating by `d1` then `d2` equals propagating by `d1 + d2`.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::OpticsResult;
use crate::field::ComplexField;

/// In-place 2-D FFT (rows then columns). `inverse` applies the backward
/// transform *without* normalization; callers divide by `nx * ny`.
pub(crate) fn fft2(arr: &mut Array2<Complex64>, inverse: bool) {
    let (ny, nx) = arr.dim();
    let mut planner = FftPlanner::new();
    let fft_x = if inverse {
        planner.plan_fft_inverse(nx)
    } else {
        planner.plan_fft_forward(nx)
    };
    for mut row in arr.rows_mut() {
        fft_x.process(row.as_slice_mut().expect("fields are stored row-major"));
    }
    let fft_y = if inverse {
        planner.plan_fft_inverse(ny)
    } else {
        planner.plan_fft_forward(ny)
    };
    let mut col_buf = vec![Complex64::ZERO; ny];
    for col in 0..nx {
        for row in 0..ny {
            col_buf[row] = arr[[row, col]];
        }
        fft_y.process(&mut col_buf);
        for row in 0..ny {
            arr[[row, col]] = col_buf[row];
        }
    }
}

/// FFT sample frequency for bin `j` of `n` samples at spacing `pitch`,
/// in cycles per meter (standard wrap: bins past `n/2` are negative).
pub(crate) fn fft_freq(j: usize, n: usize, pitch: f64) -> f64 {
    let j = j as f64;
    let n = n as f64;
    let wrapped = if j < (n / 2.0).ceil() { j } else { j - n };
    wrapped / (n * pitch)
}

/// Propagate a field along z by `distance` meters (negative distances
/// propagate backward). `distance == 0` returns the input unchanged.
///
/// The grid samples the transfer-function phase adequately only while
/// `|distance| <= n * pitch^2 / wavelength` (per axis); beyond that the
/// periodic window wraps scattered light back in. That regime is often
/// acceptable for speckle work, so it logs a warning instead of failing.
pub fn propagate(field: &ComplexField, distance: f64) -> OpticsResult<ComplexField> {
    if distance == 0.0 {
        return Ok(field.clone());
    }
    let grid = *field.grid();
    let (ny, nx) = grid.shape();
    let lambda = grid.wavelength();
    let pitch = grid.pitch();

    let alias_free = nx.min(ny) as f64 * pitch * pitch / lambda;
    if distance.abs() > alias_free {
        log::warn!(
            "propagating {:.3e} m exceeds the alias-free range {:.3e} m for a {}x{} grid at {:.1e} m pitch; expect periodic wraparound",
            distance,
            alias_free,
            nx,
            ny,
            pitch
        );
    }

    // (lambda * f)^2 per axis, precomputed once
    let lfx2: Vec<f64> = (0..nx)
        .map(|j| {
            let lf = lambda * fft_freq(j, nx, pitch);
            lf * lf
        })
        .collect();
    let lfy2: Vec<f64> = (0..ny)
        .map(|j| {
            let lf = lambda * fft_freq(j, ny, pitch);
            lf * lf
        })
        .collect();

    let mut spectrum = field.amplitude().clone();
    fft2(&mut spectrum, false);

    let phase_scale = std::f64::consts::TAU * distance / lambda;
    for row in 0..ny {
        for col in 0..nx {
            let radicand = 1.0 - lfx2[col] - lfy2[row];
            spectrum[[row, col]] = if radicand >= 0.0 {
                spectrum[[row, col]] * Complex64::from_polar(1.0, phase_scale * radicand.sqrt())
            } else {
                Complex64::ZERO
            };
        }
    }

    fft2(&mut spectrum, true);
    let norm = 1.0 / (nx * ny) as f64;
    spectrum.mapv_inplace(|a| a * norm);
    ComplexField::new(grid, spectrum)
}
