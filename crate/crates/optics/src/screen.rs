//! Random phase screens modeling optically rough diffuser walls.
//!
//! A rough wall is modeled as a thin screen that multiplies the incident
//! field by `exp(i phi)` with `phi` i.i.d. uniform on `[0, 2*pi)` per
//! pixel. Screens are generated from an explicit seed and regenerate
//! bit-exactly, so a "wall" can be shared across captures and scenarios
//! without storing the array.

use std::f64::consts::TAU;

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{OpticsError, OpticsResult};
use crate::field::ComplexField;
use crate::grid::GridSpec;

/// Seeded random phase screen.
///
/// `patch_offset` selects which patch of the (cyclically continued) wall
/// the beam hits: reading phase at `(row, col)` returns the stored value
/// at `(row + offset_rows) % ny, (col + offset_cols) % nx`. Two screens
/// with the same seed but different offsets model two spots on one
/// physical wall.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseScreen {
    grid: GridSpec,
    seed: u64,
    facet_size: usize,
    patch_offset: (usize, usize),
    phases: Array2<f64>,
}

impl PhaseScreen {
    /// Generate a screen with one independent phase per pixel.
    pub fn generate(grid: GridSpec, seed: u64) -> Self {
        Self::generate_coarse(grid, seed, 1).expect("facet size 1 is always valid")
    }

    /// All-zero phases: the identity screen (a perfectly smooth wall),
    /// useful as a calibration reference.
    pub fn flat(grid: GridSpec) -> Self {
        Self {
            grid,
            seed: 0,
            facet_size: 1,
            patch_offset: (0, 0),
            phases: Array2::zeros(grid.shape()),
        }
    }

    /// Generate a screen whose roughness is coarser than the grid:
    /// square facets of `facet_size` x `facet_size` pixels share one
    /// phase value (partial facets at the high edges). `facet_size = 1`
    /// reduces to [`PhaseScreen::generate`].
    pub fn generate_coarse(grid: GridSpec, seed: u64, facet_size: usize) -> OpticsResult<Self> {
        if facet_size == 0 {
            return Err(OpticsError::InvalidConfig(
                "facet size must be at least 1 pixel".into(),
            ));
        }
        let (ny, nx) = grid.shape();
        let facets_y = ny.div_ceil(facet_size);
        let facets_x = nx.div_ceil(facet_size);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Facet phases are drawn row-major so the layout is reproducible
        // for any grid of the same facet count.
        let mut facet_phases = Array2::<f64>::zeros((facets_y, facets_x));
        for fy in 0..facets_y {
            for fx in 0..facets_x {
                facet_phases[[fy, fx]] = rng.random::<f64>() * TAU;
            }
        }
        let phases = Array2::from_shape_fn((ny, nx), |(row, col)| {
            facet_phases[[row / facet_size, col / facet_size]]
        });
        Ok(Self {
            grid,
            seed,
            facet_size,
            patch_offset: (0, 0),
            phases,
        })
    }

    /// Same screen, read through a cyclic patch offset of
    /// `(offset_rows, offset_cols)` pixels.
    pub fn with_patch_offset(mut self, offset: (usize, usize)) -> Self {
        let (ny, nx) = self.grid.shape();
        self.patch_offset = (offset.0 % ny, offset.1 % nx);
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn facet_size(&self) -> usize {
        self.facet_size
    }

    pub fn patch_offset(&self) -> (usize, usize) {
        self.patch_offset
    }

    /// Raw stored phases (offset not applied).
    pub fn phases(&self) -> &Array2<f64> {
        &self.phases
    }

    /// Phase seen at `(row, col)` after the cyclic patch offset.
    pub fn phase_at(&self, row: usize, col: usize) -> f64 {
        let (ny, nx) = self.grid.shape();
        let (dr, dc) = self.patch_offset;
        self.phases[[(row + dr) % ny, (col + dc) % nx]]
    }
}

/// Multiply a field by `exp(i phi)` from a phase screen, honoring the
/// screen's patch offset. Pure phase: per-pixel intensity is unchanged.
pub fn apply_phase_screen(field: &ComplexField, screen: &PhaseScreen) -> OpticsResult<ComplexField> {
    if field.grid().shape() != screen.grid().shape() {
        return Err(OpticsError::GridMismatch {
            expected: field.grid().shape(),
            actual: screen.grid().shape(),
        });
    }
    let (ny, nx) = field.grid().shape();
    let mut amp = field.amplitude().clone();
    for row in 0..ny {
        for col in 0..nx {
            amp[[row, col]] *= Complex64::from_polar(1.0, screen.phase_at(row, col));
        }
    }
    ComplexField::new(*field.grid(), amp)
}
