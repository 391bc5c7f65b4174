//! Scenario geometry and capture configuration.

use serde::{Deserialize, Serialize};
use specklenet_optics::{DetectionModel, GridSpec};

use crate::error::{ScenarioError, ScenarioResult};

/// The four capture geometries.
///
/// All of them share the same backbone — coherent light carrying the
/// object's imprint scatters off at least one optically rough wall
/// before a lens and camera record the resulting speckle — and differ
/// in how the light reaches the wall and how many rough bounces occur.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioKind {
    /// Plane-wave illumination through the object onto one wall.
    OneWall,
    /// Laser and camera on the same side: a point source bounces off
    /// one patch of the wall, illuminates the object, and returns to a
    /// second, disjoint patch of the same wall.
    SameSide,
    /// Like `OneWall`, but each capture sees a freshly chosen random
    /// patch of the wall (a spinning diffuser plate).
    RotatingWall,
    /// Two successive rough walls between the object and the camera.
    TwoWalls,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::OneWall,
        ScenarioKind::SameSide,
        ScenarioKind::RotatingWall,
        ScenarioKind::TwoWalls,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::OneWall => "one-wall",
            ScenarioKind::SameSide => "same-side",
            ScenarioKind::RotatingWall => "rotating-wall",
            ScenarioKind::TwoWalls => "two-walls",
        }
    }

    pub fn parse(s: &str) -> ScenarioResult<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "one-wall" | "onewall" => Ok(ScenarioKind::OneWall),
            "same-side" | "sameside" => Ok(ScenarioKind::SameSide),
            "rotating-wall" | "rotatingwall" | "rotating" => Ok(ScenarioKind::RotatingWall),
            "two-walls" | "twowalls" | "two-wall" => Ok(ScenarioKind::TwoWalls),
            other => Err(ScenarioError::InvalidConfig(format!(
                "unknown scenario kind {other:?} (expected one-wall, same-side, rotating-wall, or two-walls)"
            ))),
        }
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Default camera aperture for a grid: the numerical aperture whose
/// Airy radius (0.61 lambda / NA) equals two grid pixels, so the lens
/// resolves two-pixel detail on the wall it is focused on while still
/// turning the wall's per-pixel roughness into fully developed
/// speckle. Capped at 0.95 for grids sampled finer than the
/// wavelength.
pub fn default_aperture_na(grid: &GridSpec) -> f64 {
    (0.61 * grid.wavelength() / (2.0 * grid.pitch())).min(0.95)
}

/// Full description of one capture geometry.
///
/// Distances are in meters and default to 0.20 m. Patch offsets are
/// `(rows, cols)` pixel shifts into the wall screen (cyclic).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub grid: GridSpec,
    /// Object plane to (first) wall.
    pub d_object_wall: f64,
    /// (Last) wall to camera.
    pub d_wall_camera: f64,
    /// First wall to second wall (`TwoWalls` only).
    pub d_wall_wall: f64,
    /// Source aperture plane to wall (`SameSide` only).
    pub d_source_wall: f64,
    /// Laser point-source position relative to the source aperture
    /// plane at z = 0 (`SameSide` only); z must be negative (behind).
    pub source_position: (f64, f64, f64),
    /// Physical side of the square region the object spans.
    pub object_size: f64,
    /// Seed of the (first) wall's phase screen.
    pub wall_seed: u64,
    /// Seed of the second wall (`TwoWalls`; required there).
    pub wall_seed_2: Option<u64>,
    /// Wall patch lit by the source (`SameSide`).
    pub illumination_offset: (usize, usize),
    /// Wall patch imaged by the camera (`SameSide`; must differ from
    /// the illumination patch).
    pub observation_offset: (usize, usize),
    /// Square facet size of the wall roughness in grid pixels.
    pub wall_facet_size: usize,
    pub lens_magnification: f64,
    /// Optional lens aperture stop (numerical aperture).
    pub aperture_na: Option<f64>,
    pub detection: DetectionModel,
    /// Additive Gaussian sensor-noise level used by dataset
    /// preprocessing, as a fraction of the mean intensity.
    pub noise_sigma: f64,
}

impl ScenarioConfig {
    /// Defaults for a given geometry on a given grid: 0.20 m legs,
    /// object spanning half the grid side, per-pixel wall roughness,
    /// unit-magnification lens with an aperture that resolves
    /// two-pixel spots on the wall it is focused on.
    pub fn new(kind: ScenarioKind, grid: GridSpec) -> Self {
        let (width, height) = grid.physical_size();
        let (ny, nx) = grid.shape();
        Self {
            kind,
            grid,
            d_object_wall: 0.20,
            d_wall_camera: 0.20,
            d_wall_wall: 0.20,
            d_source_wall: 0.20,
            source_position: (0.0, 0.0, -0.05),
            object_size: 0.5 * width.min(height),
            wall_seed: 0,
            wall_seed_2: match kind {
                ScenarioKind::TwoWalls => Some(1),
                _ => None,
            },
            illumination_offset: (0, 0),
            observation_offset: (ny / 2, nx / 2),
            wall_facet_size: 1,
            lens_magnification: 1.0,
            aperture_na: Some(default_aperture_na(&grid)),
            detection: DetectionModel::default(),
            noise_sigma: 0.05,
        }
    }

    /// Validate the fields that matter for this config's `kind`.
    pub fn validate(&self) -> ScenarioResult<()> {
        let mut required = vec![
            ("d_object_wall", self.d_object_wall),
            ("d_wall_camera", self.d_wall_camera),
        ];
        match self.kind {
            ScenarioKind::TwoWalls => required.push(("d_wall_wall", self.d_wall_wall)),
            ScenarioKind::SameSide => required.push(("d_source_wall", self.d_source_wall)),
            _ => {}
        }
        for (name, value) in required {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ScenarioError::InvalidConfig(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        let (width, height) = self.grid.physical_size();
        if !(self.object_size > 0.0) || self.object_size > width.min(height) {
            return Err(ScenarioError::InvalidConfig(format!(
                "object_size {} m must be positive and fit the {:.4e} m grid side",
                self.object_size,
                width.min(height)
            )));
        }
        if self.wall_facet_size == 0 {
            return Err(ScenarioError::InvalidConfig(
                "wall_facet_size must be at least 1".into(),
            ));
        }
        if self.lens_magnification == 0.0 || !self.lens_magnification.is_finite() {
            return Err(ScenarioError::InvalidConfig(
                "lens_magnification must be nonzero".into(),
            ));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(ScenarioError::InvalidConfig(format!(
                "noise_sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        if self.kind == ScenarioKind::TwoWalls && self.wall_seed_2.is_none() {
            return Err(ScenarioError::InvalidConfig(
                "two-walls geometry requires wall_seed_2".into(),
            ));
        }
        if self.kind == ScenarioKind::SameSide {
            if self.source_position.2 == 0.0 {
                return Err(ScenarioError::InvalidConfig(
                    "same-side source must sit behind the source aperture plane (z != 0)".into(),
                ));
            }
            let (ny, nx) = self.grid.shape();
            let illum = (self.illumination_offset.0 % ny, self.illumination_offset.1 % nx);
            let obs = (self.observation_offset.0 % ny, self.observation_offset.1 % nx);
            if illum == obs {
                return Err(ScenarioError::InvalidConfig(format!(
                    "same-side illumination and observation patches coincide at {illum:?}; \
                     the camera must look away from the laser spot"
                )));
            }
        }
        Ok(())
    }
}
