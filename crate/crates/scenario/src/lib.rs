//! Non-line-of-sight capture geometries.
//!
//! This crate composes the wave-optics primitives into the four
//! around-the-corner imaging layouts — one wall, laser/camera on the
//! same side, rotating wall, and two walls — and produces one speckle
//! capture per run, together with a provenance record sufficient to
//! reproduce the capture bit-exactly.

mod config;
mod error;
mod provenance;
mod runner;

pub use config::{default_aperture_na, ScenarioConfig, ScenarioKind};
pub use error::{ScenarioError, ScenarioResult};
pub use provenance::{mask_fingerprint, CaptureProvenance};
pub use runner::{
    rerun, rotation_offset, run, run_one_wall, run_rotating_wall, run_same_side, run_two_walls,
};
