//! Scalar coherent wave optics for speckle simulation.
//!
//! This crate provides the physical building blocks from which
//! non-line-of-sight imaging scenarios are composed: sampled complex
//! fields, free-space angular-spectrum propagation, amplitude masks
//! (objects), seeded random phase screens (rough walls), a perfect
//! imaging lens, intensity detection, and first-order speckle
//! statistics.
//!
//! Everything is deterministic: operations are pure functions of their
//! inputs, and all randomness flows through explicit 64-bit seeds, so a
//! given configuration reproduces its output bit-for-bit.
//!
//! A typical scattering chain looks like:
//!
//! ```
//! use specklenet_optics::*;
//!
//! let grid = GridSpec::square(64, 1e-5, 632.8e-9).unwrap();
//! let illumination = plane_wave(grid, 1.0).unwrap();
//! let object = AmplitudeMask::transparent(grid);
//! let wall = PhaseScreen::generate(grid, 42);
//!
//! let at_wall = propagate(&apply_mask(&illumination, &object).unwrap(), 0.05).unwrap();
//! let scattered = apply_phase_screen(&at_wall, &wall).unwrap();
//! let at_camera = propagate(&scattered, 0.05).unwrap();
//! let image = capture_intensity(&ideal_lens_image(&at_camera, 1.0).unwrap());
//! let stats = speckle_statistics(&image).unwrap();
//! assert!(stats.contrast > 0.5); // fully developed speckle approaches 1
//! ```

mod error;
mod field;
mod grid;
mod intensity;
mod lens;
mod mask;
mod propagate;
mod screen;
pub mod seed;
mod stats;

pub use error::{OpticsError, OpticsResult};
pub use field::{plane_wave, point_source_field, ComplexField};
pub use grid::GridSpec;
pub use intensity::{
    capture_intensity, capture_intensity_with, two_point_intensity, Coherence, DetectionModel,
    IntensityImage,
};
pub use lens::{ideal_lens_image, ideal_lens_image_with_aperture};
pub use mask::{apply_mask, AmplitudeMask};
pub use propagate::propagate;
pub use screen::{apply_phase_screen, PhaseScreen};
pub use stats::{speckle_statistics, SpeckleStats, HISTOGRAM_BINS, HISTOGRAM_MAX};
