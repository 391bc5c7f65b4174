//! Capture provenance: everything needed to reproduce a capture.

use serde::{Deserialize, Serialize};
use specklenet_optics::AmplitudeMask;

use crate::config::ScenarioKind;

/// Record of how one speckle image came to be. Together with the
/// scenario configuration and the object mask, it reproduces the
/// capture bit-exactly (see `rerun`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureProvenance {
    pub scenario: ScenarioKind,
    pub wall_seed: u64,
    pub wall_seed_2: Option<u64>,
    /// Wall patch offsets actually used, in scattering order
    /// (`SameSide` records two: illumination then observation).
    pub patch_offsets: Vec<(usize, usize)>,
    /// Capture counter (meaningful for `RotatingWall`, 0 otherwise).
    pub capture_index: u64,
    /// Content hash of the object mask, for integrity checking.
    pub object_id: u64,
    /// Class label, filled in by dataset generation.
    pub object_label: Option<u8>,
    /// Seed of the detector-noise stream, filled in by dataset
    /// generation (`None` for noiseless captures).
    #[serde(default)]
    pub noise_seed: Option<u64>,
    /// Software version that produced the capture.
    pub version: String,
}

impl CaptureProvenance {
    pub fn with_label(mut self, label: u8) -> Self {
        self.object_label = Some(label);
        self
    }

    pub fn with_noise_seed(mut self, seed: u64) -> Self {
        self.noise_seed = Some(seed);
        self
    }
}

/// 64-bit FNV-1a content hash of a mask (dimensions plus the exact bit
/// patterns of its transmittance values).
pub fn mask_fingerprint(mask: &AmplitudeMask) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            hash ^= b as u64;
            hash = hash.wrapping_mul(PRIME);
        }
    };
    let (ny, nx) = mask.grid().shape();
    eat(&(ny as u64).to_le_bytes());
    eat(&(nx as u64).to_le_bytes());
    for &t in mask.transmittance().iter() {
        eat(&t.to_bits().to_le_bytes());
    }
    hash
}
