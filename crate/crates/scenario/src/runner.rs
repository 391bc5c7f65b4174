//! The four capture pipelines and the dispatching entry point.

use specklenet_optics::seed::mix_seed;
use specklenet_optics::{
    apply_mask, apply_phase_screen, capture_intensity_with, ideal_lens_image_with_aperture,
    plane_wave, point_source_field, propagate, AmplitudeMask, ComplexField, IntensityImage,
    PhaseScreen,
};

use crate::config::{ScenarioConfig, ScenarioKind};
use crate::error::{ScenarioError, ScenarioResult};
use crate::provenance::{mask_fingerprint, CaptureProvenance};

fn expect_kind(cfg: &ScenarioConfig, kind: ScenarioKind) -> ScenarioResult<()> {
    if cfg.kind != kind {
        return Err(ScenarioError::InvalidConfig(format!(
            "configuration is for {}, but the {} pipeline was invoked",
            cfg.kind, kind
        )));
    }
    Ok(())
}

fn wall_screen(cfg: &ScenarioConfig, seed: u64, offset: (usize, usize)) -> ScenarioResult<PhaseScreen> {
    Ok(PhaseScreen::generate_coarse(cfg.grid, seed, cfg.wall_facet_size)?.with_patch_offset(offset))
}

/// Shared camera leg: last wall -> camera -> lens -> detector.
///
/// The camera is focused on the last wall of the chain, so its lens
/// exactly inverts the free-space leg from that wall to the pupil and
/// relays the wall-plane field onto the sensor; computing the leg and
/// its inverse would only shuffle rounding error, so the code applies
/// the net transform — the aperture low-pass and the magnification
/// rescale — directly to the wall-exit field. `d_wall_camera` states
/// where the camera sits (and is validated as geometry), but a focused
/// relay cancels it out of the image; what the sensor resolves on the
/// wall is set by `aperture_na` alone.
fn camera_leg(cfg: &ScenarioConfig, after_last_wall: &ComplexField) -> ScenarioResult<IntensityImage> {
    let imaged =
        ideal_lens_image_with_aperture(after_last_wall, cfg.lens_magnification, cfg.aperture_na)?;
    Ok(capture_intensity_with(&imaged, cfg.detection))
}

fn provenance(
    cfg: &ScenarioConfig,
    object: &AmplitudeMask,
    patch_offsets: Vec<(usize, usize)>,
    capture_index: u64,
) -> CaptureProvenance {
    CaptureProvenance {
        scenario: cfg.kind,
        wall_seed: cfg.wall_seed,
        wall_seed_2: cfg.wall_seed_2,
        patch_offsets,
        capture_index,
        object_id: mask_fingerprint(object),
        object_label: None,
        noise_seed: None,
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

/// One-wall pipeline with an explicit wall patch offset (shared by the
/// fixed-wall and rotating-wall geometries).
fn one_wall_capture(
    cfg: &ScenarioConfig,
    object: &AmplitudeMask,
    wall_offset: (usize, usize),
) -> ScenarioResult<IntensityImage> {
    let lit = plane_wave(cfg.grid, 1.0)?;
    let masked = apply_mask(&lit, object)?;
    let at_wall = propagate(&masked, cfg.d_object_wall)?;
    let scattered = apply_phase_screen(&at_wall, &wall_screen(cfg, cfg.wall_seed, wall_offset)?)?;
    camera_leg(cfg, &scattered)
}

/// Plane wave -> object -> wall -> camera (the baseline geometry).
pub fn run_one_wall(
    cfg: &ScenarioConfig,
    object: &AmplitudeMask,
) -> ScenarioResult<(IntensityImage, CaptureProvenance)> {
    expect_kind(cfg, ScenarioKind::OneWall)?;
    cfg.validate()?;
    let image = one_wall_capture(cfg, object, (0, 0))?;
    Ok((image, provenance(cfg, object, vec![(0, 0)], 0)))
}

fn same_side_capture(
    cfg: &ScenarioConfig,
    object: &AmplitudeMask,
    illumination: (usize, usize),
    observation: (usize, usize),
) -> ScenarioResult<IntensityImage> {
    let source = point_source_field(cfg.grid, cfg.source_position, 0.0)?;
    let at_wall_in = propagate(&source, cfg.d_source_wall)?;
    let bounced_in =
        apply_phase_screen(&at_wall_in, &wall_screen(cfg, cfg.wall_seed, illumination)?)?;
    let at_object = propagate(&bounced_in, cfg.d_object_wall)?;
    let masked = apply_mask(&at_object, object)?;
    let at_wall_out = propagate(&masked, cfg.d_object_wall)?;
    let bounced_out =
        apply_phase_screen(&at_wall_out, &wall_screen(cfg, cfg.wall_seed, observation)?)?;
    camera_leg(cfg, &bounced_out)
}

/// Laser and camera on the same side of one wall: point source ->
/// illumination patch -> object -> observation patch -> camera. The
/// two patches are disjoint spots of the same physical wall.
pub fn run_same_side(
    cfg: &ScenarioConfig,
    object: &AmplitudeMask,
) -> ScenarioResult<(IntensityImage, CaptureProvenance)> {
    expect_kind(cfg, ScenarioKind::SameSide)?;
    cfg.validate()?;
    let (ny, nx) = cfg.grid.shape();
    let illumination = (cfg.illumination_offset.0 % ny, cfg.illumination_offset.1 % nx);
    let observation = (cfg.observation_offset.0 % ny, cfg.observation_offset.1 % nx);
    let image = same_side_capture(cfg, object, illumination, observation)?;
    Ok((
        image,
        provenance(cfg, object, vec![illumination, observation], 0),
    ))
}

/// Wall patch seen by capture number `capture_index` of a rotating
/// wall: a fresh pseudo-random offset drawn from the wall's own seed,
/// so the sequence of patches is a deterministic property of the wall.
pub fn rotation_offset(wall_seed: u64, capture_index: u64, grid_shape: (usize, usize)) -> (usize, usize) {
    let (ny, nx) = grid_shape;
    let r = mix_seed(wall_seed, capture_index);
    (((r >> 32) as usize) % ny, ((r as u32) as usize) % nx)
}

/// Like `run_one_wall`, but capture number `capture_index` scatters
/// off its own random patch of the wall.
pub fn run_rotating_wall(
    cfg: &ScenarioConfig,
    object: &AmplitudeMask,
    capture_index: u64,
) -> ScenarioResult<(IntensityImage, CaptureProvenance)> {
    expect_kind(cfg, ScenarioKind::RotatingWall)?;
    cfg.validate()?;
    let offset = rotation_offset(cfg.wall_seed, capture_index, cfg.grid.shape());
    let image = one_wall_capture(cfg, object, offset)?;
    Ok((image, provenance(cfg, object, vec![offset], capture_index)))
}

fn two_walls_capture(
    cfg: &ScenarioConfig,
    object: &AmplitudeMask,
    wall_seed_2: u64,
) -> ScenarioResult<IntensityImage> {
    let lit = plane_wave(cfg.grid, 1.0)?;
    let masked = apply_mask(&lit, object)?;
    let at_wall_1 = propagate(&masked, cfg.d_object_wall)?;
    let after_wall_1 = apply_phase_screen(&at_wall_1, &wall_screen(cfg, cfg.wall_seed, (0, 0))?)?;
    let at_wall_2 = propagate(&after_wall_1, cfg.d_wall_wall)?;
    let after_wall_2 = apply_phase_screen(&at_wall_2, &wall_screen(cfg, wall_seed_2, (0, 0))?)?;
    camera_leg(cfg, &after_wall_2)
}

/// Object -> first wall -> second wall -> camera.
pub fn run_two_walls(
    cfg: &ScenarioConfig,
    object: &AmplitudeMask,
) -> ScenarioResult<(IntensityImage, CaptureProvenance)> {
    expect_kind(cfg, ScenarioKind::TwoWalls)?;
    cfg.validate()?;
    let seed_2 = cfg.wall_seed_2.ok_or_else(|| {
        ScenarioError::InvalidConfig("two-walls geometry requires wall_seed_2".into())
    })?;
    let image = two_walls_capture(cfg, object, seed_2)?;
    Ok((
        image,
        provenance(cfg, object, vec![(0, 0), (0, 0)], 0),
    ))
}

/// Dispatch to the pipeline matching `cfg.kind`. `capture_index`
/// matters only for the rotating wall; pass 0 elsewhere.
pub fn run(
    cfg: &ScenarioConfig,
    object: &AmplitudeMask,
    capture_index: u64,
) -> ScenarioResult<(IntensityImage, CaptureProvenance)> {
    match cfg.kind {
        ScenarioKind::OneWall => run_one_wall(cfg, object),
        ScenarioKind::SameSide => run_same_side(cfg, object),
        ScenarioKind::RotatingWall => run_rotating_wall(cfg, object, capture_index),
        ScenarioKind::TwoWalls => run_two_walls(cfg, object),
    }
}

/// Reproduce a capture from its provenance record. The seeds and patch
/// offsets stored in the provenance override whatever the passed
/// configuration currently says, so the result is bit-identical to the
/// original capture even if the config drifted since.
pub fn rerun(
    cfg: &ScenarioConfig,
    object: &AmplitudeMask,
    prov: &CaptureProvenance,
) -> ScenarioResult<IntensityImage> {
    if prov.object_id != mask_fingerprint(object) {
        return Err(ScenarioError::ProvenanceMismatch(format!(
            "object fingerprint {:#018x} does not match the provenance record {:#018x}",
            mask_fingerprint(object),
            prov.object_id
        )));
    }
    if prov.scenario != cfg.kind {
        return Err(ScenarioError::ProvenanceMismatch(format!(
            "provenance records a {} capture but the configuration is {}",
            prov.scenario, cfg.kind
        )));
    }
    let mut cfg = cfg.clone();
    cfg.wall_seed = prov.wall_seed;
    cfg.wall_seed_2 = prov.wall_seed_2;
    cfg.validate()?;
    let want = |n: usize| -> ScenarioResult<()> {
        if prov.patch_offsets.len() != n {
            return Err(ScenarioError::ProvenanceMismatch(format!(
                "{} provenance must record {} patch offset(s), found {}",
                prov.scenario,
                n,
                prov.patch_offsets.len()
            )));
        }
        Ok(())
    };
    match cfg.kind {
        ScenarioKind::OneWall | ScenarioKind::RotatingWall => {
            want(1)?;
            one_wall_capture(&cfg, object, prov.patch_offsets[0])
        }
        ScenarioKind::SameSide => {
            want(2)?;
            same_side_capture(&cfg, object, prov.patch_offsets[0], prov.patch_offsets[1])
        }
        ScenarioKind::TwoWalls => {
            want(2)?;
            let seed_2 = prov.wall_seed_2.ok_or_else(|| {
                ScenarioError::ProvenanceMismatch(
                    "two-walls provenance is missing the second wall seed".into(),
                )
            })?;
            two_walls_capture(&cfg, object, seed_2)
        }
    }
}
