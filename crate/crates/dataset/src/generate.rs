//! Dataset generation: digits in, labeled speckle records out.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use specklenet_optics::seed::mix_seed;
use specklenet_optics::IntensityImage;
use specklenet_scenario::{rerun, run, CaptureProvenance, ScenarioConfig};

use crate::error::{DatasetError, DatasetResult};
use crate::mnist::{binarize, embed_object, LabeledImage};
use crate::preprocess::{preprocess, PreprocessConfig};

/// Everything needed to turn a list of digits into a speckle dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub scenario: ScenarioConfig,
    pub preprocess: PreprocessConfig,
    /// Threshold used to binarize grayscale digits before embedding.
    pub binarize_threshold: f64,
}

impl GenerationConfig {
    pub fn new(scenario: ScenarioConfig) -> Self {
        Self {
            scenario,
            preprocess: PreprocessConfig::default(),
            binarize_threshold: 0.5,
        }
    }
}

/// One dataset entry: a preprocessed speckle image, its class label,
/// and the provenance of the capture behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeckleRecord {
    pub image: IntensityImage,
    pub label: u8,
    pub provenance: CaptureProvenance,
}

/// Round every pixel to the nearest binary32 value. Stored datasets
/// hold f32 samples, so quantizing here makes a written-then-reloaded
/// record bit-identical to the one in memory.
fn quantize_f32(image: IntensityImage) -> DatasetResult<IntensityImage> {
    let grid = *image.grid();
    let quantized = image.into_intensity().mapv(|v| v as f32 as f64);
    Ok(IntensityImage::new(grid, quantized)?)
}

/// Generate dataset entry number `index` from one digit:
/// binarize, embed, capture, preprocess, quantize. The per-record
/// noise seed is derived from `seed_stream` and the index.
pub fn generate_record(
    cfg: &GenerationConfig,
    digit: &LabeledImage,
    index: u64,
    seed_stream: u64,
) -> DatasetResult<SpeckleRecord> {
    let object = binarize(digit, cfg.binarize_threshold)?;
    let mask = embed_object(&object, cfg.scenario.grid, cfg.scenario.object_size)?;
    let (raw, provenance) = run(&cfg.scenario, &mask, index)?;
    let noise_seed = mix_seed(seed_stream, index);
    let image = preprocess(&raw, &cfg.preprocess, cfg.scenario.noise_sigma, noise_seed)?;
    Ok(SpeckleRecord {
        image: quantize_f32(image)?,
        label: digit.label(),
        provenance: provenance.with_label(digit.label()).with_noise_seed(noise_seed),
    })
}

/// Generate one record per digit, in parallel. Record `i` is derived
/// from `digits[i]` with capture index `i`, so the output is
/// independent of thread scheduling; on failure, the error names the
/// smallest failing record index.
pub fn generate_dataset(
    cfg: &GenerationConfig,
    digits: &[LabeledImage],
    seed_stream: u64,
) -> DatasetResult<Vec<SpeckleRecord>> {
    cfg.scenario.validate().map_err(DatasetError::from)?;
    let results: Vec<DatasetResult<SpeckleRecord>> = digits
        .par_iter()
        .enumerate()
        .map(|(i, digit)| generate_record(cfg, digit, i as u64, seed_stream))
        .collect();
    let mut records = Vec::with_capacity(results.len());
    for (i, result) in results.into_iter().enumerate() {
        records.push(result.map_err(|e| e.at_record(i))?);
    }
    Ok(records)
}

/// Rebuild a record's image from its provenance and the original
/// digit, bit-exactly. The provenance pins the wall seeds, patch
/// offsets, and noise stream; the generation configuration must be the
/// one used originally.
pub fn reproduce_record(
    cfg: &GenerationConfig,
    digit: &LabeledImage,
    record: &SpeckleRecord,
) -> DatasetResult<IntensityImage> {
    let object = binarize(digit, cfg.binarize_threshold)?;
    let mask = embed_object(&object, cfg.scenario.grid, cfg.scenario.object_size)?;
    let raw = rerun(&cfg.scenario, &mask, &record.provenance)?;
    let noise_seed = record.provenance.noise_seed.ok_or_else(|| {
        DatasetError::InvalidConfig(
            "record provenance carries no noise seed; it was not produced by dataset generation"
                .into(),
        )
    })?;
    let image = preprocess(&raw, &cfg.preprocess, cfg.scenario.noise_sigma, noise_seed)?;
    quantize_f32(image)
}
