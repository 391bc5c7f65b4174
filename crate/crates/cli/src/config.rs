//! Run configuration: defaults, config-file parsing, flag overrides.
//!
//! Precedence is strictly `flags > file > defaults`. The file format
//! is flat UTF-8 `key = value` text under `[section]` headers (`#`/`;`
//! start comments). Unknown sections or keys are errors, so typos
//! fail loudly instead of silently running the defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use configparser::ini::Ini;
use specklenet_classifier::{OptimizerKind, TrainConfig};
use specklenet_dataset::{CropAnchor, GenerationConfig, PreprocessConfig};
use specklenet_optics::seed::mix_seed;
use specklenet_optics::{DetectionModel, GridSpec};
use specklenet_scenario::{ScenarioConfig, ScenarioKind};

use crate::error::{CliError, CliResult};

/// Everything a run needs, resolved from defaults, an optional config
/// file, and command-line flags (in that order of increasing
/// precedence). Every field has a sensible default, so an empty
/// invocation is runnable as-is.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Scattering geometry (includes the simulation grid).
    pub scenario: ScenarioConfig,
    /// Threshold used to binarize source digits.
    pub binarize_threshold: f64,
    /// Side of the square detector crop fed to the classifier.
    pub crop_size: usize,
    /// Number of source digits to turn into records.
    pub count: usize,
    /// Base seed of the per-record detector-noise streams.
    pub generation_seed: u64,
    /// Fraction of records assigned to the training side of the split.
    pub train_ratio: f64,
    /// Seed of the train/test shuffle.
    pub split_seed: u64,
    /// Optimization schedule.
    pub train: TrainConfig,
    /// Source digit images (IDX format).
    pub mnist_images: PathBuf,
    /// Source digit labels (IDX format).
    pub mnist_labels: PathBuf,
    /// Dataset container file (written by `generate`, read elsewhere).
    pub dataset_path: PathBuf,
    /// Checkpoint file (written by `train`, read by `eval`).
    pub checkpoint_path: PathBuf,
    /// JSON-lines training log.
    pub log_path: PathBuf,
    /// JSON evaluation report.
    pub report_path: PathBuf,
}

impl Default for RunConfig {
    /// Desk-scale defaults: 256x256 grid at 25 um pitch under HeNe
    /// illumination, 64x64 center crops, 2,000 records, 95/5 split.
    /// The pitch keeps the default 0.20 m legs inside the alias-free
    /// propagation bound (`n * pitch^2 / wavelength` = 0.25 m).
    fn default() -> Self {
        let grid = GridSpec::new(256, 256, 25e-6, 632.8e-9)
            .expect("default grid parameters are valid");
        Self {
            scenario: ScenarioConfig::new(ScenarioKind::OneWall, grid),
            binarize_threshold: 0.5,
            crop_size: 64,
            count: 2000,
            generation_seed: 0,
            train_ratio: 0.95,
            split_seed: 0,
            train: TrainConfig::default(),
            mnist_images: PathBuf::from("data/train-images-idx3-ubyte"),
            mnist_labels: PathBuf::from("data/train-labels-idx1-ubyte"),
            dataset_path: PathBuf::from("dataset.spkl"),
            checkpoint_path: PathBuf::from("model.snet"),
            log_path: PathBuf::from("training.jsonl"),
            report_path: PathBuf::from("report.json"),
        }
    }
}

/// Flattened `(section, key) -> value` view of a parsed config file,
/// ordered so diagnostics are deterministic.
type KeyMap = BTreeMap<(String, String), String>;

fn take(map: &mut KeyMap, section: &str, key: &str) -> Option<String> {
    map.remove(&(section.to_string(), key.to_string()))
}

fn parse_value<T: FromStr>(section: &str, key: &str, raw: &str) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    raw.trim().parse().map_err(|e| {
        CliError::Config(format!("invalid value for {section}.{key}: {raw:?} ({e})"))
    })
}

fn parse_optional<T: FromStr>(section: &str, key: &str, raw: &str) -> CliResult<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if raw.trim().eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        parse_value(section, key, raw).map(Some)
    }
}

fn parse_detection(section: &str, key: &str, raw: &str) -> CliResult<DetectionModel> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "modulus-squared" => Ok(DetectionModel::ModulusSquared),
        "real-part-squared" => Ok(DetectionModel::RealPartSquared),
        other => Err(CliError::Config(format!(
            "invalid value for {section}.{key}: {other:?} \
             (expected modulus-squared or real-part-squared)"
        ))),
    }
}

fn parse_optimizer(section: &str, key: &str, raw: &str) -> CliResult<OptimizerKind> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "adam" => Ok(OptimizerKind::Adam),
        "sgd" => Ok(OptimizerKind::Sgd),
        other => Err(CliError::Config(format!(
            "invalid value for {section}.{key}: {other:?} (expected adam or sgd)"
        ))),
    }
}

macro_rules! set_field {
    ($map:expr, $section:literal, $key:literal, $target:expr) => {
        if let Some(raw) = take($map, $section, $key) {
            $target = parse_value($section, $key, &raw)?;
        }
    };
}

impl RunConfig {
    /// Defaults, then file values if a path is given.
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let mut cfg = Self::default();
        if let Some(path) = path {
            cfg.apply_file(path)?;
        }
        Ok(cfg)
    }

    /// Overlay every `key = value` from a config file onto `self`.
    pub fn apply_file(&mut self, path: &Path) -> CliResult<()> {
        let mut ini = Ini::new_cs();
        let parsed = ini
            .load(path)
            .map_err(|m| CliError::Config(format!("{}: {m}", path.display())))?;

        let mut map: KeyMap = BTreeMap::new();
        for (section, keys) in parsed {
            for (key, value) in keys {
                let value = value.ok_or_else(|| {
                    CliError::Config(format!("missing value for {section}.{key}"))
                })?;
                map.insert((section.clone(), key), value);
            }
        }

        // The grid and the scenario kind come first: grid-dependent
        // defaults (object size, patch placement) must be recomputed
        // before the remaining scenario keys are overlaid.
        let (mut nx, mut ny) = {
            let (ny, nx) = self.scenario.grid.shape();
            (nx, ny)
        };
        let mut pitch = self.scenario.grid.pitch();
        let mut wavelength = self.scenario.grid.wavelength();
        set_field!(&mut map, "grid", "nx", nx);
        set_field!(&mut map, "grid", "ny", ny);
        set_field!(&mut map, "grid", "pitch", pitch);
        set_field!(&mut map, "grid", "wavelength", wavelength);

        let mut kind = self.scenario.kind;
        if let Some(raw) = take(&mut map, "scenario", "kind") {
            kind = ScenarioKind::parse(&raw).map_err(CliError::Scenario)?;
        }
        let grid = GridSpec::new(nx, ny, pitch, wavelength)?;
        self.scenario = ScenarioConfig::new(kind, grid);

        let sc = &mut self.scenario;
        set_field!(&mut map, "scenario", "d_object_wall", sc.d_object_wall);
        set_field!(&mut map, "scenario", "d_wall_camera", sc.d_wall_camera);
        set_field!(&mut map, "scenario", "d_wall_wall", sc.d_wall_wall);
        set_field!(&mut map, "scenario", "d_source_wall", sc.d_source_wall);
        set_field!(&mut map, "scenario", "source_x", sc.source_position.0);
        set_field!(&mut map, "scenario", "source_y", sc.source_position.1);
        set_field!(&mut map, "scenario", "source_z", sc.source_position.2);
        set_field!(&mut map, "scenario", "object_size", sc.object_size);
        set_field!(&mut map, "scenario", "wall_seed", sc.wall_seed);
        if let Some(raw) = take(&mut map, "scenario", "wall_seed_2") {
            sc.wall_seed_2 = parse_optional("scenario", "wall_seed_2", &raw)?;
        }
        set_field!(
            &mut map,
            "scenario",
            "illumination_row",
            sc.illumination_offset.0
        );
        set_field!(
            &mut map,
            "scenario",
            "illumination_col",
            sc.illumination_offset.1
        );
        set_field!(
            &mut map,
            "scenario",
            "observation_row",
            sc.observation_offset.0
        );
        set_field!(
            &mut map,
            "scenario",
            "observation_col",
            sc.observation_offset.1
        );
        set_field!(&mut map, "scenario", "wall_facet_size", sc.wall_facet_size);
        set_field!(
            &mut map,
            "scenario",
            "lens_magnification",
            sc.lens_magnification
        );
        if let Some(raw) = take(&mut map, "scenario", "aperture_na") {
            sc.aperture_na = parse_optional("scenario", "aperture_na", &raw)?;
        }
        if let Some(raw) = take(&mut map, "scenario", "detection") {
            sc.detection = parse_detection("scenario", "detection", &raw)?;
        }
        set_field!(&mut map, "scenario", "noise_sigma", sc.noise_sigma);

        set_field!(&mut map, "dataset", "count", self.count);
        set_field!(&mut map, "dataset", "seed", self.generation_seed);
        set_field!(
            &mut map,
            "dataset",
            "binarize_threshold",
            self.binarize_threshold
        );
        set_field!(&mut map, "dataset", "crop_size", self.crop_size);
        set_field!(&mut map, "dataset", "train_ratio", self.train_ratio);
        set_field!(&mut map, "dataset", "split_seed", self.split_seed);

        set_field!(&mut map, "train", "batch_size", self.train.batch_size);
        set_field!(&mut map, "train", "epochs", self.train.epochs);
        set_field!(
            &mut map,
            "train",
            "learning_rate",
            self.train.learning_rate
        );
        if let Some(raw) = take(&mut map, "train", "optimizer") {
            self.train.optimizer = parse_optimizer("train", "optimizer", &raw)?;
        }
        set_field!(&mut map, "train", "init_seed", self.train.init_seed);
        set_field!(&mut map, "train", "shuffle_seed", self.train.shuffle_seed);

        set_field!(&mut map, "paths", "mnist_images", self.mnist_images);
        set_field!(&mut map, "paths", "mnist_labels", self.mnist_labels);
        set_field!(&mut map, "paths", "dataset", self.dataset_path);
        set_field!(&mut map, "paths", "checkpoint", self.checkpoint_path);
        set_field!(&mut map, "paths", "log", self.log_path);
        set_field!(&mut map, "paths", "report", self.report_path);

        if let Some(((section, key), _)) = map.iter().next() {
            return Err(CliError::Config(format!(
                "unknown key {section}.{key} in {}",
                path.display()
            )));
        }
        Ok(())
    }

    /// Derive every stage seed from one master seed (the global
    /// `--seed` flag). Distinct mix indices keep the streams
    /// independent; the second wall seed is only filled in where one
    /// is in use.
    pub fn derive_seeds(&mut self, master: u64) {
        self.scenario.wall_seed = mix_seed(master, 1);
        if self.scenario.wall_seed_2.is_some() {
            self.scenario.wall_seed_2 = Some(mix_seed(master, 2));
        }
        self.generation_seed = mix_seed(master, 3);
        self.train.init_seed = mix_seed(master, 4);
        self.train.shuffle_seed = mix_seed(master, 5);
        self.split_seed = mix_seed(master, 6);
    }

    /// Switch the scenario kind, preserving every other setting. A
    /// second wall seed is filled in if the new kind needs one.
    pub fn set_kind(&mut self, kind: ScenarioKind) {
        self.scenario.kind = kind;
        if kind == ScenarioKind::TwoWalls && self.scenario.wall_seed_2.is_none() {
            self.scenario.wall_seed_2 = Some(1);
        }
    }

    /// Preprocessing chain implied by this config (center crops).
    pub fn preprocess(&self) -> PreprocessConfig {
        PreprocessConfig {
            crop_size: self.crop_size,
            crop_anchor: CropAnchor::Center,
        }
    }

    /// Dataset-generation bundle implied by this config.
    pub fn generation(&self) -> GenerationConfig {
        GenerationConfig {
            scenario: self.scenario.clone(),
            preprocess: self.preprocess(),
            binarize_threshold: self.binarize_threshold,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(contents: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        (dir, path)
    }

    #[test]
    fn defaults_are_runnable_desk_scale() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.scenario.grid.shape(), (256, 256));
        assert_eq!(cfg.scenario.kind, ScenarioKind::OneWall);
        assert_eq!(cfg.crop_size, 64);
        assert_eq!(cfg.count, 2000);
        assert_eq!(cfg.train_ratio, 0.95);
        assert_eq!(cfg.train.epochs, 10);
        cfg.scenario.validate().unwrap();
    }

    #[test]
    fn file_values_override_defaults() {
        let (_dir, path) = write_config(
            "[grid]\n\
             nx = 32\n\
             ny = 32\n\
             pitch = 2e-5\n\
             # comment line\n\
             [scenario]\n\
             kind = two-walls\n\
             noise_sigma = 0.01\n\
             [dataset]\n\
             count = 40\n\
             crop_size = 16\n\
             [train]\n\
             epochs = 3\n\
             optimizer = sgd\n\
             [paths]\n\
             dataset = out/tiny.spkl\n",
        );
        let cfg = RunConfig::load(Some(&path)).unwrap();
        assert_eq!(cfg.scenario.grid.shape(), (32, 32));
        assert_eq!(cfg.scenario.grid.pitch(), 2e-5);
        assert_eq!(cfg.scenario.kind, ScenarioKind::TwoWalls);
        assert_eq!(cfg.scenario.wall_seed_2, Some(1));
        assert_eq!(cfg.scenario.noise_sigma, 0.01);
        assert_eq!(cfg.count, 40);
        assert_eq!(cfg.crop_size, 16);
        assert_eq!(cfg.train.epochs, 3);
        assert_eq!(cfg.train.optimizer, OptimizerKind::Sgd);
        assert_eq!(cfg.dataset_path, PathBuf::from("out/tiny.spkl"));
        // untouched keys keep their defaults
        assert_eq!(cfg.train.batch_size, 32);
        assert_eq!(cfg.train_ratio, 0.95);
    }

    #[test]
    fn grid_dependent_defaults_follow_the_file_grid() {
        let (_dir, path) = write_config("[grid]\nnx = 64\nny = 64\n");
        let cfg = RunConfig::load(Some(&path)).unwrap();
        // object spans half the (new) grid side unless set explicitly
        assert!((cfg.scenario.object_size - 0.5 * 64.0 * 25e-6).abs() < 1e-12);
        assert_eq!(cfg.scenario.observation_offset, (32, 32));
    }

    #[test]
    fn explicit_object_size_beats_the_grid_default() {
        let (_dir, path) =
            write_config("[grid]\nnx = 64\nny = 64\n[scenario]\nobject_size = 1e-4\n");
        let cfg = RunConfig::load(Some(&path)).unwrap();
        assert_eq!(cfg.scenario.object_size, 1e-4);
    }

    #[test]
    fn unknown_key_is_an_error() {
        let (_dir, path) = write_config("[grid]\nnx = 32\nnxx = 9\n");
        let err = RunConfig::load(Some(&path)).unwrap_err();
        assert!(err.to_string().contains("unknown key grid.nxx"), "{err}");
    }

    #[test]
    fn unknown_section_is_an_error() {
        let (_dir, path) = write_config("[gird]\nnx = 32\n");
        let err = RunConfig::load(Some(&path)).unwrap_err();
        assert!(err.to_string().contains("unknown key gird.nx"), "{err}");
    }

    #[test]
    fn bad_value_names_the_key() {
        let (_dir, path) = write_config("[train]\nepochs = many\n");
        let err = RunConfig::load(Some(&path)).unwrap_err();
        assert!(
            err.to_string().contains("invalid value for train.epochs"),
            "{err}"
        );
    }

    #[test]
    fn bad_scenario_kind_is_an_error() {
        let (_dir, path) = write_config("[scenario]\nkind = three-walls\n");
        let err = RunConfig::load(Some(&path)).unwrap_err();
        assert!(err.to_string().contains("three-walls"), "{err}");
    }

    #[test]
    fn optional_fields_accept_none_and_values() {
        let (_dir, path) = write_config(
            "[scenario]\nkind = two-walls\nwall_seed_2 = none\naperture_na = 0.25\n",
        );
        let cfg = RunConfig::load(Some(&path)).unwrap();
        assert_eq!(cfg.scenario.wall_seed_2, None);
        assert_eq!(cfg.scenario.aperture_na, Some(0.25));
    }

    #[test]
    fn missing_config_file_is_an_error() {
        let err = RunConfig::load(Some(Path::new("/nonexistent/run.cfg"))).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }

    #[test]
    fn master_seed_derives_distinct_stage_seeds() {
        let mut a = RunConfig::default();
        a.derive_seeds(7);
        let mut b = RunConfig::default();
        b.derive_seeds(7);
        assert_eq!(a.scenario.wall_seed, b.scenario.wall_seed);
        assert_eq!(a.generation_seed, b.generation_seed);
        assert_eq!(a.train.init_seed, b.train.init_seed);
        assert_eq!(a.train.shuffle_seed, b.train.shuffle_seed);
        assert_eq!(a.split_seed, b.split_seed);
        let seeds = [
            a.scenario.wall_seed,
            a.generation_seed,
            a.train.init_seed,
            a.train.shuffle_seed,
            a.split_seed,
        ];
        for i in 0..seeds.len() {
            for j in (i + 1)..seeds.len() {
                assert_ne!(seeds[i], seeds[j]);
            }
        }
        // one-wall config has no second wall, so none is derived
        assert_eq!(a.scenario.wall_seed_2, None);

        let mut c = RunConfig::default();
        c.set_kind(ScenarioKind::TwoWalls);
        c.derive_seeds(7);
        assert_eq!(c.scenario.wall_seed_2, Some(mix_seed(7, 2)));

        let mut d = RunConfig::default();
        d.derive_seeds(8);
        assert_ne!(a.scenario.wall_seed, d.scenario.wall_seed);
    }

    #[test]
    fn flag_style_overrides_beat_file_values() {
        // file sets epochs = 3; a later explicit assignment (what the
        // command-line layer does) must win
        let (_dir, path) = write_config("[train]\nepochs = 3\n");
        let mut cfg = RunConfig::load(Some(&path)).unwrap();
        assert_eq!(cfg.train.epochs, 3);
        cfg.train.epochs = 5;
        assert_eq!(cfg.train.epochs, 5);

        // set_kind preserves tuned fields
        let (_dir2, path2) = write_config("[scenario]\nnoise_sigma = 0.02\n");
        let mut cfg2 = RunConfig::load(Some(&path2)).unwrap();
        cfg2.set_kind(ScenarioKind::TwoWalls);
        assert_eq!(cfg2.scenario.kind, ScenarioKind::TwoWalls);
        assert_eq!(cfg2.scenario.noise_sigma, 0.02);
        assert_eq!(cfg2.scenario.wall_seed_2, Some(1));
    }
}
