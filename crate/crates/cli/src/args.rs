//! Command-line argument definitions.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use specklenet_scenario::ScenarioKind;

fn parse_scenario_kind(s: &str) -> Result<ScenarioKind, specklenet_scenario::ScenarioError> {
    ScenarioKind::parse(s)
}

/// Speckle-based non-line-of-sight digit recognition toolkit.
#[derive(Debug, Parser)]
#[command(name = "specklenet", version, about)]
pub struct Cli {
    /// Config file (flat `key = value` under `[section]` headers).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Master seed; derives every stage seed deterministically.
    #[arg(long, global = true, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Output path of the command's primary artifact.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Chattier progress logging on stderr.
    #[arg(long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate speckle records from source digits and write a
    /// dataset container.
    Generate {
        /// Scattering geometry: one-wall, same-side, rotating-wall,
        /// or two-walls.
        #[arg(long, value_parser = parse_scenario_kind)]
        scenario: Option<ScenarioKind>,
        /// Number of source digits to render.
        #[arg(long)]
        count: Option<usize>,
    },
    /// Split a dataset, train the classifier, and write a checkpoint
    /// plus a JSON-lines log.
    Train {
        /// Dataset container to train on.
        #[arg(long, value_name = "PATH")]
        dataset: Option<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        batch_size: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long, value_enum)]
        optimizer: Option<OptimizerArg>,
    },
    /// Evaluate a checkpoint on a dataset split and write a JSON
    /// report.
    Eval {
        /// Checkpoint to evaluate.
        #[arg(long, value_name = "PATH")]
        checkpoint: Option<PathBuf>,
        /// Dataset container to evaluate on.
        #[arg(long, value_name = "PATH")]
        dataset: Option<PathBuf>,
        /// Which side of the train/test split to score.
        #[arg(long, value_enum, default_value_t = SplitArg::Test)]
        split: SplitArg,
    },
    /// First-order speckle statistics of a dataset or a single image.
    Stats {
        /// Dataset container to analyze.
        #[arg(long, value_name = "PATH")]
        dataset: Option<PathBuf>,
        /// Analyze a grayscale image file instead of a dataset.
        #[arg(long, value_name = "PATH", conflicts_with_all = ["dataset", "record"])]
        image: Option<PathBuf>,
        /// Restrict the analysis to one record.
        #[arg(long)]
        record: Option<usize>,
    },
    /// Render a dataset record or image file as 8-bit grayscale.
    Render {
        /// Dataset container to read from.
        #[arg(long, value_name = "PATH")]
        dataset: Option<PathBuf>,
        /// Record index to render.
        #[arg(long)]
        record: Option<usize>,
        /// Render a grayscale image file instead of a record.
        #[arg(long, value_name = "PATH", conflicts_with_all = ["dataset", "record"])]
        image: Option<PathBuf>,
    },
}

/// Optimizer choice exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimizerArg {
    Adam,
    Sgd,
}

/// Which part of the split an evaluation scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitArg {
    /// Held-out test records (the default).
    Test,
    /// Training records.
    Train,
    /// Every record, without splitting.
    All,
}
