//! Command-line surface of the speckle-recognition toolkit.
//!
//! Ties the pipeline together: `generate` simulates speckle datasets
//! from source digits, `train` fits the classifier, `eval` scores a
//! checkpoint, `stats` reports first-order speckle statistics, and
//! `render` writes grayscale images. Every command is driven by one
//! [`RunConfig`] resolved with strict precedence: command-line flags
//! over config-file values over built-in defaults. All randomness is
//! seeded, so any command rerun with the same inputs reproduces its
//! outputs bit for bit.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod imageio;
pub mod report;
pub mod samples;

pub use args::{Cli, Command, OptimizerArg, SplitArg};
pub use config::RunConfig;
pub use error::{CliError, CliResult};

use specklenet_classifier::OptimizerKind;

/// Resolve the configuration and dispatch one parsed invocation.
pub fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(master) = cli.seed {
        cfg.derive_seeds(master);
    }

    match cli.command {
        Command::Generate { scenario, count } => {
            if let Some(kind) = scenario {
                cfg.set_kind(kind);
            }
            if let Some(count) = count {
                cfg.count = count;
            }
            if let Some(out) = cli.out {
                cfg.dataset_path = out;
            }
            commands::cmd_generate(&cfg)
        }
        Command::Train {
            dataset,
            epochs,
            batch_size,
            learning_rate,
            optimizer,
        } => {
            if let Some(path) = dataset {
                cfg.dataset_path = path;
            }
            if let Some(epochs) = epochs {
                cfg.train.epochs = epochs;
            }
            if let Some(batch_size) = batch_size {
                cfg.train.batch_size = batch_size;
            }
            if let Some(lr) = learning_rate {
                cfg.train.learning_rate = lr;
            }
            if let Some(optimizer) = optimizer {
                cfg.train.optimizer = match optimizer {
                    OptimizerArg::Adam => OptimizerKind::Adam,
                    OptimizerArg::Sgd => OptimizerKind::Sgd,
                };
            }
            if let Some(out) = cli.out {
                cfg.checkpoint_path = out;
            }
            commands::cmd_train(&cfg)
        }
        Command::Eval {
            checkpoint,
            dataset,
            split,
        } => {
            if let Some(path) = checkpoint {
                cfg.checkpoint_path = path;
            }
            if let Some(path) = dataset {
                cfg.dataset_path = path;
            }
            if let Some(out) = cli.out {
                cfg.report_path = out;
            }
            commands::cmd_eval(&cfg, split)
        }
        Command::Stats {
            dataset,
            image,
            record,
        } => {
            if let Some(path) = dataset {
                cfg.dataset_path = path;
            }
            commands::cmd_stats(&cfg, image, record, cli.out)
        }
        Command::Render {
            dataset,
            record,
            image,
        } => {
            if let Some(path) = dataset {
                cfg.dataset_path = path;
            }
            commands::cmd_render(&cfg, record, image, cli.out)
        }
    }
}
