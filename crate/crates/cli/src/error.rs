//! Top-level error type of the command-line surface.

use std::path::Path;

use thiserror::Error;

/// Anything a subcommand can fail with. Every variant renders as a
/// single line so `main` can print `error: {message}` and exit
/// nonzero.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration file or flag combination.
    #[error("config: {0}")]
    Config(String),

    /// Filesystem failure, annotated with the path involved.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Bad render/stats input (unsupported format, missing record, ...).
    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Optics(#[from] specklenet_optics::OpticsError),

    #[error(transparent)]
    Scenario(#[from] specklenet_scenario::ScenarioError),

    #[error(transparent)]
    Dataset(#[from] specklenet_dataset::DatasetError),

    #[error(transparent)]
    Classifier(#[from] specklenet_classifier::ClassifierError),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    /// Wrap an I/O error with the path it concerns.
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
