use specklenet_optics::OpticsError;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ScenarioError {
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error("invalid scenario configuration: {0}")]
    InvalidConfig(String),
    #[error("provenance mismatch: {0}")]
    ProvenanceMismatch(String),
}

pub type ScenarioResult<T> = Result<T, ScenarioError>;
