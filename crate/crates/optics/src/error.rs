//! Error type shared by all wave-optics operations.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum OpticsError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("grid mismatch: expected {expected:?} (ny, nx), got {actual:?}")]
    GridMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("zero-intensity image: contrast undefined")]
    ZeroIntensity,
}

pub type OpticsResult<T> = Result<T, OpticsError>;
