use specklenet_optics::OpticsError;
use specklenet_scenario::ScenarioError;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum DatasetError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: u64, message: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("record {index}: {source}")]
    Record {
        index: usize,
        source: Box<DatasetError>,
    },
}

impl DatasetError {
    pub(crate) fn at_record(self, index: usize) -> Self {
        DatasetError::Record {
            index,
            source: Box::new(self),
        }
    }
}

pub type DatasetResult<T> = Result<T, DatasetError>;
