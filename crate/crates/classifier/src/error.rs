use thiserror::Error;

#[derive(Error, Debug)]
pub enum ClassifierError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("training diverged at epoch {epoch}: {message}")]
    Training { epoch: usize, message: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt checkpoint at byte {offset}: {message}")]
    Corrupt { offset: u64, message: String },
}

pub type ClassifierResult<T> = Result<T, ClassifierError>;
