use thiserror::Error;

/// Errors raised by the computational modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cannot normalize trajectory: {0}")]
    CannotNormalize(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("fit diverged: non-finite objective at parameters {params:?}")]
    FitDiverged { params: Vec<f64> },
}

pub type Result<T> = std::result::Result<T, Error>;
