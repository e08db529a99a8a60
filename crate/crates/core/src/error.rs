use thiserror::Error;

use crate::solvers::RunOutput;

/// Errors raised by problem construction, solvers, diagnostics and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A non-finite value showed up. Solvers attach the trace recorded so far.
    #[error("numeric failure: {message}")]
    NumericFailure {
        message: String,
        partial: Option<Box<RunOutput>>,
    },

    #[error("noise schedule is not square-summable: {0}")]
    NotSummable(String),

    /// The problem broke one of its modelling assumptions mid-run
    /// (e.g. a nonpositive reweighting weight).
    #[error("model violation: {0}")]
    ModelViolation(String),

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn numeric(message: impl Into<String>) -> Self {
        Error::NumericFailure {
            message: message.into(),
            partial: None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
