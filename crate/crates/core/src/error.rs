use thiserror::Error;

/// Errors produced by the detection pipeline and its building blocks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid window: size {window} for series of length {len}")]
    InvalidWindow { window: usize, len: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("model fitting failed: {0}")]
    Fit(String),
    #[error("invalid scenario: {0}")]
    InvalidSpec(String),
}

impl Error {
    pub(crate) fn invalid_input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
