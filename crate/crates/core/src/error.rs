//! Error type shared by all core modules.

use alloc::string::String;

/// Errors produced by graph construction, training, and evaluation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A caller-supplied argument violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Negative sampling cannot proceed (e.g. fewer than two distinct entities).
    #[error("sampling error: {0}")]
    Sampling(String),
    /// A metric is undefined on the given input (e.g. single-class labels).
    #[error("metric error: {0}")]
    Metric(String),
    /// Training produced non-finite parameters or otherwise diverged.
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
