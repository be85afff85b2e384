//! Application errors and their process exit codes.

use std::path::PathBuf;

/// Exit codes: 0 success, 1 usage/config error, 2 data error,
/// 3 runtime/numeric error.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Core(#[from] dualkge_core::Error),
    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl AppError {
    pub fn usage(msg: impl Into<String>) -> Self {
        AppError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        AppError::Data(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Parse { .. } | AppError::Io { .. } | AppError::Data(_) => 2,
            AppError::Json { .. } => 2,
            AppError::Core(core) => match core {
                dualkge_core::Error::InvalidArgument(_) => 1,
                dualkge_core::Error::Sampling(_) | dualkge_core::Error::Metric(_) => 2,
                dualkge_core::Error::Numeric(_) => 3,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, AppError>;
