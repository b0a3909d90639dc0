use std::path::PathBuf;

use quasilorentz_core::Error as CoreError;

pub type AppResult<T> = std::result::Result<T, AppError>;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("resource error: {0}")]
    Resource(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed file: {reason}")]
    Format { path: PathBuf, reason: String },
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    /// Process exit status: 2 for configuration errors, 3 for resource and
    /// I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Core(e) => match e {
                CoreError::Resource(_) => 3,
                _ => 2,
            },
            AppError::Resource(_) | AppError::Io { .. } | AppError::Format { .. } => 3,
        }
    }
}
