use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] framelab_core::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl AppError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        AppError::Invalid(msg.into())
    }

    /// 1 validation error, 2 numerical refusal, 3 I/O error.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Core(e) if e.is_numerical_refusal() => 2,
            AppError::Core(_) | AppError::Invalid(_) | AppError::Parse { .. } => 1,
            AppError::Io { .. } | AppError::Csv(_) => 3,
        }
    }
}

pub type Result<T, E = AppError> = std::result::Result<T, E>;
