use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("sample batch is empty")]
    EmptyBatch,

    #[error("invalid risk level alpha = {0}: must lie in (0, 1)")]
    InvalidAlpha(f64),

    #[error("invalid risk specification: {0}")]
    InvalidRiskSpec(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid transition model: {0}")]
    InvalidModel(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid learning configuration: {0}")]
    InvalidLearningConfig(String),

    #[error("operator iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    ContractionViolation { iterations: usize, residual: f64 },

    #[error("config key `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("failed to parse config: {0}")]
    ConfigSyntax(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: malformed table: {reason}")]
    MalformedTable { path: PathBuf, reason: String },

    #[error("json serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by bad user input rather than by the runtime.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::ContractionViolation { .. } | Error::Io { .. } | Error::Csv { .. } | Error::Json(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
