use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input data or configuration violates a documented constraint.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("duplicate {relation} entry ({row}, {col})")]
    DuplicateEntry {
        relation: &'static str,
        row: String,
        col: String,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unknown item `{0}`")]
    UnknownItem(String),

    #[error("item `{0}` has no assessments")]
    NoAssessments(String),

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("forward cache does not match the current parameters or graph")]
    StaleCache,

    #[error("training diverged at epoch {epoch}: loss = {loss}")]
    NonFiniteLoss { epoch: usize, loss: f64 },

    #[error("{file}:{line}: {message}")]
    Csv {
        file: String,
        line: u64,
        message: String,
    },

    #[error("json error at `{pointer}`: {message}")]
    Json { pointer: String, message: String },

    #[error("unsupported schema_version {found} (expected {expected})")]
    Schema { found: String, expected: u32 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad input rather than a failure while running.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::Io { .. } | Error::NonFiniteLoss { .. } | Error::StaleCache
        )
    }
}
