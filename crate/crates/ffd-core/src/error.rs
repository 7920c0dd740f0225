use std::path::PathBuf;

/// Errors produced by graph I/O, feature construction, and training.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Filesystem failure while reading or writing an artifact.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A text artifact (edge list, feature matrix, ...) is malformed.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// A JSON artifact could not be encoded or decoded.
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    /// Caller supplied inconsistent arguments (dimension mismatch, empty
    /// graph where edges are required, out-of-range hyperparameters, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A checkpoint file exists but does not describe a loadable model.
    #[error("checkpoint: {0}")]
    Checkpoint(String),

    /// A simulation contradicted a closed-form prediction it is required to
    /// confirm (signals an implementation or derivation bug).
    #[error("theorem validation: {0}")]
    Theorem(String),

    /// A numeric computation left the finite range (training divergence,
    /// overflowing activations).
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }
}
