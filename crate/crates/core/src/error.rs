use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unknown emotion label `{0}`")]
    UnknownLabel(String),

    #[error("label `{label}` is not in the active label set [{active}]")]
    LabelNotActive { label: String, active: String },

    #[error("unknown intensity `{0}` (expected high, medium or low)")]
    UnknownIntensity(String),

    #[error("parallel corpus line counts differ: source has {source_lines}, target has {target_lines}")]
    LineCountMismatch {
        source_lines: usize,
        target_lines: usize,
    },

    #[error("document `{0}` has no soft probabilities")]
    MissingSoftProbs(String),

    #[error("cannot merge corpora: {0}")]
    Incompatible(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("word `{0}` is not in the vocabulary")]
    OutOfVocabulary(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// True for failures caused by arithmetic (non-finite loss, singular input)
    /// rather than by bad input data.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric(_))
    }
}
