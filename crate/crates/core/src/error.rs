use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("ragged row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("target column `{0}` not found")]
    MissingTarget(String),

    #[error("dataset degenerate after preprocessing: {0}")]
    Degenerate(String),

    #[error("empty bootstrap: round({rate} * {n_rows}) = 0")]
    EmptyBootstrap { rate: f64, n_rows: usize },

    #[error("non-finite input value at feature {0}")]
    NonFinite(usize),

    #[error("dimension mismatch: expected {expected} features, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("impurity of an empty node is undefined")]
    EmptyNode,

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid data: {0}")]
    InvalidData(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::InvalidData(msg.into())
    }
}
