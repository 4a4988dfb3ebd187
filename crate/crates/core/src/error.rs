use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{stream}: line {line}: {message}")]
    Parse {
        stream: &'static str,
        line: usize,
        message: String,
    },

    #[error("{stream}: duplicate id `{id}` at line {line}")]
    DuplicateId {
        stream: &'static str,
        id: String,
        line: usize,
    },

    #[error("{kind} `{id}` not found")]
    NotFound { kind: &'static str, id: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("paper `{paper}` has no citing papers in [{start}, {end}]")]
    EmptyWindow { paper: String, start: i32, end: i32 },

    #[error("window end {requested} is beyond the corpus horizon {horizon}")]
    Horizon { requested: i32, horizon: i32 },

    #[error("did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("matrix factorization failed: {0}")]
    Factorization(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("snapshot format error: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn not_found(kind: &'static str, id: impl Into<String>) -> Self {
        Error::NotFound {
            kind,
            id: id.into(),
        }
    }
}
