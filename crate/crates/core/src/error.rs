use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by oracles, solvers and file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("item {item} is outside the ground set of {n} items")]
    ItemOutOfRange { item: usize, n: usize },

    #[error("item {item} is already in the set")]
    AlreadyInSet { item: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("objective is undefined on the full ground set")]
    FullSetUndefined,

    #[error("ill-conditioned covariance: pivot {pivot:e} on submatrix {subset:?}")]
    IllConditioned { subset: Vec<usize>, pivot: f64 },

    #[error("{what} of size {size} exceeds the limit of {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("graph is disconnected: vertex {vertex} is unreachable from the root")]
    Disconnected { vertex: usize },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
