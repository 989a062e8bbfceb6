use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// No crossing of the size-indexed spanning curves inside the scanned grid.
    /// The curves are kept as a formatted table so the caller can inspect them.
    #[error("no threshold crossing within the grid\n{curves}")]
    NoCrossing { curves: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("too many vertices for exact evaluation: {got} > {max}")]
    TooLarge { got: usize, max: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("malformed input {path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
