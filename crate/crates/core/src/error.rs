use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("user index {index} out of range for K = {k}")]
    IndexOutOfRange { index: usize, k: usize },

    #[error("{0} is not Hermitian positive definite")]
    NotPositiveDefinite(&'static str),

    /// The filter update has no well-defined solution (e.g. an all-zero
    /// right-hand side, so no multiplier can produce positive power).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{origin}:{line}: {msg}")]
    Parse {
        origin: String,
        line: usize,
        msg: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
