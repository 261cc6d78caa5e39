use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("rules file line {line}: {message}")]
    Rules { line: usize, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("matrix is empty after pruning")]
    EmptyMatrix,

    #[error("matrix has an all-zero {axis} at index {index}; prune before clustering")]
    ZeroLine { axis: &'static str, index: usize },

    #[error("truncated SVD did not converge after {iterations} iterations (max residual {residual:.3e}, tolerance {tolerance:.3e})")]
    SvdNotConverged {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("no pairable values in reliability table")]
    NoPairableValues,

    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),

    #[error("label for unknown item `{0}`")]
    UnknownItem(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
