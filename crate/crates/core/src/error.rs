use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The equal-weight solver exhausted its node budget. `best_residual` is
    /// the smallest max-abs residual seen across all attempts.
    #[error(
        "no equal-weight quadrature found for weight (m={m}, n={n}) at degree {degree} \
         with K <= {max_k}; best residual {best_residual:e}"
    )]
    NoConvergence {
        m: u32,
        n: u32,
        degree: u32,
        max_k: usize,
        best_residual: f64,
        best: Option<Box<crate::quadrature::Quadrature>>,
    },

    #[error("quadrature for weight (m={m}, n={n}) at degree {degree} is not certified")]
    UncertifiedQuadrature { m: u32, n: u32, degree: u32 },

    #[error(
        "build failed at node {node}: verification residual {residual:e} exceeds tolerance {tolerance:e}"
    )]
    BuildFailed {
        node: String,
        residual: f64,
        tolerance: f64,
        report: Option<Box<crate::construct::BuildReport>>,
    },

    #[error("parse error in {source_name} at line {line}, column {column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
