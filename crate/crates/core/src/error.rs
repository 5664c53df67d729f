use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the calculators, the field I/O and the discrete solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at sample {sample}, flat index {flat_index} ({part} part)")]
    NonFinite {
        sample: usize,
        flat_index: usize,
        part: &'static str,
    },

    #[error("malformed field file: {0}")]
    Format(String),

    #[error("cannot read or write `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("field is not elliptic (lambda = {lambda:e})")]
    NotElliptic { lambda: f64 },

    #[error("operation requires a torus-sampled field")]
    NotTorus,

    #[error("{solver} did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("Neumann series diverged at iteration {iteration} (increment ratio {ratio:e})")]
    SeriesDivergence { iteration: usize, ratio: f64 },

    #[error("no root bracket: {0}")]
    NoBracket(String),

    #[error("{0} is not applicable: {1}")]
    NotApplicable(&'static str, String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
