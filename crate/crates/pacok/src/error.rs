use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("fields live on different grids: {expected} vs {found}")]
    GridMismatch { expected: String, found: String },

    #[error("spectrum is not conjugate-symmetric: inverse transform left imaginary residue {max_imag:.3e}")]
    SymmetryViolation { max_imag: f64 },

    #[error("disc initial condition does not fit in the domain (omega*|Omega| = {requested_area} >= pi*min(X,Y)^2 = {max_area})")]
    DiscTooLarge { requested_area: f64, max_area: f64 },

    #[error("block ratio {ratio} does not divide the grid ({nx} x {ny})")]
    RatioMismatch { ratio: usize, nx: usize, ny: usize },

    #[error("power-law fit is degenerate: {0}")]
    DegenerateFit(String),

    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("config line {line}: bad value for `{key}`: {message}")]
    TypeError {
        line: usize,
        key: String,
        message: String,
    },

    #[error("config is missing required key(s): {0}")]
    MissingRequired(String),

    #[error("{path}: bad snapshot magic")]
    BadMagic { path: PathBuf },

    #[error("{path}: snapshot file truncated")]
    TruncatedFile { path: PathBuf },

    #[error("field contains non-finite values")]
    NonFinite,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
