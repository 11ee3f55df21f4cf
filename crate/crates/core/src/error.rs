use thiserror::Error;

/// Errors raised anywhere in the detection pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series needs at least 2 observations, got {0}")]
    EmptyInput(usize),
    #[error("grid size must be even and at least 16, got {0}")]
    InvalidGridSize(usize),
    #[error("invalid band restriction [{lo}, {hi}]: {reason}")]
    InvalidBand { lo: f64, hi: f64, reason: String },
    #[error("segment ({a}, {b}] is not a valid range for a series of length {n}")]
    BadRange { a: usize, b: usize, n: usize },
    #[error("segment ({a}, {b}] has an identically zero spectrum")]
    ZeroSegment { a: usize, b: usize },
    #[error("spectral estimate has zero mass")]
    ZeroMass,
    #[error("reference spectrum vanishes at grid point {index} where the first spectrum is positive")]
    SupportMismatch { index: usize },
    #[error("spectral estimates live on different frequency grids")]
    GridMismatch,
    #[error("no admissible segmentation with {k} change points (n = {n}, min length {ml})")]
    Infeasible { k: usize, n: usize, ml: usize },
    #[error("screening window {window} is too small (needs at least {required})")]
    WindowTooSmall { window: usize, required: usize },
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("AR polynomial {0:?} has a root on or inside the unit circle")]
    NonCausalAr(Vec<f64>),
    #[error("unknown simulation case {0} (expected 1..=4)")]
    UnknownCase(u32),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{failed} of {reps} replicates failed, more than the 1% allowance; first failure: {first}")]
    TooManyFailures {
        failed: usize,
        reps: usize,
        first: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
