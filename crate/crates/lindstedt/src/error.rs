use thiserror::Error;

/// Errors produced by the library. Budget overruns are always explicit:
/// nothing is silently truncated.
#[derive(Debug, Error)]
pub enum Error {
    #[error("enumeration budget exceeded: {what} needs about {needed} units, limit is {limit}")]
    Budget {
        what: String,
        needed: u64,
        limit: u64,
    },

    #[error("scale table exhausted: need alpha table up to m = {needed}, built up to m = {have}")]
    ScaleBudget { needed: usize, have: usize },

    #[error("scale index {n} out of range (built up to n_max = {n_max})")]
    ScaleIndex { n: i64, n_max: usize },

    #[error("resonant frequency: omega . {nu:?} = 0 within machine precision")]
    Resonant { nu: Vec<i64> },

    #[error("near-singular matrix while inverting at x = {x:.6e} (scale {n}): |pivot| = {pivot:.3e}")]
    SingularPropagator { n: i64, x: f64, pivot: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
