use thiserror::Error;

use crate::approx::ApproxResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("bad parameters for `{name}`: expected {expected}, got {got}")]
    BadParams {
        name: String,
        expected: String,
        got: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported norm p = {0} (only 1 and 2)")]
    UnsupportedNorm(u32),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("point (t = {t}, x = {x}) lies outside the trapezoidal region")]
    OutOfRegion { t: f64, x: f64 },

    #[error("degenerate scaling: strip {j} has zero envelope integral but A = {a}")]
    DegenerateScaling { j: usize, a: f64 },

    #[error("delta = {delta} outside (0, {limit}]")]
    BadDelta { delta: f64, limit: f64 },

    #[error("approximation budget exceeded: best error {:e} >= eps {:e}", .0.achieved_lp_error, .0.epsilon)]
    ApproxBudgetExceeded(Box<ApproxResult>),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}
