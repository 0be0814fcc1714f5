use thiserror::Error;

/// Errors produced by the cylinder laboratory.
#[derive(Debug, Error)]
pub enum CylError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("window [{lo}, {hi}] leaves the admissible region [{min}, {max}]")]
    OutOfWindow { lo: f64, hi: f64, min: f64, max: f64 },

    #[error("derivative order {0} is not supported (max 4)")]
    UnsupportedOrder(usize),

    #[error("point of norm {norm} lies outside the closed unit ball")]
    OutOfBall { norm: f64 },

    #[error("mode {k} is outside the band [{lo}, {hi}]")]
    Band { k: i64, lo: i64, hi: i64 },

    #[error("invalid boundary data: {0}")]
    InvalidBoundaryData(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("check inapplicable: {0}")]
    Inapplicable(String),

    #[error("fixed-point map is not a contraction: estimated factor {factor:.3} >= 0.9")]
    NoContraction { factor: f64 },

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("solution leaves the unit ball: sup|u| - 1 = {violation:e}")]
    BallViolation { violation: f64 },

    #[error("invalid vector field: {0}")]
    InvalidModel(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = CylError> = std::result::Result<T, E>;
