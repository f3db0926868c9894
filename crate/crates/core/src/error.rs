use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The input violates the zero-mean admissibility condition.
    #[error("field mean {mean:e} exceeds tolerance {tolerance:e}")]
    NonZeroMean { mean: f64, tolerance: f64 },

    #[error("initial datum does not decay at the domain edges: {0}")]
    InsufficientDecay(String),

    #[error("step rejected at t = {time}: {reason}")]
    StepRejected { time: f64, reason: String },

    #[error("empty quadrature window [{a}, {b}]")]
    EmptyWindow { a: f64, b: f64 },

    #[error("grids are incommensurate: {0}")]
    IncommensurateGrids(String),

    #[error("time {time} not available in trajectory (nearest snapshot {nearest})")]
    TimeNotFound { time: f64, nearest: f64 },

    #[error("entropy is not convex: {0}")]
    NotConvex(String),

    #[error("test battery window outside trajectory support: {0}")]
    BatteryOutsideSupport(String),

    #[error("need at least {needed} runs, got {got}")]
    TooFewRuns { needed: usize, got: usize },

    #[error("snapshot format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
