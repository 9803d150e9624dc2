use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("chi^{s} norm with s < 0 requires a mean-free field")]
    NonzeroMean { s: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("trajectory is empty or too short: {0}")]
    EmptyTrajectory(String),

    #[error("exponent s = {0} is not tracked by this trajectory")]
    UntrackedExponent(f64),

    #[error("radial integral diverges (tail did not shrink past r = {radius})")]
    DivergentIntegral { radius: f64 },

    #[error("non-finite value encountered; last valid time t = {last_valid_time}")]
    NonFinite { last_valid_time: f64 },

    #[error(
        "blow-up guard tripped: integral {integral} exceeded {guard} after t = {last_valid_time}"
    )]
    BlowupGuardTripped {
        last_valid_time: f64,
        integral: f64,
        guard: f64,
    },

    #[error("time step {dt} exceeds the advective stability bound {bound}")]
    UnstableTimeStep { dt: f64, bound: f64 },

    #[error("Picard iteration is not contracting (distances {distances:?})")]
    NotContracting { distances: Vec<f64> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
