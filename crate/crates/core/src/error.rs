use thiserror::Error;

/// Error type shared by every module of the solver.
#[derive(Debug, Clone, Error)]
pub enum SolverError {
    #[error("density must be positive, got {0}")]
    NonPositiveDensity(f64),

    #[error("pressure value {q} is below the range of the law (infimum {infimum})")]
    OutOfRange { q: f64, infimum: f64 },

    #[error("vacuum encountered: pressure argument {q} out of range at y = {y}")]
    VacuumEncountered { q: f64, y: f64 },

    #[error("time {tau} exceeds the integration horizon {horizon}")]
    HorizonExceeded { tau: f64, horizon: f64 },

    #[error("root bracket failed at (y = {y}, tau = {tau}); characteristics may have crossed")]
    BracketFailure { y: f64, tau: f64 },

    #[error("velocity gradient blow-up reached near tau = {tau}")]
    BlowupReached { tau: f64 },

    #[error("point {x} outside the working window [{lo}, {hi}]")]
    OutsideWindow { x: f64, lo: f64, hi: f64 },

    #[error("degenerate rate fit: {0}")]
    DegenerateFit(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("scenario rejected: {0}")]
    ScenarioRejected(String),
}

pub type Result<T> = std::result::Result<T, SolverError>;
