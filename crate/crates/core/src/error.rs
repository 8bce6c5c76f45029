use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid vehicle parameters: {0}")]
    InvalidParams(String),
    #[error("wind magnitude {wind} must be below the minimum speed {v_min}")]
    WindTooStrong { wind: f64, v_min: f64 },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("no candidate maneuver converged for transition {0}")]
    OracleFailed(String),
    #[error("scenario generation gave up after {attempts} attempts (seed {seed})")]
    GenerationFailed { seed: u64, attempts: usize },
    #[error("bound {0} needs an occupancy map")]
    MissingMap(&'static str),
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
