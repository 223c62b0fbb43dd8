use thiserror::Error;

/// Errors produced while building or querying a construction.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("value exceeds build budget: {0}")]
    Budget(String),
    #[error("horizon exhausted: {0}")]
    HorizonExhausted(String),
    #[error("feasibility failure at level {level}: need {need} words but only {available} are available")]
    Infeasible {
        level: usize,
        need: String,
        available: String,
    },
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal assertion failed: {0}")]
    Assertion(String),
    #[error("state file is malformed: {0}")]
    Format(String),
    #[error("state file checksum mismatch")]
    Checksum,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that mean "this instance is too large for the configured limits".
    pub fn is_capacity(&self) -> bool {
        matches!(
            self,
            Error::Capacity(_) | Error::Budget(_) | Error::HorizonExhausted(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
