use thiserror::Error;

use crate::config::ValidationReport;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration:\n{0}")]
    InvalidConfig(ValidationReport),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("no agents in the population (P = 0)")]
    EmptyPopulation,

    #[error("unsupported distribution for {field}: {reason}")]
    UnsupportedDistribution { field: &'static str, reason: String },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("target reproduction number must be positive (got {0})")]
    NonPositiveTarget(f64),

    #[error("internal inconsistency on day {day}: {message}")]
    Inconsistency { day: u32, message: String },
}
