use thiserror::Error;

/// Errors produced by the analysis toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("fidelity {0} lies outside [0, 1]")]
    InvalidFidelity(f64),

    #[error("parameter `{name}` = {value} is out of range: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("purification cannot raise fidelity at this noise level (no valid range)")]
    NoValidRange,

    #[error("fidelity degenerated to {fidelity} at level {level}; the pair is maximally mixed")]
    DegenerateFidelity { level: u32, fidelity: f64 },

    #[error("resource count (L*M)^n overflows u64")]
    Overflow,

    #[error("scaling fit needs at least {required} points in the window, found {found}")]
    InsufficientPoints { found: usize, required: usize },

    #[error("swap cohort has unequal fidelities ({0} vs {1}); the closed form assumes equal inputs")]
    UnequalCohort(f64, f64),

    #[error("density matrix invariant violated: {0}")]
    InvalidState(String),

    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
