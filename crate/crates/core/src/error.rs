use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// A constructor's mathematical hypothesis does not hold for the input.
    #[error("hypothesis violation: {clause}")]
    HypothesisViolation { clause: String },
    /// A recomputed certificate disagreed with the construction; this is a bug.
    #[error("internal verification failure: {0}")]
    InternalVerification(String),
    #[error("degree {degree} exceeds cap {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A square class carries an unfactored cofactor, so its F₂ vector is unknown.
    #[error("square class at index {index} has an unfactored cofactor")]
    UncertainClass { index: usize },
    #[error("not found: {0}")]
    NotFound(String),
    #[error("pole at specialization point")]
    Pole,
    #[error("zero element has no valuation")]
    ZeroValuation,
}

impl Error {
    pub(crate) fn hypothesis(clause: impl Into<String>) -> Self {
        Error::HypothesisViolation {
            clause: clause.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
