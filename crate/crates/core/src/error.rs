use thiserror::Error;

/// Every failure mode of the library.
///
/// Variants are grouped by what the caller can do about them: fix the input,
/// accept that a mathematical precondition does not hold, raise a budget or the
/// working precision, or report a bug.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("outside certified range: {0}")]
    OutOfRange(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precision exhausted: {0} (raise the working precision)")]
    PrecisionExhausted(String),

    #[error("budget exceeded: {needed} enumeration points requested, budget is {budget}")]
    Budget { needed: u128, budget: u128 },

    #[error("sequence too short: need {needed} records, have {have}")]
    TooShort { needed: usize, have: usize },

    #[error("trivially singular: witness {witness:?}")]
    TriviallySingular { witness: Vec<i64> },

    #[error("hypothesis violated at y = {y:?}: distance {dist} < required {bound}")]
    HypothesisViolated {
        y: Vec<i64>,
        dist: String,
        bound: String,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("bisection did not converge: {0}")]
    NonConvergence(String),

    #[error("internal contradiction: {0}")]
    InternalContradiction(String),
}

impl Error {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::ZeroDenominator => "zero_denominator",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Invalid(_) => "invalid",
            Error::Domain(_) => "domain",
            Error::OutOfRange(_) => "out_of_range",
            Error::Unsupported(_) => "unsupported",
            Error::PrecisionExhausted(_) => "precision_exhausted",
            Error::Budget { .. } => "budget",
            Error::TooShort { .. } => "too_short",
            Error::TriviallySingular { .. } => "trivially_singular",
            Error::HypothesisViolated { .. } => "hypothesis_violated",
            Error::Precondition(_) => "precondition",
            Error::NonConvergence(_) => "non_convergence",
            Error::InternalContradiction(_) => "internal_contradiction",
        }
    }

    pub(crate) fn precision(context: impl Into<String>) -> Self {
        Error::PrecisionExhausted(context.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
