use thiserror::Error;

/// Errors produced anywhere in the construction and verification pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The target number is rational (terminating continued fraction).
    #[error("input is rational: {0}")]
    RationalInput(String),
    /// The number description violates its own invariants.
    #[error("invalid number description: {0}")]
    InvalidXi(String),
    /// Text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// Not enough working precision to certify a result.
    #[error("precision exhausted at {bits} bits: {what}")]
    PrecisionExhausted { what: String, bits: u64 },
    /// The two convergents passed in do not have determinant ±1.
    #[error("convergents are not consecutive: p*q0 - p0*q = {det}")]
    NotConsecutive { det: String },
    /// An exact linear solve returned a non-integral vector for a unimodular system.
    #[error("linear system has no integral solution (basis is not unimodular)")]
    NonIntegralSolution,
    /// A linear system was singular.
    #[error("singular linear system")]
    Singular,
    /// A divided derivative bound that holds unconditionally was found violated.
    #[error("divided derivative bound violated at k = {k}: {detail}")]
    DerivativeBoundViolated { k: usize, detail: String },
    /// A polynomial handed to the root finder has a repeated root.
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    /// Root finding failed to converge or certify.
    #[error("root finding failed: {0}")]
    RootFindingFailed(String),
    /// An optimality branch was requested outside its preconditions.
    #[error("optimality branch unavailable: {0}")]
    BranchUnavailable(String),
    /// A family-level check was given no members.
    #[error("empty family")]
    EmptyFamily,
    /// Family members do not share degree parameter and kind.
    #[error("family members differ in degree or kind")]
    MixedFamily,
    /// A least-squares fit needs more points.
    #[error("insufficient points for fit: got {got}, need {need}")]
    InsufficientPoints { got: usize, need: usize },
    /// A caller-supplied argument is out of range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn precision(what: impl Into<String>, bits: u64) -> Self {
        Error::PrecisionExhausted {
            what: what.into(),
            bits,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
