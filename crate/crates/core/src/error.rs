use thiserror::Error;

/// Errors raised by the arithmetic and reduction engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported index p = {p}: need 3 <= p <= {max}")]
    UnsupportedIndex { p: u64, max: u64 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("malformed JSON: {0}")]
    Json(String),

    #[error("zero denominator in surd")]
    ZeroDenominator,

    #[error("radicand must be positive for an irrational surd")]
    NonPositiveRadicand,

    #[error("surds with unrelated radicands cannot be compared")]
    IncompatibleRadicand,

    #[error("matrix determinant is not 1")]
    DeterminantNotOne,

    #[error("element has no real fixed points (elliptic)")]
    Elliptic,

    #[error("identity element has no isolated fixed points")]
    Identity,

    #[error("index {k} outside 1..={p}")]
    OutOfRange { k: i64, p: u32 },

    #[error("no period found after {0} steps")]
    NonPeriodic(usize),

    #[error("partial quotient does not fit in 64 bits")]
    DigitOverflow,

    #[error("period matrix is not hyperbolic")]
    NonHyperbolicPeriod,

    #[error("re-expansion of the evaluated point gave {got}, expected {expected}")]
    RoundTripMismatch { expected: String, got: String },

    #[error("point is parabolic, not hyperbolic")]
    Parabolic,

    #[error("form has zero leading coefficient")]
    ZeroLeadingCoefficient,

    #[error("form is not indefinite")]
    NotIndefinite,

    #[error("form coefficients must lie in Z[lambda]")]
    NotIntegral,

    #[error("form is not hyperbolic")]
    NonHyperbolicForm,

    #[error("form is not reduced")]
    NotReduced,

    #[error("number is not simple")]
    NotSimple,

    #[error("negative input to the piecewise map")]
    NegativeInput,

    #[error("orbit did not return to its start within {0} steps")]
    NonClosingOrbit(usize),

    #[error("cycle did not close within {0} steps")]
    NonClosingCycle(usize),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }

    /// True for errors caused by malformed input text rather than by the
    /// mathematics of a well-formed input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Json(_) | Error::UnsupportedIndex { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
