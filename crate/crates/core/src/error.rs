use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{op}: invalid argument: {msg}")]
    InvalidArgument { op: &'static str, msg: String },

    #[error("{op}: multi-index degree {degree} exceeds tensor power {m}")]
    DegreeExceedsPower {
        op: &'static str,
        degree: u64,
        m: u64,
    },

    #[error("pairing_step: pole at lambda = k(k+n) = {lambda} (k = {k}, n = {n})")]
    Pole { n: u32, k: u32, lambda: String },

    #[error("{op}: quadrature did not converge within {budget} subintervals (estimated error {error:e})")]
    QuadratureNonConvergence {
        op: &'static str,
        budget: usize,
        error: f64,
    },

    #[error("{op}: positivity violated: {what} = {value:e} at s = {s:e}")]
    PositivityViolation {
        op: &'static str,
        what: &'static str,
        value: f64,
        s: f64,
    },

    #[error("{op}: profile provides derivatives up to order {available}, {required} required")]
    DerivativeUnavailable {
        op: &'static str,
        required: usize,
        available: usize,
    },

    #[error("{op}: step t = {t:e} is too small for double precision")]
    StepUnderflow { op: &'static str, t: f64 },

    #[error("{op}: need at least {required} distinct samples, got {got}")]
    InsufficientSamples {
        op: &'static str,
        required: usize,
        got: usize,
    },

    #[error("{op}: matrix is singular or numerically rank deficient")]
    Singular { op: &'static str },

    #[error("{op}: dimension n = {n} is not supported")]
    UnsupportedDimension { op: &'static str, n: u32 },

    #[error("center: no convergence after {iterations} iterations (last step {last_step:e})")]
    NoConvergence { iterations: usize, last_step: f64 },

    #[error(
        "center: step norms grew for {streak} consecutive iterations (last step {last_step:e})"
    )]
    Divergence { streak: usize, last_step: f64 },

    #[error("{op}: series has zero leading coefficient")]
    ZeroLeading { op: &'static str },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Name of the operation that raised the error, when it carries one.
    pub fn operation(&self) -> &'static str {
        match self {
            Error::InvalidArgument { op, .. }
            | Error::DegreeExceedsPower { op, .. }
            | Error::QuadratureNonConvergence { op, .. }
            | Error::PositivityViolation { op, .. }
            | Error::DerivativeUnavailable { op, .. }
            | Error::StepUnderflow { op, .. }
            | Error::InsufficientSamples { op, .. }
            | Error::Singular { op }
            | Error::UnsupportedDimension { op, .. }
            | Error::ZeroLeading { op } => op,
            Error::Pole { .. } => "pairing_step",
            Error::NoConvergence { .. } | Error::Divergence { .. } => "center",
            Error::Parse(_) => "parse",
        }
    }

    /// Short machine-readable kind, used by the CLI error payload.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument { .. } => "invalid_argument",
            Error::DegreeExceedsPower { .. } => "degree_exceeds_power",
            Error::Pole { .. } => "pole",
            Error::QuadratureNonConvergence { .. } => "quadrature_nonconvergence",
            Error::PositivityViolation { .. } => "positivity_violation",
            Error::DerivativeUnavailable { .. } => "derivative_unavailable",
            Error::StepUnderflow { .. } => "step_underflow",
            Error::InsufficientSamples { .. } => "insufficient_samples",
            Error::Singular { .. } => "singular",
            Error::UnsupportedDimension { .. } => "unsupported_dimension",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Divergence { .. } => "divergence",
            Error::ZeroLeading { .. } => "zero_leading",
            Error::Parse(_) => "parse",
        }
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::Divergence { .. }
                | Error::QuadratureNonConvergence { .. }
        )
    }
}

pub(crate) fn invalid(op: &'static str, msg: impl Into<String>) -> Error {
    Error::InvalidArgument {
        op,
        msg: msg.into(),
    }
}
