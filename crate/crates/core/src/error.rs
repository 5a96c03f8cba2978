use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Evaluation at a non-positive integer. `component` is set by the
    /// two-variable maps to say which coordinate hit the pole.
    #[error("pole of Gamma at {z}{}", component.map(|c| format!(" (component {c})")).unwrap_or_default())]
    Pole { z: Complex64, component: Option<usize> },

    /// |Re log Gamma(z)| is outside the double exponent range.
    #[error("Gamma({z}) leaves the floating range (Re log Gamma = {log_modulus})")]
    Overflow { z: Complex64, log_modulus: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at byte {position}: expected {expected}")]
    Parse { position: usize, expected: String },

    #[error("no sign change of the polynomial found in the search box")]
    NoRealPoints,

    #[error("seed ({x}, {y}) is not a regular point of the curve: {reason}")]
    SingularSeed { x: f64, y: f64, reason: String },

    #[error("Newton corrector failed near ({x}, {y}) after all step halvings")]
    StepFailure { x: f64, y: f64 },

    #[error("every sample was dropped before fitting ({dropped} dropped)")]
    EmptyImage { dropped: usize },

    #[error("need at least {needed} samples for degree {degree}, got {got}")]
    InsufficientSamples { degree: usize, needed: usize, got: usize },

    #[error("all input points coincide")]
    DegenerateInput,

    #[error("no sign change of digamma on ({left}, {right})")]
    Bracket { left: f64, right: f64 },

    #[error("argument {n} exceeds the configured cap {cap}")]
    CapExceeded { n: u64, cap: u64 },

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("({m}!, {n}!) is not a root of the polynomial")]
    NotARoot { m: u64, n: u64 },

    #[error("unique minimal valuation at a root for p = {p}: arithmetic bug")]
    CertificateViolation { p: u64 },

    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("degenerate polynomial: {0}")]
    Degenerate(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("leading coefficient is a root of multiplicity {multiplicity}; ramified expansion is not supported")]
    MultipleRootUnsupported { multiplicity: usize },
}

impl Error {
    pub(crate) fn pole(z: Complex64) -> Self {
        Error::Pole { z, component: None }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
