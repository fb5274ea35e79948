use thiserror::Error;

use crate::scalar::ScalarMode;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient mode mismatch: {0} vs {1}")]
    ModeMismatch(ScalarMode, ScalarMode),
    #[error("variable tag mismatch: {0} vs {1}")]
    VariableMismatch(char, char),
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator has zero constant term")]
    ZeroConstantTerm,
    #[error("q must be an exact rational in [0, 1), got {0}")]
    InvalidQ(String),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("q-Pochhammer factor ({0};q)_{1} vanishes in a denominator")]
    VanishingDenominator(String, usize),
    #[error("moment sequence value m({0}) is not exact; exact coefficient modes need exact weights")]
    InexactWeight(usize),
    #[error("invalid moment sequence: {0}")]
    InvalidSequence(String),
    #[error("derivative order {order} exceeds truncation order {truncation}")]
    OrderTooLarge { order: usize, truncation: usize },
    #[error("window too short: need at least {needed} coefficients, have {have}")]
    WindowTooShort { needed: usize, have: usize },
    #[error("leading coefficient P0 must be a nonzero constant (normalized solutions are unsupported)")]
    UnsupportedNormalization,
    #[error("invalid Cauchy problem: {0}")]
    InvalidProblem(String),
    #[error("Pade system is singular: {0}")]
    SingularPade(String),
    #[error("evaluator failed at {point}: {reason}")]
    Evaluation { point: String, reason: String },
    #[error("series did not converge within {0} terms")]
    NoConvergence(usize),
    #[error("non-finite sample at r = {0}")]
    NonFinite(f64),
    #[error("multisummable regime: {0} positive slopes (direction prediction needs exactly one)")]
    Multisummable(usize),
    #[error("k must be strictly decreasing and positive")]
    UnsortedLevels,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
