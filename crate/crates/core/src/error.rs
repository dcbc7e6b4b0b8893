use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("degree mismatch: expected |j| = {expected}, found {found}")]
    DegreeMismatch { expected: u32, found: u32 },
    #[error("series has zero constant term")]
    ZeroConstantTerm,
    #[error("Gamma pole at argument {arg}")]
    Pole { arg: f64 },
    #[error("alpha = {alpha} outside the admissible range {range}")]
    AlphaOutOfRange { alpha: f64, range: &'static str },
    #[error("beta = {0} > 1; phi_beta is defined only for beta <= 1")]
    BetaAboveOne(f64),
    #[error("basis of size {size} exceeds the limit {limit}")]
    BasisTooLarge { size: usize, limit: usize },
    #[error("Gram matrix numerically singular (Cholesky failed after regularization)")]
    NumericallySingular,
    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("zero function")]
    ZeroFunction,
    #[error("series did not converge within {0} terms")]
    NonConvergence(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("distance increased from N={prev_order} ({prev}) to N={order} ({value})")]
    NotMonotone {
        prev_order: u32,
        prev: f64,
        order: u32,
        value: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
