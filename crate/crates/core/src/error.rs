use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    InvalidInput(String),
    /// Problem parameters violate `N >= 2`, `0 < q < 1`, `m >= 0`, `eps > 0`.
    InvalidParams(String),
    /// A profile is not a member of `Y_m`; carries the failed invariant.
    NotInYm(String),
    /// Two objects that must share a grid do not.
    GridMismatch,
    /// Picard iteration stopped contracting.
    Diverged { ratio: f64, iterations: usize },
    /// A search could not bracket its target.
    Inconclusive(String),
    /// Bisection endpoints do not have opposite classifications.
    InvalidBracket(String),
    /// Should not happen for valid inputs (singular pivot, non-finite data).
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(s) => write!(f, "invalid input: {s}"),
            Error::InvalidParams(s) => write!(f, "invalid parameters: {s}"),
            Error::NotInYm(s) => write!(f, "profile is not in Y_m: {s}"),
            Error::GridMismatch => write!(f, "profiles live on different grids"),
            Error::Diverged { ratio, iterations } => write!(
                f,
                "fixed-point iteration diverged after {iterations} iterations (contraction ratio {ratio:.4})"
            ),
            Error::Inconclusive(s) => write!(f, "inconclusive: {s}"),
            Error::InvalidBracket(s) => write!(f, "invalid bracket: {s}"),
            Error::Internal(s) => write!(f, "internal error: {s}"),
        }
    }
}

impl core::error::Error for Error {}
