use std::fmt;

use thiserror::Error;

/// A place of `Q`: the real place or a finite prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Place {
    Infinity,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "∞"),
            Place::Prime(p) => write!(f, "p = {p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("1 is not the discriminant of a quadratic field")]
    UnitDiscriminant,
    #[error("{0} is not a discriminant (≢ 0, 1 mod 4)")]
    NotDiscriminant(i64),
    #[error("symbol ({a}/{p}) is undefined: {reason}")]
    SymbolUndefined { a: i64, p: u64, reason: &'static str },
    #[error("parts {0} and {1} are not coprime")]
    NotCoprime(i64, i64),
    #[error("product of parts is {product}, expected {expected}")]
    ProductMismatch { product: i64, expected: i64 },
    #[error("condition fails at p = {prime}: ({numerator}/{prime}) = {value}")]
    SymbolCondition { numerator: i64, prime: u64, value: i32 },
    #[error("more than one part is negative")]
    TooManyNegative,
    #[error("no admissible parameter a ≤ {0}")]
    ParameterSearchExhausted(u64),
    #[error("conic is not solvable locally at {0}")]
    LocallyUnsolvable(Place),
    #[error("conic search exhausted without a solution")]
    ConicSearchExhausted,
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements live over different bases")]
    BaseMismatch,
    #[error("extension is not normal: μ^(1−g) is not a square for g = {0}")]
    NotNormal(String),
    #[error("no candidate twist is 2-primary")]
    NoTwoPrimaryTwist,
    #[error("element is not integral")]
    NotIntegral,
    #[error("element is not coprime to 2")]
    NotOdd,
    #[error("no discriminant δ | d relates the two generators")]
    NoDiscriminantTwist,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code: 1 for a factorization that fails its conditions,
    /// 2 for malformed input, 3 for anything the theory says cannot happen.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SymbolCondition { .. } | Error::TooManyNegative => 1,
            Error::NotFundamental(_)
            | Error::UnitDiscriminant
            | Error::NotDiscriminant(_)
            | Error::SymbolUndefined { .. }
            | Error::NotCoprime(..)
            | Error::ProductMismatch { .. }
            | Error::InvalidInput(_) => 2,
            _ => 3,
        }
    }
}
