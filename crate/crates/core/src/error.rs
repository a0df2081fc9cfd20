use thiserror::Error;

use crate::math::BigNat;

#[derive(Debug, Error)]
pub enum Error {
    #[error("log iterate {iterate} is undefined or non-positive at x = {x}")]
    Domain { iterate: &'static str, x: f64 },

    #[error("moduli {0} and {1} are not coprime")]
    NonCoprimeModuli(BigNat, BigNat),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("prime set {0} is empty")]
    EmptyPrimeSet(&'static str),

    #[error("no residue class supplied for primes {0:?}")]
    MissingClasses(Vec<u64>),

    #[error("residue classes supplied for primes outside the expected set: {0:?}")]
    UnexpectedClasses(Vec<u64>),

    #[error("sifted set is inconsistent with its residue system: {0}")]
    Dichotomy(String),

    #[error("weight row for p = {0} has zero mass")]
    ZeroRow(u64),

    #[error("points must be distinct; {0} occurs twice")]
    DuplicatePoint(i64),

    #[error("row bound needs {bits} bits, budget is {budget}; use a smaller x or D")]
    BigIntBudget { bits: u64, budget: u64 },

    #[error("fewer than {needed} primes up to {limit}")]
    TooSmall { limit: u64, needed: usize },

    #[error("cover block {0} is empty")]
    EmptyBlock(usize),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
