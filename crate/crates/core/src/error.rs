use thiserror::Error;

/// Errors raised by the computations in this crate.
///
/// Input errors describe a violated precondition. [`Error::NonIntegralTrace`] is the
/// one internal error: it means an assembled trace was not an integer, which can
/// only happen through a bug in the formula terms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument `{0}` must be positive")]
    ZeroArgument(&'static str),
    #[error("weight k = {0} must be even and at least 2")]
    InvalidWeight(u32),
    #[error("n = {n} is not coprime to level N = {level}")]
    NotCoprime { n: u64, level: u64 },
    #[error("{0} is not a negative discriminant (must be < 0 and congruent to 0 or 1 mod 4)")]
    InvalidDiscriminant(i64),
    #[error("prime list contains a repeated or non-prime entry: {0}")]
    InvalidPrimes(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("point {0} lies outside [-2, 2]")]
    OutOfDomain(f64),
    #[error("q-series precision {have} is below the required {need}")]
    InsufficientPrecision { have: usize, need: usize },
    #[error("space S(1,{0}) is zero-dimensional")]
    EmptySpace(u32),
    #[error("no separating Hecke combination found after {0} draws")]
    DegenerateCombination(usize),
    #[error("internal error: trace of T_{n} on S({level},{weight}) assembled to non-integer {value}")]
    NonIntegralTrace {
        n: u64,
        level: u64,
        weight: u32,
        value: String,
    },
}

impl Error {
    /// Stable machine-readable identifier for the error kind.
    pub fn reason(&self) -> &'static str {
        match self {
            Error::ZeroArgument(_) => "zero_argument",
            Error::InvalidWeight(_) => "invalid_weight",
            Error::NotCoprime { .. } => "n_not_coprime_to_level",
            Error::InvalidDiscriminant(_) => "invalid_discriminant",
            Error::InvalidPrimes(_) => "invalid_primes",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidBox(_) => "invalid_box",
            Error::OutOfDomain(_) => "out_of_domain",
            Error::InsufficientPrecision { .. } => "insufficient_precision",
            Error::EmptySpace(_) => "empty_space",
            Error::DegenerateCombination(_) => "degenerate_combination",
            Error::NonIntegralTrace { .. } => "internal_non_integral_trace",
        }
    }

    pub fn is_internal(&self) -> bool {
        matches!(self, Error::NonIntegralTrace { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
