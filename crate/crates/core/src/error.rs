use num_bigint::BigInt;
use thiserror::Error;

use crate::exactmath::Rational;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: BigInt },

    #[error("{0} is not prime")]
    NotPrime(BigInt),

    #[error("exponent must be at least 2, got {0}")]
    ExponentTooSmall(u64),

    /// `0` and `N` itself never belong to a Korselt set of `N`.
    #[error("{alpha} is excluded as a base of {n}")]
    ExcludedBase { alpha: Rational, n: BigInt },

    #[error("{n} could not be factored by trial division up to {bound}")]
    Unfactored { n: BigInt, bound: u64 },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A generator parameter that lands on 0, `q^l` or a zero denominator.
    #[error("parameter m = {m} is not admissible: {reason}")]
    SkipParameter { m: BigInt, reason: String },

    /// A constructed candidate failed membership verification.
    #[error("{alpha} is not a Korselt base of {q}^{l}")]
    NotABase { alpha: Rational, q: u64, l: u64 },

    /// The prime search bound degenerates and every prime qualifies.
    #[error("no finite prime bound: {0}")]
    Unbounded(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

impl Error {
    /// True for errors caused by exhausting a computational budget.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Unfactored { .. } | Error::BudgetExceeded(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
