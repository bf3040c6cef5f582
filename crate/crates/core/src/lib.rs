//! Exact computation, enumeration and brute-force cross-validation of
//! Korselt rational bases of prime powers.
//!
//! A rational `α = a/b` (reduced, `b > 0`) is a Korselt base of `N` when
//! `α ∉ {0, N}` and `b·p − a` divides `b·N − a` for every prime `p | N`.
//! For `N = q^l` this collapses to a single divisibility, which is what the
//! closed forms in [`prime_power`] and [`sets`] exploit. The [`oracle`]
//! module re-derives everything literally so the two can be compared.

pub mod cli;
pub mod constructors;
pub mod error;
pub mod exactmath;
pub mod oracle;
pub mod prime_power;
pub mod sets;

pub use error::{Error, Result};
pub use exactmath::{FactorList, Rational};
pub use prime_power::{BaseForm, BoundBranch, PrimePower};
pub use sets::{IntervalBaseWitness, KorseltSet};

/// Caps on the work any single operation may do.
///
/// Exceeding one of these is reported as an error rather than truncating a
/// result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest trial divisor tried while factoring.
    pub factor_bound: u64,
    /// Largest prime-power exponent a construction may produce.
    pub max_exponent: u64,
    /// Largest number of candidates (primes, witnesses) a search or
    /// enumeration may visit.
    pub max_search: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            factor_bound: exactmath::DEFAULT_FACTOR_BOUND,
            max_exponent: 100_000,
            max_search: 5_000_000,
        }
    }
}
