//! Closed-form enumerators for Korselt sets of prime powers.
//!
//! Every base of `q^l` has the form `q + d/s` with `d` a positive divisor of
//! `q^l − q` and `s` a nonzero integer; the enumerators below sweep slices of
//! that parametrization and canonicalize each candidate before deduplicating.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::exactmath::{self, ceil_div, floor_div, Rational};
use crate::prime_power::{BaseForm, PrimePower};
use crate::Budget;

/// Sorted, deduplicated members of a Korselt set; `0` and `N` never appear.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KorseltSet {
    members: Vec<Rational>,
}

impl KorseltSet {
    /// Collects candidates, dropping the values `pp` excludes.
    pub fn collect_for(pp: &PrimePower, items: impl IntoIterator<Item = Rational>) -> Self {
        let set: BTreeSet<Rational> = items.into_iter().filter(|a| !pp.excludes(a)).collect();
        KorseltSet { members: set.into_iter().collect() }
    }

    /// Builds a set from values already known to be admissible.
    pub fn from_members(items: impl IntoIterator<Item = Rational>) -> Self {
        let set: BTreeSet<Rational> = items.into_iter().collect();
        KorseltSet { members: set.into_iter().collect() }
    }

    pub fn members(&self) -> &[Rational] {
        &self.members
    }

    /// Cardinality of the set.
    pub fn weight(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, alpha: &Rational) -> bool {
        self.members.binary_search(alpha).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.members.iter()
    }

    /// Members satisfying `keep`.
    pub fn filtered(&self, keep: impl Fn(&Rational) -> bool) -> KorseltSet {
        KorseltSet { members: self.members.iter().filter(|a| keep(a)).cloned().collect() }
    }
}

impl IntoIterator for KorseltSet {
    type Item = Rational;
    type IntoIter = std::vec::IntoIter<Rational>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.into_iter()
    }
}

/// A base `q − d/den` from the interval characterizations; `den` need not be
/// coprime to `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalBaseWitness {
    pub d: BigInt,
    pub den: BigInt,
    pub value: Rational,
}

fn shifted_divisors(pp: &PrimePower, budget: &Budget) -> Result<Vec<BigInt>> {
    exactmath::divisors_with_bound(&pp.shifted(), budget.factor_bound)
}

/// Integer Korselt set of `q^l`: `{q ± d : d | q^l − q} ∖ {0, q^l}`.
pub fn integer_korselt_set(pp: &PrimePower) -> Result<KorseltSet> {
    integer_korselt_set_with(pp, &Budget::default())
}

pub fn integer_korselt_set_with(pp: &PrimePower, budget: &Budget) -> Result<KorseltSet> {
    let q = BigInt::from(pp.q());
    let divs = shifted_divisors(pp, budget)?;
    let candidates = divs
        .iter()
        .flat_map(|d| [&q + d, &q - d])
        .map(Rational::from_integer);
    Ok(KorseltSet::collect_for(pp, candidates))
}

/// Size of the integer Korselt set: `4·σ₀(q^(l−1) − 1) − 2`.
pub fn integer_korselt_weight(pp: &PrimePower) -> Result<BigInt> {
    integer_korselt_weight_with(pp, &Budget::default())
}

pub fn integer_korselt_weight_with(pp: &PrimePower, budget: &Budget) -> Result<BigInt> {
    let fl = exactmath::factor_any_positive(&pp.reduced_shift(), budget.factor_bound)?;
    let sigma: BigInt = fl
        .factors()
        .iter()
        .fold(BigInt::one(), |acc, (_, e)| acc * BigInt::from(*e + 1));
    Ok(sigma * 4 - 2)
}

/// All rational bases of `q^l` whose reduced denominator is at most
/// `max_den`.
pub fn bounded_korselt_set(pp: &PrimePower, max_den: u64) -> Result<KorseltSet> {
    bounded_korselt_set_with(pp, max_den, &Budget::default())
}

pub fn bounded_korselt_set_with(
    pp: &PrimePower,
    max_den: u64,
    budget: &Budget,
) -> Result<KorseltSet> {
    if max_den == 0 {
        return Err(Error::NonPositive { what: "max_den", value: BigInt::from(0) });
    }
    let divs = shifted_divisors(pp, budget)?;
    let work = (divs.len() as u64).saturating_mul(2 * max_den);
    if work > budget.max_search {
        return Err(Error::BudgetExceeded(format!(
            "{work} candidate forms exceed the search cap {}",
            budget.max_search
        )));
    }
    let mut values = Vec::with_capacity(work as usize);
    for d in &divs {
        for s in 1..=max_den {
            for sign in [1i64, -1] {
                let form = BaseForm::new(pp, d.clone(), BigInt::from(s) * sign)?;
                values.push(form.value());
            }
        }
    }
    Ok(KorseltSet::collect_for(pp, values))
}

enum Side {
    /// `]0, 1[`: `floor(d/q) + 1 ..= ceil(d/(q−1)) − 1`.
    Positive,
    /// `[−1, 0[`: `ceil(d/(q+1)) ..= ceil(d/q) − 1`.
    Negative,
}

fn interval_ranges(
    pp: &PrimePower,
    side: Side,
    budget: &Budget,
) -> Result<Vec<(BigInt, BigInt, BigInt)>> {
    let q = BigInt::from(pp.q());
    let mut out = Vec::new();
    for d in shifted_divisors(pp, budget)? {
        let (lo, hi) = match side {
            Side::Positive => (floor_div(&d, &q)? + 1, ceil_div(&d, &(&q - 1))? - 1),
            Side::Negative => (ceil_div(&d, &(&q + 1))?, ceil_div(&d, &q)? - 1),
        };
        if lo <= hi {
            out.push((d, lo, hi));
        }
    }
    Ok(out)
}

fn expand(pp: &PrimePower, ranges: Vec<(BigInt, BigInt, BigInt)>, budget: &Budget) -> Result<Vec<IntervalBaseWitness>> {
    let total: BigInt = ranges.iter().map(|(_, lo, hi)| hi - lo + 1).sum();
    if total.to_u64().is_none_or(|t| t > budget.max_search) {
        return Err(Error::BudgetExceeded(format!(
            "{total} interval witnesses for {pp} exceed the search cap {}",
            budget.max_search
        )));
    }
    let q = BigInt::from(pp.q());
    let mut out = Vec::new();
    for (d, lo, hi) in ranges {
        let mut den = lo;
        while den <= hi {
            let value = Rational::new(&q * &den - &d, den.clone())?;
            out.push(IntervalBaseWitness { d: d.clone(), den: den.clone(), value });
            den += 1;
        }
    }
    Ok(out)
}

/// Witnesses `q − d/den` for every base of `q^l` in `]0, 1[`.
pub fn positive_interval_bases(pp: &PrimePower) -> Result<Vec<IntervalBaseWitness>> {
    positive_interval_bases_with(pp, &Budget::default())
}

pub fn positive_interval_bases_with(
    pp: &PrimePower,
    budget: &Budget,
) -> Result<Vec<IntervalBaseWitness>> {
    expand(pp, interval_ranges(pp, Side::Positive, budget)?, budget)
}

/// Witnesses `q − d/den` for every base of `q^l` in `[−1, 0[`.
pub fn negative_interval_bases(pp: &PrimePower) -> Result<Vec<IntervalBaseWitness>> {
    negative_interval_bases_with(pp, &Budget::default())
}

pub fn negative_interval_bases_with(
    pp: &PrimePower,
    budget: &Budget,
) -> Result<Vec<IntervalBaseWitness>> {
    expand(pp, interval_ranges(pp, Side::Negative, budget)?, budget)
}

/// The Korselt set of `q^l` restricted to `[−1, 1[`.
pub fn interval_korselt_set(pp: &PrimePower) -> Result<KorseltSet> {
    interval_korselt_set_with(pp, &Budget::default())
}

pub fn interval_korselt_set_with(pp: &PrimePower, budget: &Budget) -> Result<KorseltSet> {
    let pos = positive_interval_bases_with(pp, budget)?;
    let neg = negative_interval_bases_with(pp, budget)?;
    Ok(KorseltSet::from_members(pos.into_iter().chain(neg).map(|w| w.value)))
}

/// Whether the `[−1, 1[` slice is empty, decided from the witness ranges
/// without enumerating them.
pub fn interval_set_is_empty(pp: &PrimePower) -> Result<bool> {
    let budget = Budget::default();
    Ok(interval_ranges(pp, Side::Positive, &budget)?.is_empty()
        && interval_ranges(pp, Side::Negative, &budget)?.is_empty())
}

/// Number of `(d, den)` witness pairs on each side, `(positive, negative)`.
pub fn interval_witness_counts(pp: &PrimePower) -> Result<(BigInt, BigInt)> {
    let budget = Budget::default();
    let count = |ranges: Vec<(BigInt, BigInt, BigInt)>| -> BigInt {
        ranges.iter().map(|(_, lo, hi)| hi - lo + 1).sum()
    };
    Ok((
        count(interval_ranges(pp, Side::Positive, &budget)?),
        count(interval_ranges(pp, Side::Negative, &budget)?),
    ))
}
