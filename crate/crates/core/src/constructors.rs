//! Constructive results: bases generated from totient data, prime powers
//! admitting a given base, unit-fraction bases, reciprocity and the finite
//! prime search for a fixed exponent.
//!
//! Nothing leaves this module unverified: every produced base is checked
//! with [`contains`] before it is returned.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{self, is_prime_u64, pow, Rational};
use crate::prime_power::{contains, next_prime_u64, PrimePower};
use crate::Budget;

/// How `d = t·q + r` splits against `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorCase {
    /// `t = 0`: base `(mq − r)/m`, `m >= 1`.
    BelowQ,
    /// `r = 0`: base `mq/(t + m)`, `m >= 1`.
    MultipleOfQ,
    /// `t, r != 0`: base `(mq − r)/(t + m)`, `t + m != 0`.
    Mixed,
}

impl fmt::Display for GeneratorCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorCase::BelowQ => "below_q",
            GeneratorCase::MultipleOfQ => "multiple_of_q",
            GeneratorCase::Mixed => "mixed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedBase {
    pub d: BigInt,
    pub case: GeneratorCase,
    pub m: BigInt,
    pub value: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Route {
    /// `gcd(α₁, q) = 1`.
    Coprime,
    /// `q | α₁`.
    Dividing,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Coprime => "coprime_route",
            Route::Dividing => "dividing_route",
        })
    }
}

/// A verified prime power `q^l` admitting `base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Construction {
    pub base: Rational,
    pub q: u64,
    pub l: u64,
    pub route: Route,
}

impl Construction {
    fn verified(base: &Rational, q: u64, l: u64, route: Route) -> Result<Self> {
        let pp = PrimePower::new(q, l)?;
        if !contains(&pp, base) {
            return Err(Error::NotABase { alpha: base.clone(), q, l });
        }
        Ok(Construction { base: base.clone(), q, l, route })
    }

    pub fn prime_power(&self) -> PrimePower {
        PrimePower::new(self.q, self.l).expect("validated at construction")
    }
}

/// Why a prime divisor `q` of the numerator cannot host the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Blocker {
    /// `q | α₂ − α₁/q`, so `α₂ − α₁/q` can never divide `q^(l−1) − 1`.
    DividesGap { gap: BigInt },
    /// The base is `q` itself, which no Korselt set contains.
    BaseIsPrime,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockedPrime {
    pub q: BigInt,
    pub blocker: Blocker,
}

impl fmt::Display for BlockedPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.blocker {
            Blocker::DividesGap { gap } => write!(f, "q={} divides {gap}", self.q),
            Blocker::BaseIsPrime => write!(f, "q={} equals the base", self.q),
        }
    }
}

/// Every prime divisor of the numerator together with what blocks it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfeasibilityReport {
    pub alpha: Rational,
    pub blocked: Vec<BlockedPrime>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DividingOutcome {
    Constructed(Construction),
    Infeasible(InfeasibilityReport),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitSign {
    Positive,
    Negative,
}

impl UnitSign {
    fn value(self) -> i64 {
        match self {
            UnitSign::Positive => 1,
            UnitSign::Negative => -1,
        }
    }
}

fn require_exponent(l: u64) -> Result<()> {
    if l < 2 {
        return Err(Error::ExponentTooSmall(l));
    }
    Ok(())
}

fn check_exponent_budget(l: &BigInt, budget: &Budget) -> Result<u64> {
    match l.to_u64() {
        Some(v) if v <= budget.max_exponent => Ok(v),
        _ => Err(Error::BudgetExceeded(format!(
            "exponent {l} exceeds the cap {}",
            budget.max_exponent
        ))),
    }
}

/// All `d <= bound` with `φ(d) | l − 1`.
pub fn eligible_generators(l: u64, bound: u64) -> Result<Vec<u64>> {
    require_exponent(l)?;
    if bound == 0 {
        return Err(Error::NonPositive { what: "bound", value: BigInt::zero() });
    }
    let target = BigInt::from(l - 1);
    let mut out = Vec::new();
    for d in 1..=bound {
        let phi = exactmath::euler_phi(&BigInt::from(d))?;
        if (&target % &phi).is_zero() {
            out.push(d);
        }
    }
    Ok(out)
}

/// The base generated by `d` with parameter `m`.
///
/// Fails with [`Error::SkipParameter`] when `m` lands on a zero denominator,
/// `0` or `q^l`, and with [`Error::NotABase`] when the candidate does not
/// verify. The candidate is a base iff `d | (t_d + m)(q^l − q)`, which fails
/// for some `m` once `q² | d`; see [`generate_base`].
pub fn bases_from_divisor(pp: &PrimePower, d: &BigInt, m: &BigInt) -> Result<GeneratedBase> {
    exactmath::require_positive("d", d)?;
    let phi = exactmath::euler_phi(d)?;
    if !(BigInt::from(pp.l() - 1) % &phi).is_zero() {
        return Err(Error::Precondition(format!(
            "phi({d}) = {phi} does not divide l - 1 = {}",
            pp.l() - 1
        )));
    }
    let q = BigInt::from(pp.q());
    let (t, r) = d.div_rem(&q);
    let skip = |reason: &str| Error::SkipParameter { m: m.clone(), reason: reason.to_string() };

    let (case, num, den) = if t.is_zero() {
        if !m.is_positive() {
            return Err(skip("needs m >= 1"));
        }
        (GeneratorCase::BelowQ, m * &q - &r, m.clone())
    } else if r.is_zero() {
        if !m.is_positive() {
            return Err(skip("needs m >= 1"));
        }
        (GeneratorCase::MultipleOfQ, m * &q, &t + m)
    } else {
        (GeneratorCase::Mixed, m * &q - &r, &t + m)
    };
    if den.is_zero() {
        return Err(skip("zero denominator"));
    }
    let value = Rational::new(num, den)?;
    if pp.excludes(&value) {
        return Err(skip(&format!("value {value} is excluded")));
    }
    if !contains(pp, &value) {
        return Err(Error::NotABase { alpha: value, q: pp.q(), l: pp.l() });
    }
    Ok(GeneratedBase { d: d.clone(), case, m: m.clone(), value })
}

/// The base generated by `d` with the least parameter `m >= 1` that works.
///
/// Membership holds iff `m ≡ −t_d` modulo `d / gcd(d, q^l − q)`, so the
/// search stops within `d + 2` steps.
pub fn generate_base(pp: &PrimePower, d: &BigInt) -> Result<GeneratedBase> {
    exactmath::require_positive("d", d)?;
    let mut m = BigInt::one();
    let last = d + 2;
    let mut rejected = None;
    while m <= last {
        match bases_from_divisor(pp, d, &m) {
            Ok(g) => return Ok(g),
            Err(Error::SkipParameter { .. }) => {}
            Err(e @ Error::NotABase { .. }) => rejected = Some(e),
            Err(e) => return Err(e),
        }
        m += 1;
    }
    Err(rejected.unwrap_or_else(|| Error::Precondition(format!("no parameter m works for d = {d}"))))
}

/// Prime power `p^k` with `gcd(α₁, p) = 1` admitting `α`: `p` is the least
/// prime above `|α₁|`, `k = φ(α₂p − α₁) + 1`.
pub fn prime_power_for_base_coprime(alpha: &Rational) -> Result<Construction> {
    prime_power_for_base_coprime_with(alpha, &Budget::default())
}

pub fn prime_power_for_base_coprime_with(alpha: &Rational, budget: &Budget) -> Result<Construction> {
    if alpha.is_zero() {
        return Err(Error::Precondition("alpha must be nonzero".into()));
    }
    let p = exactmath::next_prime(&alpha.numer().abs());
    coprime_route_at(alpha, &p, budget)
}

fn coprime_route_at(alpha: &Rational, p: &BigInt, budget: &Budget) -> Result<Construction> {
    let p64 = p
        .to_u64()
        .ok_or_else(|| Error::BudgetExceeded(format!("prime {p} exceeds 64 bits")))?;
    let gap = alpha.denom() * p - alpha.numer();
    let phi = exactmath::euler_phi_with_bound(&gap, budget.factor_bound)?;
    let k = check_exponent_budget(&(phi + 1), budget)?;
    Construction::verified(alpha, p64, k, Route::Coprime)
}

/// Prime power `q^l` with `q | α₁` admitting `α`, or a report of why every
/// prime divisor of `α₁` is blocked.
///
/// With `α₁ = α₁′q`, membership needs `α₂ − α₁′ | q^(l−1) − 1`, which is
/// solvable (with `l = φ(|α₂ − α₁′|) + 1`) exactly when `q ∤ α₂ − α₁′`.
pub fn prime_power_for_base_dividing(alpha: &Rational) -> Result<DividingOutcome> {
    prime_power_for_base_dividing_with(alpha, &Budget::default())
}

pub fn prime_power_for_base_dividing_with(
    alpha: &Rational,
    budget: &Budget,
) -> Result<DividingOutcome> {
    let a1 = alpha.numer().abs();
    if a1.is_zero() || a1.is_one() {
        return Err(Error::Precondition(format!(
            "numerator of {alpha} has no prime divisor"
        )));
    }
    let factors = exactmath::factorize_with_bound(&a1, budget.factor_bound)?;
    let mut blocked = Vec::new();
    for q in factors.primes() {
        let reduced = alpha.numer() / q;
        let gap = alpha.denom() - &reduced;
        if gap.is_zero() {
            blocked.push(BlockedPrime { q: q.clone(), blocker: Blocker::BaseIsPrime });
            continue;
        }
        if (&gap % q).is_zero() {
            blocked.push(BlockedPrime { q: q.clone(), blocker: Blocker::DividesGap { gap } });
            continue;
        }
        let q64 = q
            .to_u64()
            .ok_or_else(|| Error::BudgetExceeded(format!("prime {q} exceeds 64 bits")))?;
        let phi = exactmath::euler_phi_with_bound(&gap.abs(), budget.factor_bound)?;
        let l = check_exponent_budget(&(phi + 1), budget)?;
        let c = Construction::verified(alpha, q64, l, Route::Dividing)?;
        return Ok(DividingOutcome::Constructed(c));
    }
    Ok(DividingOutcome::Infeasible(InfeasibilityReport { alpha: alpha.clone(), blocked }))
}

/// `count` distinct verified prime powers admitting `α`.
///
/// Starts from the coprime-route construction `p^k` and walks the exponents
/// `k + j(k − 1)`, each of whose Korselt sets contains that of `p^k`. When
/// the exponent cap is reached the next prime is seeded the same way.
pub fn base_family(alpha: &Rational, count: usize) -> Result<Vec<Construction>> {
    base_family_with(alpha, count, &Budget::default())
}

pub fn base_family_with(alpha: &Rational, count: usize, budget: &Budget) -> Result<Vec<Construction>> {
    if count == 0 {
        return Err(Error::NonPositive { what: "count", value: BigInt::zero() });
    }
    let seed = prime_power_for_base_coprime_with(alpha, budget)?;
    let mut out = Vec::with_capacity(count);
    let mut seen = BTreeSet::new();
    let mut current = seed;
    let mut primes_tried = 0u64;
    loop {
        let step = current.l - 1;
        let mut l = current.l;
        while l <= budget.max_exponent {
            if seen.insert((current.q, l)) {
                out.push(Construction::verified(alpha, current.q, l, Route::Coprime)?);
                if out.len() == count {
                    return Ok(out);
                }
            }
            l += step;
        }
        primes_tried += 1;
        if primes_tried > budget.max_search {
            return Err(Error::BudgetExceeded("family search ran out of primes".into()));
        }
        let next = exactmath::next_prime(&BigInt::from(current.q));
        current = coprime_route_at(alpha, &next, budget)?;
    }
}

fn small_divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|s| n.is_multiple_of(*s)).collect()
}

/// `1/q^(s−1)` for every `s | l − 1`, and `−1/q^(s−1)` when `(l − 1)/s` is
/// even; sorted ascending.
pub fn unit_fraction_bases(pp: &PrimePower) -> Result<Vec<Rational>> {
    let n = pp.l() - 1;
    let mut out = BTreeSet::new();
    for s in small_divisors(n) {
        let den = pow(pp.q(), s - 1);
        let mut candidates = vec![Rational::new(1, den.clone())?];
        if (n / s).is_multiple_of(2) {
            candidates.push(Rational::new(-1, den)?);
        }
        for c in candidates {
            if !contains(pp, &c) {
                return Err(Error::NotABase { alpha: c, q: pp.q(), l: pp.l() });
            }
            out.insert(c);
        }
    }
    Ok(out.into_iter().collect())
}

/// `(±1/p ∈ KS(q^l), ±1/q ∈ KS(p^l))`.
///
/// The two agree for the positive sign and every `l`, and for the negative
/// sign when `l` is odd. For even `l` and the negative sign they may differ,
/// e.g. `(2, 3, 4)` gives `(false, true)`.
pub fn reciprocal_pair_holds(p: u64, q: u64, l: u64, sign: UnitSign) -> Result<(bool, bool)> {
    if p == q {
        return Err(Error::Precondition(format!("p and q must differ, both are {p}")));
    }
    let over_p = Rational::new(sign.value(), p)?;
    let over_q = Rational::new(sign.value(), q)?;
    let q_power = PrimePower::new(q, l)?;
    let p_power = PrimePower::new(p, l)?;
    Ok((contains(&q_power, &over_p), contains(&p_power, &over_q)))
}

/// Upper bound `α + |α·α₁^(l−2) − α₂^(l−2)|` on primes `q` coprime to `α₁`
/// with `α ∈ KS(q^l)`.
///
/// The bound comes from `α₂q − α₁ | α₁^(l−1) − α₂^(l−1)` and is meaningless
/// when that right side vanishes, which for `α ∉ {0, 1}` happens only for
/// `α = −1` with `l` odd; every prime then admits `−1`.
pub fn feasibility_bound(alpha: &Rational, l: u64) -> Result<Rational> {
    require_exponent(l)?;
    if alpha.is_zero() || *alpha == Rational::one() {
        return Err(Error::Precondition(format!("no prime bound for alpha = {alpha}")));
    }
    if *alpha == Rational::from(-1) && l % 2 == 1 {
        return Err(Error::Unbounded(format!(
            "-1 is a base of q^{l} for every prime q"
        )));
    }
    let e = (l - 2) as usize;
    let a1 = Rational::from_integer(num_traits::pow(alpha.numer().clone(), e));
    let a2 = Rational::from_integer(num_traits::pow(alpha.denom().clone(), e));
    Ok(alpha + &(&(alpha * &a1) - &a2).abs())
}

/// Every prime `q` with `gcd(α₁, q) = 1` and `α ∈ KS(q^l)`, ascending.
pub fn feasible_primes(alpha: &Rational, l: u64) -> Result<Vec<u64>> {
    feasible_primes_with(alpha, l, &Budget::default())
}

pub fn feasible_primes_with(alpha: &Rational, l: u64, budget: &Budget) -> Result<Vec<u64>> {
    let bound = feasibility_bound(alpha, l)?.floor();
    let limit = match bound.to_u64() {
        Some(b) if b <= budget.max_search => b,
        None if bound.is_negative() => return Ok(Vec::new()),
        _ => {
            return Err(Error::BudgetExceeded(format!(
                "prime bound {bound} exceeds the search cap {}",
                budget.max_search
            )))
        }
    };
    let mut out = Vec::new();
    let mut q = 2u64;
    while q <= limit {
        if alpha.numer().gcd(&BigInt::from(q)).is_one() && contains(&PrimePower::new(q, l)?, alpha) {
            out.push(q);
        }
        q = next_prime_u64(q)?;
    }
    debug_assert!(out.iter().all(|&q| is_prime_u64(q)));
    Ok(out)
}
