//! Membership predicates, bounds and structural laws for prime powers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{self, divides, is_prime_u64, pow, Rational};
use crate::Budget;

/// `N = q^l` with `q` prime and `l >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimePower {
    q: u64,
    l: u64,
}

impl PrimePower {
    pub fn new(q: u64, l: u64) -> Result<Self> {
        if !is_prime_u64(q) {
            return Err(Error::NotPrime(BigInt::from(q)));
        }
        if l < 2 {
            return Err(Error::ExponentTooSmall(l));
        }
        Ok(PrimePower { q, l })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    /// `q^l`.
    pub fn value(&self) -> BigInt {
        pow(self.q, self.l)
    }

    /// `q^l - q`, whose divisors parametrize every Korselt base.
    pub fn shifted(&self) -> BigInt {
        self.value() - self.q
    }

    /// `q^(l-1) - 1`.
    pub fn reduced_shift(&self) -> BigInt {
        pow(self.q, self.l - 1) - 1
    }

    /// True for the two values no Korselt set may contain: `0` and `q^l`.
    pub fn excludes(&self, alpha: &Rational) -> bool {
        alpha.is_zero() || (alpha.denom().is_one() && is_exact_power(alpha.numer(), self.q, self.l))
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.q, self.l)
    }
}

// n == q^l without materializing q^l
fn is_exact_power(n: &BigInt, q: u64, l: u64) -> bool {
    if !n.is_positive() {
        return false;
    }
    let q = BigInt::from(q);
    let mut m = n.clone();
    let mut e = 0u64;
    while e < l {
        let (quot, rem) = m.div_rem(&q);
        if !rem.is_zero() {
            return false;
        }
        m = quot;
        e += 1;
    }
    m.is_one()
}

/// A base written as `q + d/s` with `d | q^l - q`, `d >= 1`, `s != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseForm {
    q: u64,
    d: BigInt,
    s: BigInt,
}

impl BaseForm {
    pub fn new(pp: &PrimePower, d: BigInt, s: BigInt) -> Result<Self> {
        exactmath::require_positive("d", &d)?;
        if s.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if !divides(&d, &pp.shifted()) {
            return Err(Error::Precondition(format!("{d} does not divide {}", pp.shifted())));
        }
        Ok(BaseForm { q: pp.q(), d, s })
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn s(&self) -> &BigInt {
        &self.s
    }

    /// `q + d/s`, reduced.
    pub fn value(&self) -> Rational {
        Rational::new(BigInt::from(self.q) * &self.s + &self.d, self.s.clone())
            .expect("s is nonzero")
    }
}

/// Which of the two bound families applies to a base.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundBranch {
    /// Numerator coprime to `q`; the bounds apply to `α` itself.
    Coprime,
    /// `q` divides the numerator; the bounds apply to `α/q`.
    Divisible,
}

fn check_not_excluded(n: &BigInt, alpha: &Rational) -> Result<()> {
    if alpha.is_zero() || alpha.is_integer_value(n) {
        return Err(Error::ExcludedBase { alpha: alpha.clone(), n: n.clone() });
    }
    Ok(())
}

/// General membership test for any `N >= 2`: `α₂p − α₁ | α₂N − α₁` for every
/// prime `p | N`, where 0 divides only 0.
pub fn is_korselt(n: &BigInt, alpha: &Rational) -> Result<bool> {
    is_korselt_with(n, alpha, &Budget::default())
}

pub fn is_korselt_with(n: &BigInt, alpha: &Rational, budget: &Budget) -> Result<bool> {
    is_korselt_pair_with(n, alpha.numer(), alpha.denom(), budget)
}

/// The divisibility test on a possibly unreduced pair `num/den`.
///
/// Scaling both parts by a nonzero constant scales both sides of every
/// divisibility, so the verdict matches the reduced form.
pub fn is_korselt_pair(n: &BigInt, num: &BigInt, den: &BigInt) -> Result<bool> {
    is_korselt_pair_with(n, num, den, &Budget::default())
}

fn is_korselt_pair_with(n: &BigInt, num: &BigInt, den: &BigInt, budget: &Budget) -> Result<bool> {
    if n < &BigInt::from(2) {
        return Err(Error::Precondition(format!("N must be at least 2, got {n}")));
    }
    let alpha = Rational::new(num.clone(), den.clone())?;
    check_not_excluded(n, &alpha)?;
    let factors = exactmath::factorize_with_bound(n, budget.factor_bound)?;
    let rhs = den * n - num;
    let ok = factors.primes().all(|p| divides(&(den * p - num), &rhs));
    Ok(ok)
}

/// Membership of `α` in the rational Korselt set of `q^l`.
///
/// Uses `α₂q − α₁ | q(q^(l−1) − 1)`, evaluated modulo `|α₂q − α₁|`, so large
/// exponents never materialize `q^l`.
pub fn is_prime_power_base(pp: &PrimePower, alpha: &Rational) -> Result<bool> {
    if pp.excludes(alpha) {
        return Err(Error::ExcludedBase { alpha: alpha.clone(), n: pp.value() });
    }
    Ok(criterion(pp, alpha))
}

/// Like [`is_prime_power_base`] but answers `false` for the excluded values.
pub fn contains(pp: &PrimePower, alpha: &Rational) -> bool {
    !pp.excludes(alpha) && criterion(pp, alpha)
}

fn criterion(pp: &PrimePower, alpha: &Rational) -> bool {
    let q = BigInt::from(pp.q());
    let gap = alpha.denom() * &q - alpha.numer();
    if gap.is_zero() {
        return false;
    }
    let modulus = gap.abs();
    if modulus.is_one() {
        return true;
    }
    let t = q.modpow(&BigInt::from(pp.l() - 1), &modulus);
    let residue = (&q * (t - 1u32)).mod_floor(&modulus);
    residue.is_zero()
}

/// Closed-form bounds on members of the Korselt set of `q^l`.
///
/// `Coprime` bounds `α` when `gcd(α₁, q) = 1`: `[1+q−q^(l−1), q^(l−1)+q−1]`.
/// `Divisible` bounds `α/q` when `q | α₁`: `[2−q^(l−1), (q^(l−1)+1)/2]`.
pub fn base_bounds(pp: &PrimePower, branch: BoundBranch) -> (Rational, Rational) {
    let top = pow(pp.q(), pp.l() - 1);
    let q = BigInt::from(pp.q());
    match branch {
        BoundBranch::Coprime => (
            Rational::from_integer(1 + &q - &top),
            Rational::from_integer(&top + &q - 1),
        ),
        BoundBranch::Divisible => (
            Rational::from_integer(2 - &top),
            Rational::new(&top + 1, 2).expect("nonzero"),
        ),
    }
}

/// `m = gcd(l−1, k−1) + 1`: the exponent whose Korselt set is the
/// intersection of those of `q^l` and `q^k`, away from `q^l`, `q^k` and `q^m`
/// (each excluded from its own set; `q^m` itself can lie in both others).
pub fn intersection_exponent(l: u64, k: u64) -> Result<u64> {
    for e in [l, k] {
        if e < 2 {
            return Err(Error::ExponentTooSmall(e));
        }
    }
    Ok((l - 1).gcd(&(k - 1)) + 1)
}

/// Lifts an integer `β` to the non-integral base `q + (β − q)/s`.
///
/// For `gcd(s, β − q) = 1`, `β` is an integer base exactly when the lift is
/// a base other than `q + (q^l − q)/s`, with one exception: `β = 0` is never
/// a base while its lift `q(s−1)/s` always is.
pub fn lift_base(pp: &PrimePower, beta: &BigInt, s: &BigInt) -> Result<Rational> {
    let q = BigInt::from(pp.q());
    if beta == &q {
        return Err(Error::Precondition(format!("beta = q = {q} lifts to an integer")));
    }
    if s < &BigInt::from(2) {
        return Err(Error::Precondition(format!("s must be at least 2, got {s}")));
    }
    let shift = beta - &q;
    if !s.gcd(&shift).is_one() {
        return Err(Error::Precondition(format!("gcd({s}, {shift}) != 1")));
    }
    Rational::new(&q * s + shift, s.clone())
}

/// Maps `α₁′q/α₂` to `α₂q/α₁′`; the two are members of the Korselt set of
/// `q^l` together or not at all.
pub fn mirror_base(pp: &PrimePower, alpha: &Rational) -> Result<Rational> {
    let q = BigInt::from(pp.q());
    if alpha.is_zero() {
        return Err(Error::Precondition("cannot mirror 0".into()));
    }
    let (quot, rem) = alpha.numer().div_rem(&q);
    if !rem.is_zero() {
        return Err(Error::Precondition(format!(
            "numerator {} is not divisible by {q}",
            alpha.numer()
        )));
    }
    Rational::new(alpha.denom() * &q, quot)
}

/// Smallest prime `q` with `α` outside the Korselt set of `q²`.
///
/// Any prime `q > α + α₂·|α² − α|` is a witness, so the search is finite;
/// reaching such a `q` without a witness is reported as an error.
pub fn witness_prime(alpha: &Rational) -> Result<u64> {
    witness_prime_with(alpha, &Budget::default())
}

pub fn witness_prime_with(alpha: &Rational, budget: &Budget) -> Result<u64> {
    if alpha.is_zero() || *alpha == Rational::one() {
        return Err(Error::Precondition(format!("{alpha} has no witness prime")));
    }
    let spread = (alpha * alpha - alpha.clone()).abs();
    let bound = alpha + &(Rational::from_integer(alpha.denom().clone()) * spread);
    let mut q = 2u64;
    let mut visited = 0u64;
    loop {
        let pp = PrimePower::new(q, 2)?;
        if !contains(&pp, alpha) {
            return Ok(q);
        }
        if Rational::from_integer(q) > bound {
            return Err(Error::Precondition(format!(
                "prime {q} above the bound {bound} admits {alpha}"
            )));
        }
        visited += 1;
        if visited > budget.max_search {
            return Err(Error::BudgetExceeded(format!(
                "witness search for {alpha} passed {} primes",
                budget.max_search
            )));
        }
        q = next_prime_u64(q)?;
    }
}

pub(crate) fn next_prime_u64(q: u64) -> Result<u64> {
    exactmath::next_prime(&BigInt::from(q))
        .to_u64()
        .ok_or_else(|| Error::BudgetExceeded("prime search left the 64-bit range".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn pp(q: u64, l: u64) -> PrimePower {
        PrimePower::new(q, l).unwrap()
    }

    #[test]
    fn prime_power_validation() {
        assert_eq!(pp(2, 3).value(), BigInt::from(8));
        assert_eq!(PrimePower::new(4, 2), Err(Error::NotPrime(BigInt::from(4))));
        assert_eq!(PrimePower::new(3, 1), Err(Error::ExponentTooSmall(1)));
        assert!(pp(3, 2).excludes(&r("9")));
        assert!(pp(3, 2).excludes(&r("0")));
        assert!(!pp(3, 2).excludes(&r("3")));
        assert!(!pp(3, 2).excludes(&r("-9")));
    }

    #[test]
    fn general_predicate_examples() {
        assert!(is_korselt(&BigInt::from(561), &r("1")).unwrap());
        assert!(is_korselt(&BigInt::from(8), &r("1/2")).unwrap());
        assert!(!is_korselt(&BigInt::from(8), &r("2")).unwrap());
        assert!(matches!(
            is_korselt(&BigInt::from(8), &r("8")),
            Err(Error::ExcludedBase { .. })
        ));
        assert!(is_korselt(&BigInt::from(8), &r("0")).is_err());
        assert!(is_korselt(&BigInt::from(1), &r("1")).is_err());
    }

    #[test]
    fn prime_power_predicate_examples() {
        assert!(is_prime_power_base(&pp(2, 3), &r("1/2")).unwrap());
        // 7 does not divide 3 * 26
        assert!(!is_prime_power_base(&pp(3, 4), &r("-1/2")).unwrap());
        // 7 divides 49
        assert!(is_prime_power_base(&pp(2, 4), &r("-1/3")).unwrap());
        assert!(!is_prime_power_base(&pp(2, 3), &r("2")).unwrap());
        assert!(is_prime_power_base(&pp(2, 3), &r("8")).is_err());
        assert!(!contains(&pp(2, 3), &r("8")));
    }

    #[test]
    fn pair_form_matches_reduced() {
        let n = BigInt::from(8);
        let (a, b) = (BigInt::from(1), BigInt::from(2));
        for c in [-3i64, -1, 2, 5] {
            let c = BigInt::from(c);
            assert_eq!(
                is_korselt_pair(&n, &(&a * &c), &(&b * &c)).unwrap(),
                is_korselt(&n, &r("1/2")).unwrap()
            );
        }
        assert!(is_korselt_pair(&n, &BigInt::from(1), &BigInt::from(0)).is_err());
    }

    #[test]
    fn bound_examples() {
        let show = |(lo, hi): (Rational, Rational)| format!("{lo}..{hi}");
        assert_eq!(show(base_bounds(&pp(3, 3), BoundBranch::Coprime)), "-5..11");
        assert_eq!(show(base_bounds(&pp(3, 3), BoundBranch::Divisible)), "-7..5");
        assert_eq!(show(base_bounds(&pp(2, 2), BoundBranch::Coprime)), "1..3");
    }

    #[test]
    fn intersection_exponent_examples() {
        assert_eq!(intersection_exponent(5, 7).unwrap(), 3);
        assert_eq!(intersection_exponent(4, 7).unwrap(), 4);
        for k in 2..20 {
            assert_eq!(intersection_exponent(2, k).unwrap(), 2);
        }
        assert!(intersection_exponent(1, 3).is_err());
    }

    #[test]
    fn lift_examples() {
        let b = |n: i64| BigInt::from(n);
        let a = lift_base(&pp(2, 3), &b(5), &b(2)).unwrap();
        assert_eq!(a, r("7/2"));
        assert!(contains(&pp(2, 3), &a));
        let a = lift_base(&pp(2, 3), &b(7), &b(2)).unwrap();
        assert_eq!(a, r("9/2"));
        assert!(!contains(&pp(2, 3), &a));
        let a = lift_base(&pp(7, 2), &b(8), &b(3)).unwrap();
        assert_eq!(a, r("22/3"));
        assert!(contains(&pp(7, 2), &a));
        assert!(lift_base(&pp(2, 3), &b(2), &b(3)).is_err());
        assert!(lift_base(&pp(2, 3), &b(4), &b(2)).is_err());
        assert!(lift_base(&pp(2, 3), &b(5), &b(1)).is_err());
    }

    #[test]
    fn lift_of_zero_is_a_member() {
        // beta = 0 is excluded from every Korselt set, yet q(s-1)/s is a base
        let a = lift_base(&pp(2, 3), &BigInt::from(0), &BigInt::from(3)).unwrap();
        assert_eq!(a, r("4/3"));
        assert!(contains(&pp(2, 3), &a));
    }

    #[test]
    fn mirror_examples() {
        let m = mirror_base(&pp(3, 5), &r("9/5")).unwrap();
        assert_eq!(m, r("5"));
        assert!(contains(&pp(3, 5), &r("9/5")) && contains(&pp(3, 5), &m));
        let m = mirror_base(&pp(2, 3), &r("4/3")).unwrap();
        assert_eq!(m, r("3"));
        assert!(contains(&pp(2, 3), &r("4/3")) && contains(&pp(2, 3), &m));
        let m = mirror_base(&pp(2, 3), &r("2")).unwrap();
        assert_eq!(m, r("2"));
        assert!(!contains(&pp(2, 3), &m));
        assert!(mirror_base(&pp(2, 3), &r("3/2")).is_err());
    }

    #[test]
    fn witness_examples() {
        assert_eq!(witness_prime(&r("2")).unwrap(), 2);
        assert_eq!(witness_prime(&r("1/2")).unwrap(), 2);
        // 3 is a base of 4 (2 - 3 = -1), and 3 = q is never a base of 9
        assert_eq!(witness_prime(&r("3")).unwrap(), 3);
        assert!(witness_prime(&r("0")).is_err());
        assert!(witness_prime(&r("1")).is_err());
    }
}
