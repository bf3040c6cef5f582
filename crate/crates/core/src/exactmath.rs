//! Arbitrary-precision integer and exact rational utilities.
//!
//! Everything here works on [`BigInt`] so that quantities such as `q^l - q`
//! never overflow. Primality is deterministic: a Miller-Rabin test with a
//! complete witness set below [`miller_rabin_limit`], trial division above.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default trial-division bound used by [`factorize`] and [`divisors`].
pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000_000;

/// Miller-Rabin with the first thirteen primes as witnesses is exact below
/// this value (3 317 044 064 679 887 385 961 981).
pub fn miller_rabin_limit() -> &'static BigInt {
    static LIMIT: OnceLock<BigInt> = OnceLock::new();
    LIMIT.get_or_init(|| BigInt::parse_bytes(b"3317044064679887385961981", 10).unwrap())
}

const WITNESSES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// A reduced fraction with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds the canonical form of `num/den`.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        reduce(num.into(), den.into())
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// The numerator of the reduced form (carries the sign).
    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// The reduced denominator, always at least 1.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Exact quotient; dividing by zero is an error.
    pub fn checked_div(&self, other: &Rational) -> Result<Rational> {
        if other.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(&self.0 / &other.0))
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    /// True when the value equals the integer `n`.
    pub fn is_integer_value(&self, n: &BigInt) -> bool {
        self.denom().is_one() && self.numer() == n
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `a` or `a/b` with an optional leading minus on `a`.
    fn from_str(s: &str) -> Result<Self> {
        let fail = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let text = s.trim();
        let (num_text, den_text) = match text.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (text, None),
        };
        let digits = num_text.strip_prefix('-').unwrap_or(num_text);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(fail("numerator must be an optionally negated decimal integer"));
        }
        let num: BigInt = num_text.parse().map_err(|_| fail("bad numerator"))?;
        let den: BigInt = match den_text {
            None => BigInt::one(),
            Some(d) => {
                if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(fail("denominator must be a positive decimal integer"));
                }
                d.parse().map_err(|_| fail("bad denominator"))?
            }
        };
        if den.is_zero() {
            return Err(fail("zero denominator"));
        }
        reduce(num, den)
    }
}

/// Prime factorization: primes strictly increasing, exponents at least 1.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactorList {
    factors: Vec<(BigInt, u32)>,
}

impl FactorList {
    pub fn factors(&self) -> &[(BigInt, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.factors.iter().map(|(p, _)| p)
    }

    /// Multiplies the factorization back out.
    pub fn product(&self) -> BigInt {
        self.factors
            .iter()
            .fold(BigInt::one(), |acc, (p, e)| acc * num_traits::pow(p.clone(), *e as usize))
    }

    fn push(&mut self, p: BigInt, e: u32) {
        if e > 0 {
            self.factors.push((p, e));
        }
    }
}

impl fmt::Display for FactorList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Greatest common divisor of `|a|` and `|b|`; `gcd(0, 0) = 0`.
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

/// Canonical rational `num/den`: positive denominator, coprime parts.
pub fn reduce(num: BigInt, den: BigInt) -> Result<Rational> {
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(Rational(BigRational::new(num, den)))
}

/// Mathematical floor of `a/b` for `b >= 1`.
pub fn floor_div(a: &BigInt, b: &BigInt) -> Result<BigInt> {
    require_positive("divisor", b)?;
    Ok(a.div_floor(b))
}

/// Mathematical ceiling of `a/b` for `b >= 1`.
pub fn ceil_div(a: &BigInt, b: &BigInt) -> Result<BigInt> {
    require_positive("divisor", b)?;
    Ok(-((-a).div_floor(b)))
}

pub(crate) fn require_positive(what: &'static str, n: &BigInt) -> Result<()> {
    if n.sign() != Sign::Plus {
        return Err(Error::NonPositive { what, value: n.clone() });
    }
    Ok(())
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality for every `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn miller_rabin_big(n: &BigInt) -> bool {
    let one = BigInt::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'witness: for &a in &WITNESSES {
        let a = BigInt::from(a);
        if (n % &a).is_zero() {
            return n == &a;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigInt::from(2), n);
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// True iff `n` is a prime. Exact for every input; inputs beyond the
/// Miller-Rabin limit fall back to unbounded trial division.
pub fn is_prime(n: &BigInt) -> bool {
    is_prime_within(n, u64::MAX).expect("unbounded trial division always concludes")
}

/// Like [`is_prime`] but gives up with [`Error::Unfactored`] when trial
/// division beyond the Miller-Rabin limit would pass `bound`.
pub fn is_prime_within(n: &BigInt, bound: u64) -> Result<bool> {
    if n.sign() != Sign::Plus {
        return Ok(false);
    }
    if let Some(v) = n.to_u64() {
        return Ok(is_prime_u64(v));
    }
    if n < miller_rabin_limit() {
        return Ok(miller_rabin_big(n));
    }
    let mut p: u64 = 2;
    loop {
        let pb = BigInt::from(p);
        if &pb * &pb > *n {
            return Ok(true);
        }
        if p > bound {
            return Err(Error::Unfactored { n: n.clone(), bound });
        }
        if (n % &pb).is_zero() {
            return Ok(false);
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: &BigInt) -> BigInt {
    let mut c = if n < &BigInt::from(2) { BigInt::from(2) } else { n + 1 };
    while !is_prime(&c) {
        c += 1;
    }
    c
}

/// Complete factorization of `n >= 2` with the default trial bound.
pub fn factorize(n: &BigInt) -> Result<FactorList> {
    factorize_with_bound(n, DEFAULT_FACTOR_BOUND)
}

/// Complete factorization of `n >= 2`, trial dividing by candidates up to
/// `bound`. A leftover cofactor is accepted only when it is provably prime;
/// otherwise the call fails with [`Error::Unfactored`].
pub fn factorize_with_bound(n: &BigInt, bound: u64) -> Result<FactorList> {
    if n < &BigInt::from(2) {
        return Err(Error::Precondition(format!("factorize needs n >= 2, got {n}")));
    }
    factor_positive(n, bound)
}

fn factor_positive(n: &BigInt, bound: u64) -> Result<FactorList> {
    let mut out = FactorList::default();
    let mut m = n.clone();
    let mut p: u64 = 2;

    // Big phase: cofactor does not fit in a machine word.
    while m.to_u64().is_none() {
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            out.push(m, 1);
            return Ok(out);
        }
        if p > bound {
            return finish_unfactored(n, m, bound, out);
        }
        let mut e = 0;
        while (&m % &pb).is_zero() {
            m /= &pb;
            e += 1;
        }
        out.push(pb, e);
        p = if p == 2 { 3 } else { p + 2 };
    }

    let mut w = m.to_u64().unwrap();
    while w > 1 {
        if (p as u128) * (p as u128) > w as u128 {
            out.push(BigInt::from(w), 1);
            return Ok(out);
        }
        if p > bound {
            return finish_unfactored(n, BigInt::from(w), bound, out);
        }
        let mut e = 0;
        while w.is_multiple_of(p) {
            w /= p;
            e += 1;
        }
        out.push(BigInt::from(p), e);
        p = if p == 2 { 3 } else { p + 2 };
    }
    Ok(out)
}

fn finish_unfactored(
    n: &BigInt,
    cofactor: BigInt,
    bound: u64,
    mut out: FactorList,
) -> Result<FactorList> {
    if cofactor < *miller_rabin_limit() && is_prime_within(&cofactor, bound)? {
        out.push(cofactor, 1);
        return Ok(out);
    }
    Err(Error::Unfactored { n: n.clone(), bound })
}

/// Factorization that also accepts `n = 1` (empty list).
pub(crate) fn factor_any_positive(n: &BigInt, bound: u64) -> Result<FactorList> {
    require_positive("n", n)?;
    if n.is_one() {
        return Ok(FactorList::default());
    }
    factor_positive(n, bound)
}

/// Positive divisors of `n >= 1`, ascending.
pub fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    divisors_with_bound(n, DEFAULT_FACTOR_BOUND)
}

pub fn divisors_with_bound(n: &BigInt, bound: u64) -> Result<Vec<BigInt>> {
    let fl = factor_any_positive(n, bound)?;
    Ok(divisors_of(&fl))
}

/// All divisors generated from a factorization, ascending.
pub fn divisors_of(fl: &FactorList) -> Vec<BigInt> {
    let mut out = vec![BigInt::one()];
    for (p, e) in fl.factors() {
        let len = out.len();
        let mut pk = BigInt::one();
        for _ in 0..*e {
            pk *= p;
            for i in 0..len {
                let d = &out[i] * &pk;
                out.push(d);
            }
        }
    }
    out.sort();
    out
}

/// Number of positive divisors of `n >= 1`.
pub fn sigma0(n: &BigInt) -> Result<BigInt> {
    let fl = factor_any_positive(n, DEFAULT_FACTOR_BOUND)?;
    Ok(fl
        .factors()
        .iter()
        .fold(BigInt::one(), |acc, (_, e)| acc * BigInt::from(*e + 1)))
}

/// Euler's totient of `n >= 1`.
pub fn euler_phi(n: &BigInt) -> Result<BigInt> {
    euler_phi_with_bound(n, DEFAULT_FACTOR_BOUND)
}

pub fn euler_phi_with_bound(n: &BigInt, bound: u64) -> Result<BigInt> {
    let fl = factor_any_positive(n, bound)?;
    Ok(fl.factors().iter().fold(BigInt::one(), |acc, (p, e)| {
        acc * num_traits::pow(p.clone(), (*e - 1) as usize) * (p - 1)
    }))
}

/// `q^e` as a big integer.
pub fn pow(q: u64, e: u64) -> BigInt {
    num_traits::pow(BigInt::from(q), e as usize)
}

/// True iff `d` divides `n`, with the convention that 0 divides only 0.
pub fn divides(d: &BigInt, n: &BigInt) -> bool {
    if d.is_zero() {
        n.is_zero()
    } else {
        (n % d).is_zero()
    }
}
