//! Brute-force reference implementations.
//!
//! These apply the definition literally: find the prime divisors of `N` by
//! plain trial division and test `α₂p − α₁ | α₂N − α₁` for each one. They
//! share nothing with the closed forms beyond big-integer arithmetic and are
//! deliberately slow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::Rational;
use crate::sets::KorseltSet;

/// A finite box of reduced rationals `a/b` with `|a| <= max_num_abs` and
/// `1 <= b <= max_den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanBox {
    pub max_num_abs: u64,
    pub max_den: u64,
}

impl ScanBox {
    pub fn new(max_num_abs: u64, max_den: u64) -> Self {
        ScanBox { max_num_abs, max_den }
    }

    pub fn contains(&self, alpha: &Rational) -> bool {
        alpha.numer().abs() <= BigInt::from(self.max_num_abs)
            && alpha.denom() <= &BigInt::from(self.max_den)
    }
}

/// Prime divisors of `n >= 2` by naive trial division.
fn naive_prime_divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut m = n.clone();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        if (&m % &p).is_zero() {
            out.push(p.clone());
            while (&m % &p).is_zero() {
                m /= &p;
            }
        }
        p += 1;
    }
    if m > BigInt::one() {
        out.push(m);
    }
    out
}

fn literal_test(primes: &[BigInt], n: &BigInt, a: &BigInt, b: &BigInt) -> bool {
    let rhs = b * n - a;
    primes.iter().all(|p| {
        let lhs = b * p - a;
        if lhs.is_zero() {
            rhs.is_zero()
        } else {
            (&rhs % &lhs).is_zero()
        }
    })
}

fn check_n(n: &BigInt) -> Result<()> {
    if n < &BigInt::from(2) {
        return Err(Error::Precondition(format!("N must be at least 2, got {n}")));
    }
    Ok(())
}

/// Literal membership test of `α` for an arbitrary `N >= 2`.
pub fn brute_is_korselt(n: &BigInt, alpha: &Rational) -> Result<bool> {
    check_n(n)?;
    if alpha.is_zero() || alpha.is_integer_value(n) {
        return Err(Error::ExcludedBase { alpha: alpha.clone(), n: n.clone() });
    }
    let primes = naive_prime_divisors(n);
    Ok(literal_test(&primes, n, alpha.numer(), alpha.denom()))
}

/// Every reduced `a/b` in `scan` (other than `0` and `N`) that is a base of `N`.
pub fn brute_ks_box(n: &BigInt, scan: ScanBox) -> Result<KorseltSet> {
    check_n(n)?;
    let primes = naive_prime_divisors(n);
    let bound = scan.max_num_abs as i64;
    let mut members = Vec::new();
    for b in 1..=scan.max_den as i64 {
        let bb = BigInt::from(b);
        for a in -bound..=bound {
            if a == 0 || a.gcd(&b) != 1 {
                continue;
            }
            let aa = BigInt::from(a);
            if b == 1 && &aa == n {
                continue;
            }
            if literal_test(&primes, n, &aa, &bb) {
                members.push(Rational::new(aa, bb.clone())?);
            }
        }
    }
    Ok(KorseltSet::from_members(members))
}

/// Integer bases of `N` in `[−radius, radius]`.
pub fn brute_ks_z(n: &BigInt, radius: u64) -> Result<KorseltSet> {
    brute_ks_box(n, ScanBox::new(radius, 1))
}
