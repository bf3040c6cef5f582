//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. All comparisons are exact.

use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;

use korselt::constructors::{
    eligible_generators, feasibility_bound, feasible_primes, generate_base,
    prime_power_for_base_coprime, prime_power_for_base_dividing, reciprocal_pair_holds, Blocker,
    DividingOutcome, UnitSign,
};
use korselt::exactmath::{is_prime_u64, pow, sigma0};
use korselt::oracle::{brute_is_korselt, brute_ks_box, brute_ks_z, ScanBox};
use korselt::prime_power::{
    base_bounds, contains, intersection_exponent, lift_base, BoundBranch, PrimePower,
};
use korselt::sets::{
    bounded_korselt_set, integer_korselt_set, integer_korselt_weight, interval_korselt_set,
    interval_set_is_empty,
};
use korselt::{Error, Rational};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn primes_below(n: u64) -> Vec<u64> {
    (2..n).filter(|&p| is_prime_u64(p)).collect()
}

fn pp(q: u64, l: u64) -> PrimePower {
    PrimePower::new(q, l).expect("valid prime power")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn weight_formula() -> Verdict {
    let mut checked = 0;
    for q in primes_below(50) {
        for l in 2..=6 {
            let p = pp(q, l);
            let formula = 4 * sigma0(&p.reduced_shift()).map_err(|e| e.to_string())? - 2;
            let closed = integer_korselt_weight(&p).map_err(|e| e.to_string())?;
            let counted = integer_korselt_set(&p).map_err(|e| e.to_string())?.weight();
            ensure(closed == formula && BigInt::from(counted) == formula, || {
                format!("{p}: kw_z={closed} formula={formula} |ks_z|={counted}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} prime powers"))
}

fn oracle_equivalence() -> Verdict {
    let mut members = 0;
    for q in [2u64, 3, 5, 7, 11, 13] {
        for l in 2..=4 {
            let p = pp(q, l);
            let n = p.value();
            let nu = u64::try_from(&n).unwrap();
            let closed = integer_korselt_set(&p).map_err(|e| e.to_string())?;
            let brute = brute_ks_z(&n, nu).map_err(|e| e.to_string())?;
            ensure(closed == brute, || format!("{p}: integer sets differ"))?;
            let scan = ScanBox::new(3 * nu, 6);
            let closed = bounded_korselt_set(&p, 6).map_err(|e| e.to_string())?.filtered(|a| scan.contains(a));
            let brute = brute_ks_box(&n, scan).map_err(|e| e.to_string())?;
            ensure(closed == brute, || format!("{p}: box sets differ"))?;
            members += closed.weight();
        }
    }
    Ok(format!("18 prime powers, {members} box members"))
}

fn interval_emptiness() -> Verdict {
    for q in primes_below(100) {
        let set = interval_korselt_set(&pp(q, 2)).map_err(|e| e.to_string())?;
        ensure(set.is_empty(), || format!("{q}^2 has interval members {:?}", set.members()))?;
    }
    for q in primes_below(30) {
        for l in 3..=8 {
            let empty = interval_set_is_empty(&pp(q, l)).map_err(|e| e.to_string())?;
            ensure(!empty, || format!("{q}^{l} has an empty interval set"))?;
        }
    }
    Ok("empty for l = 2, q < 100; nonempty for 3 <= l <= 8, q < 30".into())
}

fn bound_attainment() -> Verdict {
    let mut skipped = Vec::new();
    for q in primes_below(30) {
        for l in 2..=6 {
            let p = pp(q, l);
            let (qb, top) = (BigInt::from(q), pow(q, l - 1));
            let candidates = [
                Rational::new(p.value() + &qb, 2).unwrap(),
                Rational::from_integer(2 * &qb - p.value()),
                Rational::from_integer(&top + &qb - 1),
                Rational::from_integer(1 + &qb - &top),
            ];
            for c in candidates {
                if p.excludes(&c) {
                    skipped.push(format!("{c} for {p}"));
                    continue;
                }
                ensure(contains(&p, &c), || format!("{c} is not a member for {p}"))?;
            }
            let (lo1, hi1) = base_bounds(&p, BoundBranch::Coprime);
            let (lo0, hi0) = base_bounds(&p, BoundBranch::Divisible);
            let qr = Rational::from_integer(q);
            for a in bounded_korselt_set(&p, 4).map_err(|e| e.to_string())?.iter() {
                if a.numer().gcd(&qb) == BigInt::from(1) {
                    ensure(lo1 <= *a && *a <= hi1, || format!("{a} breaks the coprime bound for {p}"))?;
                } else {
                    let s = a.checked_div(&qr).unwrap();
                    ensure(lo0 <= s && s <= hi0, || format!("{a} breaks the divisible bound for {p}"))?;
                }
            }
        }
    }
    Ok(format!("excluded values skipped: {}", skipped.join(", ")))
}

fn structure_laws() -> Verdict {
    let scan = ScanBox::new(60, 6);
    let mut excluded = Vec::new();
    for q in [2u64, 3, 5] {
        for (l, k) in [(5u64, 7u64), (4, 7), (3, 5)] {
            let m = intersection_exponent(l, k).map_err(|e| e.to_string())?;
            let sl = brute_ks_box(&pp(q, l).value(), scan).map_err(|e| e.to_string())?;
            let sk = brute_ks_box(&pp(q, k).value(), scan).map_err(|e| e.to_string())?;
            let sm = brute_ks_box(&pp(q, m).value(), scan).map_err(|e| e.to_string())?;
            // q^l, q^k and q^m are each excluded from their own set
            let powers = [pp(q, l), pp(q, k), pp(q, m)];
            let away = |a: &Rational| powers.iter().all(|p| !p.excludes(a));
            let both = sl.filtered(|a| sk.contains(a) && away(a));
            let sm = sm.filtered(|a| away(a));
            ensure(both == sm, || format!("q={q}: KS(q^{l}) ∩ KS(q^{k}) != KS(q^{m}) on the box"))?;
            for p in &powers {
                let v = Rational::from_integer(p.value());
                if scan.contains(&v) && sl.contains(&v) && sk.contains(&v) {
                    excluded.push(format!("{v} (q={q}, l={l}, k={k})"));
                }
            }
        }
        for l in 2..=9u64 {
            for k in 2..=l {
                if (l - 1) % (k - 1) != 0 {
                    continue;
                }
                let big = pp(q, l);
                for a in bounded_korselt_set(&pp(q, k), 6).map_err(|e| e.to_string())?.iter() {
                    if big.excludes(a) {
                        continue;
                    }
                    ensure(contains(&big, a), || format!("{a} in KS({q}^{k}) but not KS({q}^{l})"))?;
                }
            }
        }
    }
    Ok(format!(
        "intersection on box (|a| <= 60, b <= 6) away from q^l, q^k, q^m; in both but excluded from KS(q^m): {}; inclusion up to l = 9",
        excluded.join(", ")
    ))
}

fn lifting() -> Verdict {
    let mut lifts = 0;
    for q in [2u64, 3, 5, 7] {
        for l in [2u64, 3] {
            let p = pp(q, l);
            let qb = BigInt::from(q);
            for beta in integer_korselt_set(&p).map_err(|e| e.to_string())?.iter() {
                let beta = beta.numer().clone();
                for s in 2..=7i64 {
                    let s = BigInt::from(s);
                    if (&beta - &qb).gcd(&s) != BigInt::from(1) {
                        continue;
                    }
                    let alpha = lift_base(&p, &beta, &s).map_err(|e| e.to_string())?;
                    let beta_in = contains(&p, &Rational::from_integer(beta.clone()));
                    ensure(contains(&p, &alpha) == beta_in, || {
                        format!("lift {alpha} of {beta} with s={s} for {p}")
                    })?;
                    lifts += 1;
                }
            }
        }
    }
    Ok(format!("{lifts} lifts"))
}

fn generators() -> Verdict {
    let mut generated = 0;
    for q in primes_below(14) {
        for l in 2..=8 {
            let p = pp(q, l);
            for d in eligible_generators(l, 50).map_err(|e| e.to_string())? {
                let g = generate_base(&p, &BigInt::from(d)).map_err(|e| format!("{p}, d={d}: {e}"))?;
                let ok = brute_is_korselt(&p.value(), &g.value).map_err(|e| e.to_string())?;
                ensure(ok, || format!("{p}, d={d}: {} fails the oracle", g.value))?;
                generated += 1;
            }
        }
    }
    let mut constructed = 0;
    for a in -30i64..=30 {
        for b in 1..=30i64 {
            if a == 0 || a.gcd(&b) != 1 {
                continue;
            }
            let alpha = Rational::new(a, b).unwrap();
            let c = prime_power_for_base_coprime(&alpha).map_err(|e| format!("{alpha}: {e}"))?;
            let ok = brute_is_korselt(&pow(c.q, c.l), &alpha).map_err(|e| e.to_string())?;
            ensure(ok, || format!("{alpha} fails the oracle for {}^{}", c.q, c.l))?;
            constructed += 1;
        }
    }
    let six_fifths = Rational::new(6, 5).unwrap();
    match prime_power_for_base_dividing(&six_fifths).map_err(|e| e.to_string())? {
        DividingOutcome::Infeasible(report) => {
            let blocked: Vec<_> = report.blocked.iter().map(|b| (b.q.clone(), b.blocker.clone())).collect();
            let expected = vec![
                (BigInt::from(2), Blocker::DividesGap { gap: BigInt::from(2) }),
                (BigInt::from(3), Blocker::DividesGap { gap: BigInt::from(3) }),
            ];
            ensure(blocked == expected, || format!("6/5 report {blocked:?}"))?;
        }
        other => return Err(format!("6/5 gave {other:?}")),
    }
    for s in ["4/3", "9/5"] {
        let alpha: Rational = s.parse().unwrap();
        match prime_power_for_base_dividing(&alpha).map_err(|e| e.to_string())? {
            DividingOutcome::Constructed(c) => {
                let ok = brute_is_korselt(&pow(c.q, c.l), &alpha).map_err(|e| e.to_string())?;
                ensure(ok, || format!("{s} fails the oracle for {}^{}", c.q, c.l))?;
            }
            other => return Err(format!("{s} gave {other:?}")),
        }
    }
    Ok(format!("{generated} generated bases, {constructed} coprime constructions, dividing route as documented"))
}

fn reciprocity() -> Verdict {
    let primes = primes_below(24);
    let mut pairs = 0;
    for &p in &primes {
        for &q in &primes {
            if p == q {
                continue;
            }
            for l in 2..=8 {
                let (x, y) = reciprocal_pair_holds(p, q, l, UnitSign::Positive).map_err(|e| e.to_string())?;
                ensure(x == y, || format!("+1: p={p} q={q} l={l} gives ({x}, {y})"))?;
                pairs += 1;
            }
            for l in (3..=9).step_by(2) {
                let (x, y) = reciprocal_pair_holds(p, q, l, UnitSign::Negative).map_err(|e| e.to_string())?;
                ensure(x == y, || format!("-1: p={p} q={q} l={l} gives ({x}, {y})"))?;
                pairs += 1;
            }
        }
    }
    let even = reciprocal_pair_holds(2, 3, 4, UnitSign::Negative).map_err(|e| e.to_string())?;
    ensure(even == (false, true), || format!("(2, 3, 4), sign -1 gives {even:?}"))?;
    Ok(format!("{pairs} pairs; (2, 3, 4) with sign -1 gives (false, true)"))
}

fn feasibility() -> Verdict {
    let mut notes = Vec::new();
    for s in ["1/2", "3", "-1"] {
        let alpha: Rational = s.parse().unwrap();
        for l in [2u64, 3] {
            let scan_to = match feasibility_bound(&alpha, l) {
                Ok(b) => u64::try_from((b * Rational::from_integer(10)).floor()).unwrap_or(0),
                Err(Error::Unbounded(_)) => {
                    // every prime admits the base, so the scan has no natural end
                    let admitted = primes_below(1000).into_iter().all(|q| {
                        brute_is_korselt(&pow(q, l), &alpha).unwrap_or(false)
                    });
                    ensure(admitted, || format!("{s}, l={l}: reported unbounded but a prime rejects it"))?;
                    ensure(matches!(feasible_primes(&alpha, l), Err(Error::Unbounded(_))), || {
                        format!("{s}, l={l}: expected an unbounded report")
                    })?;
                    notes.push(format!("{s} at l={l} unbounded (all primes < 1000 admit it)"));
                    continue;
                }
                Err(e) => return Err(format!("{s}, l={l}: {e}")),
            };
            let listed = feasible_primes(&alpha, l).map_err(|e| format!("{s}, l={l}: {e}"))?;
            let scanned: Vec<u64> = primes_below(scan_to + 1)
                .into_iter()
                .filter(|&q| alpha.numer().gcd(&BigInt::from(q)) == BigInt::from(1))
                .filter(|&q| {
                    let n = pow(q, l);
                    !alpha.is_integer_value(&n) && brute_is_korselt(&n, &alpha).unwrap()
                })
                .collect();
            ensure(listed == scanned, || format!("{s}, l={l}: {listed:?} vs scan {scanned:?}"))?;
            notes.push(format!("{s} at l={l} -> {listed:?}"));
        }
    }
    Ok(notes.join("; "))
}

fn cli_determinism() -> Verdict {
    let runs: [&[&str]; 2] = [
        &["oracle-diff", "--primes-below", "50", "--l-min", "2", "--l-max", "6", "--checks", "weight", "--format", "json-lines"],
        &["oracle-diff", "--primes-below", "14", "--l-min", "2", "--l-max", "4", "--checks", "z,q", "--max-den", "6", "--format", "json-lines"],
    ];
    let strip = |out: &[u8]| -> Vec<String> {
        String::from_utf8_lossy(out)
            .lines()
            .map(|l| l.split(",\"timing_ms\"").next().unwrap().to_string())
            .collect()
    };
    let mut records = 0;
    for args in runs {
        let mut seen = Vec::new();
        for _ in 0..2 {
            let o = Command::new(env!("CARGO_BIN_EXE_korselt"))
                .args(args)
                .output()
                .map_err(|e| e.to_string())?;
            ensure(o.status.code() == Some(0), || {
                format!("{args:?} exited {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr))
            })?;
            seen.push(strip(&o.stdout));
        }
        ensure(seen[0] == seen[1], || format!("{args:?} output differs between runs"))?;
        records += seen[0].len();
    }
    Ok(format!("{records} records, exit 0, identical across runs"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("weight formula", weight_formula),
        ("oracle equivalence", oracle_equivalence),
        ("interval emptiness iff l = 2", interval_emptiness),
        ("bound attainment and soundness", bound_attainment),
        ("intersection and inclusion laws", structure_laws),
        ("lifting", lifting),
        ("generators and constructions", generators),
        ("reciprocity", reciprocity),
        ("feasible primes", feasibility),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = check();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {}: PASS [{name}] ({secs:.1}s) {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL [{name}] ({secs:.1}s) {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
