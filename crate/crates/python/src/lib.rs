//! Python bindings. Rationals go in as `int`, `fractions.Fraction` or an
//! `"a/b"` string and come back as `fractions.Fraction`.

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::sync::PyOnceLock;
use pyo3::types::{PyDict, PyList, PyString};

use korselt::constructors::{self, Construction, DividingOutcome, GeneratedBase, UnitSign};
use korselt::oracle::{self, ScanBox};
use korselt::prime_power::{self, BoundBranch};
use korselt::sets::{self, KorseltSet};
use korselt::{Error, Rational};

create_exception!(pykorselt, KorseltError, PyException);

fn err(e: Error) -> PyErr {
    KorseltError::new_err(e.to_string())
}

fn rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if let Ok(s) = obj.cast::<PyString>() {
        return s.to_str()?.parse().map_err(err);
    }
    let num: BigInt = obj.getattr("numerator")?.extract()?;
    let den: BigInt = obj.getattr("denominator")?.extract()?;
    Rational::new(num, den).map_err(err)
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    static CLS: PyOnceLock<Py<PyAny>> = PyOnceLock::new();
    let cls = CLS.get_or_try_init(py, || -> PyResult<_> {
        Ok(py.import("fractions")?.getattr("Fraction")?.unbind())
    })?;
    cls.bind(py).call1((r.numer().clone(), r.denom().clone()))
}

fn fractions<'py, 'a>(
    py: Python<'py>,
    items: impl IntoIterator<Item = &'a Rational>,
) -> PyResult<Bound<'py, PyList>> {
    let list = PyList::empty(py);
    for r in items {
        list.append(fraction(py, r)?)?;
    }
    Ok(list)
}

fn set_list<'py>(py: Python<'py>, set: &KorseltSet) -> PyResult<Bound<'py, PyList>> {
    fractions(py, set.iter())
}

/// A prime power `q^l` with `q` prime and `l >= 2`.
#[pyclass(name = "PrimePower", module = "pykorselt", frozen)]
struct PyPrimePower {
    inner: prime_power::PrimePower,
}

#[pymethods]
impl PyPrimePower {
    #[new]
    fn new(q: u64, l: u64) -> PyResult<Self> {
        Ok(PyPrimePower { inner: prime_power::PrimePower::new(q, l).map_err(err)? })
    }

    #[getter]
    fn q(&self) -> u64 {
        self.inner.q()
    }

    #[getter]
    fn l(&self) -> u64 {
        self.inner.l()
    }

    #[getter]
    fn value(&self) -> BigInt {
        self.inner.value()
    }

    fn contains(&self, alpha: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(prime_power::contains(&self.inner, &rational(alpha)?))
    }

    fn __contains__(&self, alpha: &Bound<'_, PyAny>) -> PyResult<bool> {
        self.contains(alpha)
    }

    fn __repr__(&self) -> String {
        format!("PrimePower({}, {})", self.inner.q(), self.inner.l())
    }
}

/// A verified prime power admitting `base`.
#[pyclass(name = "Construction", module = "pykorselt", frozen)]
struct PyConstruction {
    inner: Construction,
}

#[pymethods]
impl PyConstruction {
    #[getter]
    fn base<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.base)
    }

    #[getter]
    fn q(&self) -> u64 {
        self.inner.q
    }

    #[getter]
    fn l(&self) -> u64 {
        self.inner.l
    }

    #[getter]
    fn route(&self) -> String {
        self.inner.route.to_string()
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!("Construction(base={}, q={}, l={}, route={})", c.base, c.q, c.l, c.route)
    }
}

fn pp(q: u64, l: u64) -> PyResult<prime_power::PrimePower> {
    prime_power::PrimePower::new(q, l).map_err(err)
}

#[pyfunction]
fn is_korselt(n: BigInt, alpha: &Bound<'_, PyAny>) -> PyResult<bool> {
    prime_power::is_korselt(&n, &rational(alpha)?).map_err(err)
}

#[pyfunction]
fn is_prime_power_base(q: u64, l: u64, alpha: &Bound<'_, PyAny>) -> PyResult<bool> {
    prime_power::is_prime_power_base(&pp(q, l)?, &rational(alpha)?).map_err(err)
}

#[pyfunction]
fn integer_korselt_set(py: Python<'_>, q: u64, l: u64) -> PyResult<Bound<'_, PyList>> {
    set_list(py, &sets::integer_korselt_set(&pp(q, l)?).map_err(err)?)
}

#[pyfunction]
fn integer_korselt_weight(q: u64, l: u64) -> PyResult<BigInt> {
    sets::integer_korselt_weight(&pp(q, l)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (q, l, max_den = 10))]
fn bounded_korselt_set(py: Python<'_>, q: u64, l: u64, max_den: u64) -> PyResult<Bound<'_, PyList>> {
    set_list(py, &sets::bounded_korselt_set(&pp(q, l)?, max_den).map_err(err)?)
}

#[pyfunction]
fn interval_korselt_set(py: Python<'_>, q: u64, l: u64) -> PyResult<Bound<'_, PyList>> {
    set_list(py, &sets::interval_korselt_set(&pp(q, l)?).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (q, l, branch = "coprime"))]
fn base_bounds<'py>(
    py: Python<'py>,
    q: u64,
    l: u64,
    branch: &str,
) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let b = match branch {
        "coprime" => BoundBranch::Coprime,
        "divisible" => BoundBranch::Divisible,
        other => return Err(KorseltError::new_err(format!("unknown branch {other:?}"))),
    };
    let (lo, hi) = prime_power::base_bounds(&pp(q, l)?, b);
    Ok((fraction(py, &lo)?, fraction(py, &hi)?))
}

#[pyfunction]
fn intersection_exponent(l: u64, k: u64) -> PyResult<u64> {
    prime_power::intersection_exponent(l, k).map_err(err)
}

#[pyfunction]
fn lift_base(py: Python<'_>, q: u64, l: u64, beta: BigInt, s: BigInt) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &prime_power::lift_base(&pp(q, l)?, &beta, &s).map_err(err)?)
}

#[pyfunction]
fn mirror_base<'py>(py: Python<'py>, q: u64, l: u64, alpha: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &prime_power::mirror_base(&pp(q, l)?, &rational(alpha)?).map_err(err)?)
}

#[pyfunction]
fn witness_prime(alpha: &Bound<'_, PyAny>) -> PyResult<u64> {
    prime_power::witness_prime(&rational(alpha)?).map_err(err)
}

#[pyfunction]
fn eligible_generators(l: u64, bound: u64) -> PyResult<Vec<u64>> {
    constructors::eligible_generators(l, bound).map_err(err)
}

fn generated<'py>(py: Python<'py>, g: &GeneratedBase) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("d", g.d.clone())?;
    d.set_item("case", g.case.to_string())?;
    d.set_item("m", g.m.clone())?;
    d.set_item("value", fraction(py, &g.value)?)?;
    Ok(d)
}

/// The base generated by `d`; with `m` omitted the least working `m >= 1`.
#[pyfunction]
#[pyo3(signature = (q, l, d, m = None))]
fn generate_base(py: Python<'_>, q: u64, l: u64, d: BigInt, m: Option<BigInt>) -> PyResult<Bound<'_, PyDict>> {
    let p = pp(q, l)?;
    let g = match m {
        Some(m) => constructors::bases_from_divisor(&p, &d, &m),
        None => constructors::generate_base(&p, &d),
    }
    .map_err(err)?;
    generated(py, &g)
}

#[pyfunction]
fn prime_power_for_base_coprime(alpha: &Bound<'_, PyAny>) -> PyResult<PyConstruction> {
    let inner = constructors::prime_power_for_base_coprime(&rational(alpha)?).map_err(err)?;
    Ok(PyConstruction { inner })
}

/// A `Construction`, or a list of `(q, reason)` pairs when every prime
/// divisor of the numerator is blocked.
#[pyfunction]
fn prime_power_for_base_dividing<'py>(py: Python<'py>, alpha: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    match constructors::prime_power_for_base_dividing(&rational(alpha)?).map_err(err)? {
        DividingOutcome::Constructed(inner) => Ok(Bound::new(py, PyConstruction { inner })?.into_any()),
        DividingOutcome::Infeasible(report) => {
            let list = PyList::empty(py);
            for b in &report.blocked {
                list.append((b.q.clone(), b.to_string()))?;
            }
            Ok(list.into_any())
        }
    }
}

#[pyfunction]
fn base_family(alpha: &Bound<'_, PyAny>, count: usize) -> PyResult<Vec<PyConstruction>> {
    let fam = constructors::base_family(&rational(alpha)?, count).map_err(err)?;
    Ok(fam.into_iter().map(|inner| PyConstruction { inner }).collect())
}

#[pyfunction]
fn unit_fraction_bases(py: Python<'_>, q: u64, l: u64) -> PyResult<Bound<'_, PyList>> {
    let v = constructors::unit_fraction_bases(&pp(q, l)?).map_err(err)?;
    fractions(py, v.iter())
}

#[pyfunction]
#[pyo3(signature = (p, q, l, sign = 1))]
fn reciprocal_pair_holds(p: u64, q: u64, l: u64, sign: i64) -> PyResult<(bool, bool)> {
    let s = match sign {
        1 => UnitSign::Positive,
        -1 => UnitSign::Negative,
        other => return Err(KorseltError::new_err(format!("sign must be 1 or -1, got {other}"))),
    };
    constructors::reciprocal_pair_holds(p, q, l, s).map_err(err)
}

#[pyfunction]
fn feasible_primes(alpha: &Bound<'_, PyAny>, l: u64) -> PyResult<Vec<u64>> {
    constructors::feasible_primes(&rational(alpha)?, l).map_err(err)
}

#[pyfunction]
fn brute_is_korselt(n: BigInt, alpha: &Bound<'_, PyAny>) -> PyResult<bool> {
    oracle::brute_is_korselt(&n, &rational(alpha)?).map_err(err)
}

#[pyfunction]
fn brute_ks_box(py: Python<'_>, n: BigInt, max_num_abs: u64, max_den: u64) -> PyResult<Bound<'_, PyList>> {
    set_list(py, &oracle::brute_ks_box(&n, ScanBox::new(max_num_abs, max_den)).map_err(err)?)
}

#[pymodule]
fn pykorselt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("KorseltError", m.py().get_type::<KorseltError>())?;
    m.add_class::<PyPrimePower>()?;
    m.add_class::<PyConstruction>()?;
    m.add_function(wrap_pyfunction!(is_korselt, m)?)?;
    m.add_function(wrap_pyfunction!(is_prime_power_base, m)?)?;
    m.add_function(wrap_pyfunction!(integer_korselt_set, m)?)?;
    m.add_function(wrap_pyfunction!(integer_korselt_weight, m)?)?;
    m.add_function(wrap_pyfunction!(bounded_korselt_set, m)?)?;
    m.add_function(wrap_pyfunction!(interval_korselt_set, m)?)?;
    m.add_function(wrap_pyfunction!(base_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(intersection_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(lift_base, m)?)?;
    m.add_function(wrap_pyfunction!(mirror_base, m)?)?;
    m.add_function(wrap_pyfunction!(witness_prime, m)?)?;
    m.add_function(wrap_pyfunction!(eligible_generators, m)?)?;
    m.add_function(wrap_pyfunction!(generate_base, m)?)?;
    m.add_function(wrap_pyfunction!(prime_power_for_base_coprime, m)?)?;
    m.add_function(wrap_pyfunction!(prime_power_for_base_dividing, m)?)?;
    m.add_function(wrap_pyfunction!(base_family, m)?)?;
    m.add_function(wrap_pyfunction!(unit_fraction_bases, m)?)?;
    m.add_function(wrap_pyfunction!(reciprocal_pair_holds, m)?)?;
    m.add_function(wrap_pyfunction!(feasible_primes, m)?)?;
    m.add_function(wrap_pyfunction!(brute_is_korselt, m)?)?;
    m.add_function(wrap_pyfunction!(brute_ks_box, m)?)?;
    Ok(())
}
