//! Command-line front end.
//!
//! Each subcommand runs one library operation and emits self-describing
//! records (`command`, echoed `inputs`, `result`, `provenance`, `timing_ms`)
//! as an aligned table, JSON lines or CSV.
//!
//! Exit status: 0 success, 1 domain/precondition/usage error, 2 closed form
//! and oracle disagree, 3 budget exceeded.

use std::ffi::OsString;
use std::io::{self, Write};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constructors::{self, DividingOutcome, UnitSign};
use crate::error::Error;
use crate::exactmath::{self, Rational};
use crate::oracle::{self, ScanBox};
use crate::prime_power::{self, BoundBranch, PrimePower};
use crate::sets::{self, KorseltSet};
use crate::Budget;

/// Default seed for randomized agreement checks.
pub const DEFAULT_SEED: u64 = 0x4b4f_5253_454c_5431;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    JsonLines,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Via {
    ClosedForm,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Branch {
    Coprime,
    Divisible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Coprime,
    Dividing,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Check {
    Z,
    Q,
    Weight,
}

#[derive(Parser, Debug)]
#[command(name = "korselt", version, about = "Korselt rational bases of prime powers")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    /// Largest trial divisor used when factoring.
    #[arg(long, default_value_t = exactmath::DEFAULT_FACTOR_BOUND, global = true)]
    factor_bound: u64,
    /// Largest exponent a construction may produce.
    #[arg(long, default_value_t = 100_000, global = true)]
    max_exponent: u64,
    /// Largest number of candidates a search may visit.
    #[arg(long, default_value_t = 5_000_000, global = true)]
    max_search: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test whether ALPHA is a Korselt base of N.
    Check {
        #[arg(long)]
        n: BigInt,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Rational,
        #[arg(long, value_enum, default_value_t = Via::ClosedForm)]
        via: Via,
    },
    /// Integer Korselt set of q^l.
    SetZ {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        l: u64,
        #[arg(long, value_enum, default_value_t = Via::ClosedForm)]
        via: Via,
    },
    /// Rational Korselt set of q^l up to a denominator bound.
    SetQ {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        l: u64,
        #[arg(long, default_value_t = 10)]
        max_den: u64,
        #[arg(long, value_enum, default_value_t = Via::ClosedForm)]
        via: Via,
    },
    /// Korselt set of q^l inside [-1, 1[.
    SetInterval {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        l: u64,
    },
    /// Size of the integer Korselt set of q^l.
    Weight {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        l: u64,
    },
    /// Bounds on the members of the Korselt set of q^l.
    Bounds {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        l: u64,
        #[arg(long, value_enum, default_value_t = Branch::Coprime)]
        branch: Branch,
    },
    /// Exponent m with KS(q^l) ∩ KS(q^k) = KS(q^m).
    Intersect {
        #[arg(long)]
        l: u64,
        #[arg(long)]
        k: u64,
    },
    /// Lift an integer base BETA to q + (BETA - q)/S.
    Lift {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        l: u64,
        #[arg(long, allow_hyphen_values = true)]
        beta: BigInt,
        #[arg(long)]
        s: BigInt,
    },
    /// Map a'q/b to bq/a'.
    Mirror {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        l: u64,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Rational,
    },
    /// Bases generated by divisors d with phi(d) | l - 1.
    Generate {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        l: u64,
        /// A single generator; omit to list every eligible d up to --bound.
        #[arg(long)]
        d: Option<BigInt>,
        /// Generator parameter; omit to use the least m >= 1 that works.
        #[arg(long, allow_hyphen_values = true)]
        m: Option<BigInt>,
        #[arg(long, default_value_t = 50)]
        bound: u64,
    },
    /// Prime powers admitting ALPHA.
    FindPowers {
        #[arg(long, allow_hyphen_values = true)]
        alpha: Rational,
        #[arg(long, value_enum, default_value_t = RouteArg::Both)]
        route: RouteArg,
    },
    /// COUNT distinct prime powers admitting ALPHA.
    Family {
        #[arg(long, allow_hyphen_values = true)]
        alpha: Rational,
        #[arg(long, default_value_t = 3)]
        count: usize,
    },
    /// Bases ±1/q^(s-1) of q^l.
    UnitFractions {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        l: u64,
    },
    /// (sign/p ∈ KS(q^l), sign/q ∈ KS(p^l)).
    Reciprocity {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        l: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        sign: i64,
    },
    /// Primes q coprime to the numerator with ALPHA ∈ KS(q^l).
    FeasiblePrimes {
        #[arg(long, allow_hyphen_values = true)]
        alpha: Rational,
        #[arg(long)]
        l: u64,
    },
    /// Smallest prime q with ALPHA ∉ KS(q^2).
    WitnessPrime {
        #[arg(long, allow_hyphen_values = true)]
        alpha: Rational,
    },
    /// Compare closed forms with the brute-force oracle over a grid.
    OracleDiff {
        /// Primes strictly below this value.
        #[arg(long, default_value_t = 14)]
        primes_below: u64,
        #[arg(long, default_value_t = 2)]
        l_min: u64,
        #[arg(long, default_value_t = 4)]
        l_max: u64,
        #[arg(long, default_value_t = 6)]
        max_den: u64,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Check::Z, Check::Q, Check::Weight])]
        checks: Vec<Check>,
        /// Random membership comparisons in addition to the grid.
        #[arg(long, default_value_t = 0)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

/// A result value; leaves are rendered as text.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Bool(bool),
    Text(String),
    List(Vec<Value>),
    Object(Vec<(String, Value)>),
}

impl Value {
    fn text(s: impl ToString) -> Value {
        Value::Text(s.to_string())
    }

    fn set(set: &KorseltSet) -> Value {
        Value::List(set.iter().map(Value::text).collect())
    }

    fn write_json(&self, out: &mut String) {
        match self {
            Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Value::Text(s) => out.push_str(&serde_json::to_string(s).expect("string")),
            Value::List(items) => {
                out.push('[');
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    v.write_json(out);
                }
                out.push(']');
            }
            Value::Object(fields) => write_json_object(fields, out),
        }
    }

    fn to_json(&self) -> String {
        let mut s = String::new();
        self.write_json(&mut s);
        s
    }

    /// Plain text for table and CSV cells.
    fn cell(&self) -> String {
        match self {
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
            other => other.to_json(),
        }
    }
}

fn write_json_object(fields: &[(String, Value)], out: &mut String) {
    out.push('{');
    for (i, (k, v)) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&serde_json::to_string(k).expect("string"));
        out.push(':');
        v.write_json(out);
    }
    out.push('}');
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Oracle,
}

impl Provenance {
    fn as_str(self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed_form",
            Provenance::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: Vec<(String, String)>,
    pub result: Value,
    pub provenance: Provenance,
    pub timing_ms: f64,
    pub note: Option<String>,
}

impl OutputRecord {
    pub fn to_json_line(&self) -> String {
        let mut fields = vec![
            ("command".to_string(), Value::text(&self.command)),
            (
                "inputs".to_string(),
                Value::Object(self.inputs.iter().map(|(k, v)| (k.clone(), Value::text(v))).collect()),
            ),
            ("result".to_string(), self.result.clone()),
            ("provenance".to_string(), Value::text(self.provenance.as_str())),
        ];
        if let Some(note) = &self.note {
            fields.push(("note".to_string(), Value::text(note)));
        }
        let mut s = String::new();
        write_json_object(&fields, &mut s);
        // timing is a bare number
        s.pop();
        s.push_str(&format!(",\"timing_ms\":{:.3}}}", self.timing_ms));
        s
    }
}

/// Writes records in the requested format.
pub fn emit(records: &[OutputRecord], format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::JsonLines => {
            for r in records {
                writeln!(out, "{}", r.to_json_line())?;
            }
            Ok(())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let (header, rows) = tabulate(records);
            w.write_record(&header)?;
            for row in rows {
                w.write_record(&row)?;
            }
            w.flush()
        }
        Format::Table => {
            let (header, rows) = tabulate(records);
            let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
            for row in &rows {
                for (w, c) in widths.iter_mut().zip(row) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let line = |cells: &[String]| -> String {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}", w = *w))
                    .collect();
                padded.join("  ").trim_end().to_string()
            };
            writeln!(out, "{}", line(&header))?;
            for row in &rows {
                writeln!(out, "{}", line(row))?;
            }
            for r in records {
                if let Some(note) = &r.note {
                    writeln!(out, "# {note}")?;
                }
            }
            Ok(())
        }
    }
}

/// Header and rows shared by CSV and table output. Lists expand to one row
/// per element.
fn tabulate(records: &[OutputRecord]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut keys: Vec<String> = Vec::new();
    for r in records {
        for (k, _) in &r.inputs {
            if !keys.contains(k) {
                keys.push(k.clone());
            }
        }
    }
    let mut header = vec!["command".to_string()];
    header.extend(keys.iter().cloned());
    header.extend(["provenance", "result", "timing_ms"].map(String::from));

    let mut rows = Vec::new();
    for r in records {
        let mut prefix = vec![r.command.clone()];
        for k in &keys {
            let v = r.inputs.iter().find(|(kk, _)| kk == k).map(|(_, v)| v.clone());
            prefix.push(v.unwrap_or_default());
        }
        prefix.push(r.provenance.as_str().to_string());
        let timing = format!("{:.3}", r.timing_ms);
        let cells: Vec<String> = match &r.result {
            Value::List(items) => items.iter().map(Value::cell).collect(),
            other => vec![other.cell()],
        };
        for c in cells {
            let mut row = prefix.clone();
            row.push(c);
            row.push(timing.clone());
            rows.push(row);
        }
    }
    (header, rows)
}

struct Outcome {
    records: Vec<OutputRecord>,
    mismatch: bool,
}

struct Recorder {
    command: &'static str,
    inputs: Vec<(String, String)>,
    records: Vec<OutputRecord>,
}

impl Recorder {
    fn new(command: &'static str) -> Self {
        Recorder { command, inputs: Vec::new(), records: Vec::new() }
    }

    fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.push((key.to_string(), value.to_string()));
        self
    }

    fn timed<T>(
        &mut self,
        provenance: Provenance,
        f: impl FnOnce() -> crate::Result<T>,
        to_value: impl FnOnce(T) -> Value,
    ) -> crate::Result<()> {
        let start = Instant::now();
        let v = f()?;
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        self.records.push(OutputRecord {
            command: self.command.to_string(),
            inputs: self.inputs.clone(),
            result: to_value(v),
            provenance,
            timing_ms: elapsed,
            note: None,
        });
        Ok(())
    }

    fn done(self) -> crate::Result<Outcome> {
        Ok(Outcome { records: self.records, mismatch: false })
    }
}

fn via_provenance(via: Via) -> Provenance {
    match via {
        Via::ClosedForm => Provenance::ClosedForm,
        Via::Oracle => Provenance::Oracle,
    }
}

fn via_name(via: Via) -> &'static str {
    match via {
        Via::ClosedForm => "closed-form",
        Via::Oracle => "oracle",
    }
}

fn construction_value(c: &constructors::Construction) -> Value {
    Value::Object(vec![
        ("base".into(), Value::text(&c.base)),
        ("q".into(), Value::text(c.q)),
        ("l".into(), Value::text(c.l)),
        ("route".into(), Value::text(c.route)),
    ])
}

fn execute(cli: Cli) -> crate::Result<Outcome> {
    let budget = Budget {
        factor_bound: cli.factor_bound,
        max_exponent: cli.max_exponent,
        max_search: cli.max_search,
    };
    match cli.command {
        Command::Check { n, alpha, via } => {
            let mut rec = Recorder::new("check")
                .input("n", &n)
                .input("alpha", &alpha)
                .input("via", via_name(via));
            rec.timed(
                via_provenance(via),
                || match via {
                    Via::ClosedForm => prime_power::is_korselt_with(&n, &alpha, &budget),
                    Via::Oracle => oracle::brute_is_korselt(&n, &alpha),
                },
                Value::Bool,
            )?;
            rec.done()
        }
        Command::SetZ { q, l, via } => {
            let pp = PrimePower::new(q, l)?;
            let mut rec =
                Recorder::new("set-z").input("q", q).input("l", l).input("via", via_name(via));
            rec.timed(
                via_provenance(via),
                || match via {
                    Via::ClosedForm => sets::integer_korselt_set_with(&pp, &budget),
                    Via::Oracle => {
                        let radius = pp_radius(&pp, 1)?;
                        oracle::brute_ks_z(&pp.value(), radius)
                    }
                },
                |s| Value::set(&s),
            )?;
            rec.done()
        }
        Command::SetQ { q, l, max_den, via } => {
            let pp = PrimePower::new(q, l)?;
            let mut rec = Recorder::new("set-q")
                .input("q", q)
                .input("l", l)
                .input("max-den", max_den)
                .input("via", via_name(via));
            rec.timed(
                via_provenance(via),
                || match via {
                    Via::ClosedForm => sets::bounded_korselt_set_with(&pp, max_den, &budget),
                    Via::Oracle => {
                        let radius = pp_radius(&pp, max_den)?;
                        oracle::brute_ks_box(&pp.value(), ScanBox::new(radius, max_den))
                    }
                },
                |s| Value::set(&s),
            )?;
            rec.done()
        }
        Command::SetInterval { q, l } => {
            let pp = PrimePower::new(q, l)?;
            let mut rec = Recorder::new("set-interval").input("q", q).input("l", l);
            rec.timed(
                Provenance::ClosedForm,
                || sets::interval_korselt_set_with(&pp, &budget),
                |s| Value::set(&s),
            )?;
            let mut out = rec.done()?;
            out.records[0].note = Some("the [-1, 1[ slice is empty iff l = 2".into());
            Ok(out)
        }
        Command::Weight { q, l } => {
            let pp = PrimePower::new(q, l)?;
            let mut rec = Recorder::new("weight").input("q", q).input("l", l);
            rec.timed(
                Provenance::ClosedForm,
                || sets::integer_korselt_weight_with(&pp, &budget),
                Value::text,
            )?;
            rec.done()
        }
        Command::Bounds { q, l, branch } => {
            let pp = PrimePower::new(q, l)?;
            let (b, name) = match branch {
                Branch::Coprime => (BoundBranch::Coprime, "coprime"),
                Branch::Divisible => (BoundBranch::Divisible, "divisible"),
            };
            let mut rec =
                Recorder::new("bounds").input("q", q).input("l", l).input("branch", name);
            rec.timed(
                Provenance::ClosedForm,
                || Ok(prime_power::base_bounds(&pp, b)),
                |(lo, hi)| {
                    Value::Object(vec![("lower".into(), Value::text(lo)), ("upper".into(), Value::text(hi))])
                },
            )?;
            rec.done()
        }
        Command::Intersect { l, k } => {
            let mut rec = Recorder::new("intersect").input("l", l).input("k", k);
            rec.timed(
                Provenance::ClosedForm,
                || prime_power::intersection_exponent(l, k),
                Value::text,
            )?;
            rec.done()
        }
        Command::Lift { q, l, beta, s } => {
            let pp = PrimePower::new(q, l)?;
            let mut rec = Recorder::new("lift")
                .input("q", q)
                .input("l", l)
                .input("beta", &beta)
                .input("s", &s);
            rec.timed(
                Provenance::ClosedForm,
                || {
                    let alpha = prime_power::lift_base(&pp, &beta, &s)?;
                    let beta_member = prime_power::contains(&pp, &Rational::from_integer(beta.clone()));
                    let alpha_member = prime_power::contains(&pp, &alpha);
                    Ok((alpha, beta_member, alpha_member))
                },
                |(alpha, bm, am)| {
                    Value::Object(vec![
                        ("alpha".into(), Value::text(alpha)),
                        ("beta_member".into(), Value::Bool(bm)),
                        ("alpha_member".into(), Value::Bool(am)),
                    ])
                },
            )?;
            rec.done()
        }
        Command::Mirror { q, l, alpha } => {
            let pp = PrimePower::new(q, l)?;
            let mut rec = Recorder::new("mirror").input("q", q).input("l", l).input("alpha", &alpha);
            rec.timed(
                Provenance::ClosedForm,
                || {
                    let image = prime_power::mirror_base(&pp, &alpha)?;
                    Ok((
                        prime_power::contains(&pp, &alpha),
                        prime_power::contains(&pp, &image),
                        image,
                    ))
                },
                |(am, im, image)| {
                    Value::Object(vec![
                        ("image".into(), Value::text(image)),
                        ("alpha_member".into(), Value::Bool(am)),
                        ("image_member".into(), Value::Bool(im)),
                    ])
                },
            )?;
            rec.done()
        }
        Command::Generate { q, l, d, m, bound } => {
            let pp = PrimePower::new(q, l)?;
            match d {
                Some(d) => {
                    let mut rec = Recorder::new("generate").input("q", q).input("l", l).input("d", &d);
                    if let Some(m) = &m {
                        rec = rec.input("m", m);
                    }
                    rec.timed(
                        Provenance::ClosedForm,
                        || generate_one(&pp, &d, m.as_ref()),
                        generated_value,
                    )?;
                    rec.done()
                }
                None => {
                    let mut records = Vec::new();
                    for d in constructors::eligible_generators(l, bound)? {
                        let start = Instant::now();
                        let res = generate_one(&pp, &BigInt::from(d), m.as_ref());
                        let result = match res {
                            Ok(g) => generated_value(g),
                            Err(e) => Value::Object(vec![
                                ("d".into(), Value::text(d)),
                                ("error".into(), Value::text(e)),
                            ]),
                        };
                        records.push(OutputRecord {
                            command: "generate".into(),
                            inputs: [("q", q.to_string()), ("l", l.to_string()), ("d", d.to_string())]
                                .into_iter()
                                .chain(m.iter().map(|m| ("m", m.to_string())))
                                .map(|(k, v)| (k.to_string(), v))
                                .collect(),
                            result,
                            provenance: Provenance::ClosedForm,
                            timing_ms: start.elapsed().as_secs_f64() * 1e3,
                            note: None,
                        });
                    }
                    Ok(Outcome { records, mismatch: false })
                }
            }
        }
        Command::FindPowers { alpha, route } => {
            let mut records = Vec::new();
            if matches!(route, RouteArg::Coprime | RouteArg::Both) {
                let mut rec =
                    Recorder::new("find-powers").input("alpha", &alpha).input("route", "coprime");
                rec.timed(
                    Provenance::ClosedForm,
                    || constructors::prime_power_for_base_coprime_with(&alpha, &budget),
                    |c| construction_value(&c),
                )?;
                records.extend(rec.records);
            }
            if matches!(route, RouteArg::Dividing | RouteArg::Both) {
                let mut rec =
                    Recorder::new("find-powers").input("alpha", &alpha).input("route", "dividing");
                let attempt = rec.timed(
                    Provenance::ClosedForm,
                    || constructors::prime_power_for_base_dividing_with(&alpha, &budget),
                    |o| match o {
                        DividingOutcome::Constructed(c) => construction_value(&c),
                        DividingOutcome::Infeasible(rep) => Value::Object(vec![
                            ("infeasible".into(), Value::Bool(true)),
                            (
                                "blocked".into(),
                                Value::List(rep.blocked.iter().map(Value::text).collect()),
                            ),
                        ]),
                    },
                );
                match attempt {
                    Ok(()) => records.extend(rec.records),
                    // numerator ±1 has no prime divisor; only fatal when asked for explicitly
                    Err(Error::Precondition(_)) if route == RouteArg::Both => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(Outcome { records, mismatch: false })
        }
        Command::Family { alpha, count } => {
            let mut rec = Recorder::new("family").input("alpha", &alpha).input("count", count);
            rec.timed(
                Provenance::ClosedForm,
                || constructors::base_family_with(&alpha, count, &budget),
                |fam| Value::List(fam.iter().map(construction_value).collect()),
            )?;
            rec.done()
        }
        Command::UnitFractions { q, l } => {
            let pp = PrimePower::new(q, l)?;
            let mut rec = Recorder::new("unit-fractions").input("q", q).input("l", l);
            rec.timed(
                Provenance::ClosedForm,
                || constructors::unit_fraction_bases(&pp),
                |v| Value::List(v.iter().map(Value::text).collect()),
            )?;
            rec.done()
        }
        Command::Reciprocity { p, q, l, sign } => {
            let unit = match sign {
                1 => UnitSign::Positive,
                -1 => UnitSign::Negative,
                other => return Err(Error::Precondition(format!("sign must be 1 or -1, got {other}"))),
            };
            let mut rec = Recorder::new("reciprocity")
                .input("p", p)
                .input("q", q)
                .input("l", l)
                .input("sign", sign);
            rec.timed(
                Provenance::ClosedForm,
                || constructors::reciprocal_pair_holds(p, q, l, unit),
                |(a, b)| {
                    Value::Object(vec![
                        ("sign_over_p_in_q_power".into(), Value::Bool(a)),
                        ("sign_over_q_in_p_power".into(), Value::Bool(b)),
                        ("equal".into(), Value::Bool(a == b)),
                    ])
                },
            )?;
            rec.done()
        }
        Command::FeasiblePrimes { alpha, l } => {
            let mut rec = Recorder::new("feasible-primes").input("alpha", &alpha).input("l", l);
            rec.timed(
                Provenance::ClosedForm,
                || constructors::feasible_primes_with(&alpha, l, &budget),
                |v| Value::List(v.iter().map(Value::text).collect()),
            )?;
            rec.done()
        }
        Command::WitnessPrime { alpha } => {
            let mut rec = Recorder::new("witness-prime").input("alpha", &alpha);
            rec.timed(
                Provenance::ClosedForm,
                || prime_power::witness_prime_with(&alpha, &budget),
                Value::text,
            )?;
            rec.done()
        }
        Command::OracleDiff { primes_below, l_min, l_max, max_den, checks, samples, seed } => {
            oracle_diff(primes_below, l_min, l_max, max_den, &checks, samples, seed, &budget)
        }
    }
}

fn generate_one(pp: &PrimePower, d: &BigInt, m: Option<&BigInt>) -> crate::Result<constructors::GeneratedBase> {
    match m {
        Some(m) => constructors::bases_from_divisor(pp, d, m),
        None => constructors::generate_base(pp, d),
    }
}

fn generated_value(g: constructors::GeneratedBase) -> Value {
    Value::Object(vec![
        ("d".into(), Value::text(&g.d)),
        ("case".into(), Value::text(g.case)),
        ("m".into(), Value::text(&g.m)),
        ("value".into(), Value::text(&g.value)),
    ])
}

// numerators of bases with denominator <= max_den stay within max_den·q^l
fn pp_radius(pp: &PrimePower, max_den: u64) -> crate::Result<u64> {
    use num_traits::ToPrimitive;
    (pp.value() * max_den)
        .to_u64()
        .ok_or_else(|| Error::BudgetExceeded(format!("oracle scan radius for {pp} exceeds 64 bits")))
}

fn primes_below(limit: u64) -> Vec<u64> {
    (2..limit).filter(|&p| exactmath::is_prime_u64(p)).collect()
}

#[allow(clippy::too_many_arguments)]
fn oracle_diff(
    below: u64,
    l_min: u64,
    l_max: u64,
    max_den: u64,
    checks: &[Check],
    samples: u64,
    seed: u64,
    budget: &Budget,
) -> crate::Result<Outcome> {
    let mut records = Vec::new();
    let mut mismatch = false;
    let mut push = |check: &str, q: u64, l: u64, closed: String, oracle: String, agree: bool, start: Instant| {
        mismatch |= !agree;
        records.push(OutputRecord {
            command: "oracle-diff".into(),
            inputs: vec![
                ("check".into(), check.into()),
                ("q".into(), q.to_string()),
                ("l".into(), l.to_string()),
                ("max-den".into(), max_den.to_string()),
            ],
            result: Value::Object(vec![
                ("closed_form".into(), Value::text(closed)),
                ("oracle".into(), Value::text(oracle)),
                ("agree".into(), Value::Bool(agree)),
            ]),
            provenance: Provenance::Oracle,
            timing_ms: start.elapsed().as_secs_f64() * 1e3,
            note: None,
        });
    };
    for q in primes_below(below) {
        for l in l_min.max(2)..=l_max {
            let pp = PrimePower::new(q, l)?;
            let n = pp.value();
            for check in checks {
                let start = Instant::now();
                match check {
                    Check::Z => {
                        let closed = sets::integer_korselt_set_with(&pp, budget)?;
                        let brute = oracle::brute_ks_z(&n, pp_radius(&pp, 1)?)?;
                        let agree = closed == brute;
                        push("z", q, l, closed.weight().to_string(), brute.weight().to_string(), agree, start);
                    }
                    Check::Q => {
                        let radius = pp_radius(&pp, 3)?;
                        let scan = ScanBox::new(radius, max_den);
                        let closed = sets::bounded_korselt_set_with(&pp, max_den, budget)?
                            .filtered(|a| scan.contains(a));
                        let brute = oracle::brute_ks_box(&n, scan)?;
                        let agree = closed == brute;
                        push("q", q, l, closed.weight().to_string(), brute.weight().to_string(), agree, start);
                    }
                    Check::Weight => {
                        let formula = sets::integer_korselt_weight_with(&pp, budget)?;
                        let counted = sets::integer_korselt_set_with(&pp, budget)?.weight();
                        let agree = formula == BigInt::from(counted);
                        push("weight", q, l, formula.to_string(), counted.to_string(), agree, start);
                    }
                }
            }
        }
    }
    if samples > 0 {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let primes = primes_below(below.max(3));
        let mut disagreements = 0u64;
        for _ in 0..samples {
            let q = primes[rng.gen_range(0..primes.len())];
            let l = rng.gen_range(l_min.max(2)..=l_max.max(l_min.max(2)));
            let pp = PrimePower::new(q, l)?;
            let n = pp.value();
            let radius = 3 * pp_radius(&pp, 1)? as i64;
            let a = rng.gen_range(-radius..=radius);
            let b = rng.gen_range(1..=max_den as i64);
            let alpha = Rational::new(a, b)?;
            if pp.excludes(&alpha) {
                continue;
            }
            if prime_power::is_prime_power_base(&pp, &alpha)? != oracle::brute_is_korselt(&n, &alpha)? {
                disagreements += 1;
            }
        }
        let agree = disagreements == 0;
        mismatch |= !agree;
        records.push(OutputRecord {
            command: "oracle-diff".into(),
            inputs: vec![
                ("check".into(), "samples".into()),
                ("samples".into(), samples.to_string()),
                ("seed".into(), seed.to_string()),
            ],
            result: Value::Object(vec![
                ("disagreements".into(), Value::text(disagreements)),
                ("agree".into(), Value::Bool(agree)),
            ]),
            provenance: Provenance::Oracle,
            timing_ms: start.elapsed().as_secs_f64() * 1e3,
            note: None,
        });
    }
    Ok(Outcome { records, mismatch })
}

fn exit_code_for(e: &Error) -> i32 {
    if e.is_budget() {
        EXIT_BUDGET
    } else {
        EXIT_DOMAIN
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// writes its records to `out`. Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_DOMAIN } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    let format = cli.format;
    match execute(cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&outcome.records, format, out) {
                let _ = writeln!(err, "error: {e}");
                return EXIT_DOMAIN;
            }
            if outcome.mismatch {
                let _ = writeln!(err, "error: closed form and oracle disagree");
                EXIT_MISMATCH
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code_for(&e)
        }
    }
}
