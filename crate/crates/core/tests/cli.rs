use std::process::{Command, Output};

use korselt::Rational;

fn korselt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_korselt")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Vec<serde_json::Value>) {
    let mut full = args.to_vec();
    full.extend(["--format", "json-lines"]);
    let o = korselt(&full);
    let lines = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    (o.status.code().unwrap(), lines)
}

#[test]
fn check_561() {
    let (code, recs) = json(&["check", "--n", "561", "--alpha", "1"]);
    assert_eq!(code, 0);
    assert_eq!(recs[0]["result"], true);
    assert_eq!(recs[0]["provenance"], "closed_form");
    assert_eq!(recs[0]["inputs"]["n"], "561");
}

#[test]
fn weight_and_sets() {
    let (_, recs) = json(&["weight", "--q", "7", "--l", "2"]);
    assert_eq!(recs[0]["result"], "14");
    let (_, recs) = json(&["set-z", "--q", "3", "--l", "2"]);
    assert_eq!(recs[0]["result"], serde_json::json!(["-3", "1", "2", "4", "5", "6"]));
    let (_, recs) = json(&["set-interval", "--q", "5", "--l", "2"]);
    assert_eq!(recs[0]["result"], serde_json::json!([]));
    assert!(recs[0]["note"].as_str().unwrap().contains("empty iff l = 2"));
}

#[test]
fn oracle_route_matches() {
    let closed = json(&["set-q", "--q", "3", "--l", "3", "--max-den", "4"]).1;
    let brute = json(&["set-q", "--q", "3", "--l", "3", "--max-den", "4", "--via", "oracle"]).1;
    assert_eq!(closed[0]["result"], brute[0]["result"]);
    assert_eq!(brute[0]["provenance"], "oracle");
}

#[test]
fn csv_has_header_and_rows() {
    let o = korselt(&["set-z", "--q", "2", "--l", "2", "--format", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "command,q,l,via,provenance,result,timing_ms");
    let results: Vec<&str> = lines.map(|l| l.split(',').nth(5).unwrap()).collect();
    assert_eq!(results, ["1", "3"]);
}

#[test]
fn emitted_rationals_parse_back() {
    let (_, recs) = json(&["set-q", "--q", "2", "--l", "4", "--max-den", "5"]);
    for v in recs[0]["result"].as_array().unwrap() {
        let s = v.as_str().unwrap();
        let parsed: Rational = s.parse().unwrap();
        assert_eq!(parsed.to_string(), s);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(korselt(&["check", "--n", "9", "--alpha", "9"]).status.code(), Some(1));
    assert_eq!(korselt(&["check", "--n", "9", "--alpha", "x/2"]).status.code(), Some(1));
    assert_eq!(korselt(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(
        korselt(&["check", "--n", "1000036000099", "--alpha", "1", "--factor-bound", "10"]).status.code(),
        Some(3)
    );
    let o = korselt(&["find-powers", "--alpha", "6/5", "--route", "dividing", "--format", "json-lines"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"infeasible\":true"));
}

#[test]
fn every_subcommand_runs() {
    let runs: &[&[&str]] = &[
        &["bounds", "--q", "3", "--l", "4", "--branch", "divisible"],
        &["intersect", "--l", "5", "--k", "7"],
        &["lift", "--q", "3", "--l", "2", "--beta", "-3", "--s", "5"],
        &["mirror", "--q", "2", "--l", "3", "--alpha", "2/3"],
        &["generate", "--q", "3", "--l", "5"],
        &["find-powers", "--alpha", "3/2"],
        &["family", "--alpha", "1", "--count", "3"],
        &["unit-fractions", "--q", "2", "--l", "5"],
        &["reciprocity", "--p", "2", "--q", "3", "--l", "4", "--sign", "-1"],
        &["feasible-primes", "--alpha", "1/2", "--l", "3"],
        &["witness-prime", "--alpha", "3"],
    ];
    for args in runs {
        let o = korselt(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).lines().count() >= 2, "{args:?}");
    }
}

#[test]
fn output_is_deterministic() {
    let strip = |o: Output| -> Vec<String> {
        stdout(&o)
            .lines()
            .map(|l| l.split(",\"timing_ms\"").next().unwrap().to_string())
            .collect()
    };
    let args = ["oracle-diff", "--primes-below", "8", "--l-max", "3", "--samples", "500", "--format", "json-lines"];
    let a = korselt(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(strip(a), strip(korselt(&args)));
}
