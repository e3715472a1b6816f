//! End-to-end checks of the `qbo` binary: exit-code discipline, report
//! determinism, and scenario round-trips.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn qbo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_fixture(file: &str, args: &[&str]) -> Output {
    let mut full = vec!["--scenario".to_string(), fixture(file).display().to_string()];
    full.extend(args.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = full.iter().map(String::as_str).collect();
    qbo(&refs)
}

#[test]
fn exit_code_discipline() {
    // (fixture, args, expected exit code)
    let table: &[(&str, &[&str], i32)] = &[
        ("jordan_identity.json", &["validate"], 0),
        ("jordan_identity.json", &["equiv", "T", "S"], 0),
        ("jordan_identity.json", &["spectrum", "T"], 0),
        ("jordan_identity.json", &["neumann", "H"], 0),
        ("jordan_identity.json", &["local", "T", "e1"], 0),
        ("jordan_identity.json", &["transfer", "T", "S", "e2", "0"], 0),
        // Analytic negatives.
        ("permuted_diag.json", &["equiv", "T", "S"], 2),
        ("jordan_identity.json", &["neumann", "T"], 2),
        ("permuted_diag.json", &["transfer", "T", "S", "e1", "5"], 2),
        // The Jordan block moves ker |x_1| off itself: not quotient bounded
        // for the permuted_diag calibration (which includes x1).
        ("permuted_diag.json", &["analyze", "Z"], 3),
        ("nonseparating.json", &["validate"], 3),
        ("malformed.json", &["validate"], 3),
        ("jordan_identity.json", &["local", "T", "nope"], 3),
        // Numerical failure: two eigenvalues between the merge tolerance and
        // the separation limit.
        ("cluster_fail.json", &["spectrum", "T"], 4),
    ];
    for (file, args, expected) in table {
        let out = run_fixture(file, args);
        let code = out.status.code().unwrap_or(-1);
        assert_eq!(
            code,
            *expected,
            "fixture {file} args {args:?}: expected {expected}, got {code}\nstderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn analytic_negative_is_not_quotient_bounded_exit() {
    // An operator that is not quotient bounded for the scenario calibration.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shift.json");
    std::fs::write(
        &path,
        r#"{
            "space_dim": 2,
            "calibration": [
                {"name": "euclidean", "matrix": [[1, 0], [0, 1]]},
                {"name": "x1", "matrix": [[1, 0]]}
            ],
            "operators": {"U": [[0, 1], [0, 0]]}
        }"#,
    )
    .unwrap();
    let out = qbo(&[
        "--scenario",
        path.to_str().unwrap(),
        "analyze",
        "U",
    ]);
    assert_eq!(out.status.code(), Some(2), "analyze of unbounded operator");
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("quotient bounded = false"), "{text}");

    // spectrum of the same operator errors out with the same class.
    let out = qbo(&["--scenario", path.to_str().unwrap(), "spectrum", "U"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let cases: &[(&str, &[&str])] = &[
        ("jordan_identity.json", &["validate"]),
        ("jordan_identity.json", &["analyze", "T"]),
        ("jordan_identity.json", &["equiv", "T", "S"]),
        ("jordan_identity.json", &["--format", "json", "equiv", "T", "S"]),
        ("jordan_identity.json", &["--format", "csv", "decay", "T", "S"]),
        ("jordan_identity.json", &["--format", "json", "spectrum", "T"]),
        ("jordan_identity.json", &["radius", "T"]),
        ("jordan_identity.json", &["neumann", "H"]),
        ("jordan_identity.json", &["local", "T", "e1"]),
        ("jordan_identity.json", &["transfer", "T", "S", "e2", "0"]),
        ("permuted_diag.json", &["--format", "json", "equiv", "T", "S"]),
        ("permuted_diag.json", &["spectrum", "T"]),
    ];
    for (file, args) in cases {
        let first = run_fixture(file, args);
        let second = run_fixture(file, args);
        assert_eq!(
            first.stdout, second.stdout,
            "fixture {file} args {args:?} not deterministic"
        );
        assert_eq!(first.status.code(), second.status.code());
    }
}

#[test]
fn gen_round_trips_and_is_seed_deterministic() {
    for kind in [
        "shared-semisimple",
        "nilpotent-pair",
        "permuted-diagonal",
        "random-dense",
    ] {
        let a = qbo(&["--seed", "11", "gen", kind, "--dim", "3"]);
        let b = qbo(&["--seed", "11", "gen", kind, "--dim", "3"]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "gen {kind} not deterministic");

        // Round-trip: parse what gen wrote, re-serialize, parse again.
        let text = String::from_utf8(a.stdout).unwrap();
        let scenario = qbo_cli::Scenario::from_json(&text).unwrap();
        let re = scenario.to_json();
        let reparsed = qbo_cli::Scenario::from_json(&re).unwrap();
        assert_eq!(re, reparsed.to_json(), "gen {kind} round-trip drifted");
    }

    let unknown = qbo(&["gen", "banach-pair"]);
    assert_eq!(unknown.status.code(), Some(3));
}

#[test]
fn generated_scenarios_run_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, expect_equiv) in [
        ("shared-semisimple", 0),
        ("nilpotent-pair", 0),
        ("permuted-diagonal", 2),
    ] {
        let out = qbo(&["--seed", "5", "gen", kind, "--dim", "4"]);
        let path = dir.path().join(format!("{kind}.json"));
        std::fs::write(&path, &out.stdout).unwrap();
        let run = qbo(&["--scenario", path.to_str().unwrap(), "equiv", "T", "S"]);
        assert_eq!(
            run.status.code(),
            Some(expect_equiv),
            "equiv on generated {kind}: {}",
            String::from_utf8_lossy(&run.stderr)
        );
    }
}
