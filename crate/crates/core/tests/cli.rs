//! End-to-end runs of the `lopc` binary on the bundled data files.

use std::path::PathBuf;
use std::process::{Command, Output};

use lopc::{paper_distribution, JointDistribution, Stage};
use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn lopc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lopc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = lopc(args);
    assert!(
        out.status.success(),
        "lopc {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

#[test]
fn measures_on_the_final_table() {
    let fin = data("final.json");
    let cmi = report(&[
        "measure",
        "--dist",
        &fin,
        "--measure",
        "cmi",
        "--x",
        "A",
        "--y",
        "B,C",
        "--given",
        "E",
    ]);
    assert_eq!(cmi["results"]["formatted"], "0.333333333333");
    let mi = report(&["measure", "--dist", &fin, "--measure", "mi", "--x", "A", "--y", "B,C"]);
    // H(BC) - H(BC|A) = (log 6 + 2 log 3) / 3 - log 3
    assert_eq!(mi["results"]["formatted"], "0.333333333333");
    let h = report(&["measure", "--dist", &fin, "--measure", "entropy", "--x", "A"]);
    assert_eq!(h["results"]["formatted"], "1.000000000000");
    assert_eq!(h["tool"], "lopc");
    assert_eq!(h["inputs_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn witness_file_certifies_the_mid_table() {
    let doc = report(&[
        "intrinsic",
        "--dist",
        &data("mid.json"),
        "--x",
        "A,B",
        "--y",
        "C",
        "--eve",
        "E",
        "--witness",
        &data("witness_f_to_e0.json"),
    ]);
    assert_eq!(doc["results"]["mode"], "witness");
    assert_eq!(doc["results"]["certified_zero"], true);
    assert_eq!(doc["results"]["value"], 0.0);
}

#[test]
fn search_certifies_the_initial_table_and_bounds_the_final_one() {
    let doc = report(&[
        "intrinsic",
        "--dist",
        &data("initial.json"),
        "--x",
        "A,C",
        "--y",
        "B",
        "--eve",
        "E",
    ]);
    assert_eq!(doc["results"]["mode"], "search");
    assert_eq!(doc["results"]["certified_zero"], true);
    let doc = report(&[
        "intrinsic",
        "--dist",
        &data("final.json"),
        "--x",
        "A",
        "--y",
        "B,C",
        "--eve",
        "E",
    ]);
    let value = doc["results"]["value"].as_f64().unwrap();
    assert!((value - 1.0 / 3.0).abs() < 1e-6, "{value}");
    assert!(doc["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn failed_witness_exits_nonzero_and_names_the_check() {
    // the f -> e0 witness does not help on the initial table's AC vs B cut
    let out = lopc(&[
        "intrinsic",
        "--dist",
        &data("initial.json"),
        "--x",
        "A,C",
        "--y",
        "B",
        "--eve",
        "E",
        "--witness",
        &data("witness_f_to_e0.json"),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("failed check: witness channel certifies"), "{stderr}");
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["results"]["certified_zero"], false);
}

#[test]
fn quantum_checks_pass() {
    for check in ["all", "ppt", "cnot-chain", "distill", "diag"] {
        let doc = report(&["quantum", "--check", check]);
        assert!(!doc["checks"].as_array().unwrap().is_empty(), "{check}");
    }
}

#[test]
fn reproduce_reports_the_protocol_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    for path in [&first, &second] {
        let out = lopc(&["--out", path.to_str().unwrap(), "reproduce", "--restarts", "8"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    let load = |p: &PathBuf| -> Value { serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap() };
    let (mut a, mut b) = (load(&first), load(&second));
    assert_eq!(a["results"]["success_probability"], "1/3");
    let warnings = a["warnings"].as_array().unwrap();
    assert!(warnings.iter().any(|w| w.as_str().unwrap().contains("C = 0")));
    assert!(warnings.iter().any(|w| w.as_str().unwrap().contains("I(AC:B|E)")));
    a.as_object_mut().unwrap().remove("timings");
    b.as_object_mut().unwrap().remove("timings");
    assert_eq!(a, b);
}

#[test]
fn bundled_files_match_the_builtin_tables() {
    for (name, stage) in [
        ("initial.json", Stage::Initial),
        ("mid.json", Stage::AfterAliceCnot),
        ("final.json", Stage::Final),
    ] {
        let text = std::fs::read_to_string(data(name)).unwrap();
        let dist = JointDistribution::from_json(&text).unwrap();
        assert_eq!(dist, paper_distribution(stage), "{name}");
    }
}

#[test]
fn malformed_input_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"variables\": [\n    oops\n  ]\n}\n").unwrap();
    let out = lopc(&[
        "measure",
        "--dist",
        path.to_str().unwrap(),
        "--measure",
        "entropy",
        "--x",
        "A",
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 3"), "{stderr}");
    assert!(out.stdout.is_empty());
}

#[test]
fn invalid_probabilities_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("unnormalized.json");
    let text = r#"{
  "variables": [{"name": "A", "alphabet": ["0", "1"], "owner": "alice"}],
  "entries": [{"outcome": ["0"], "p": "1/2"}, {"outcome": ["1"], "p": "1/3"}]
}"#;
    std::fs::write(&path, text).unwrap();
    let out = lopc(&[
        "measure",
        "--dist",
        path.to_str().unwrap(),
        "--measure",
        "entropy",
        "--x",
        "A",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("5/6"));
}
