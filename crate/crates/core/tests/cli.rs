//! End-to-end runs of the `ultraskel` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ultraskel"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn skeleton_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let input = data("plane.json");
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let newick = dir.path().join("tree.nwk");
    for out in [&a, &b] {
        let o = run(&[
            "skeleton",
            "--input",
            input.to_str().unwrap(),
            "--epsilon",
            "0.9",
            "--out",
            out.to_str().unwrap(),
            "--dendrogram",
            newick.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(std::fs::read_to_string(&newick).unwrap().trim_end().ends_with(';'));

    let report = dir.path().join("verify.json");
    let o = run(&[
        "verify",
        "--report",
        a.to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
        "--check",
        "distortion,cutset,cover",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&report);
    assert_eq!(v["ok"], Value::Bool(true));
    assert_eq!(v["reproduces"], Value::Bool(true));
}

#[test]
fn verify_rejects_a_tampered_dendrogram() {
    let dir = tempfile::tempdir().unwrap();
    let input = data("plane.json");
    let a = dir.path().join("a.json");
    let o = run(&["skeleton", "--input", input.to_str().unwrap(), "--epsilon", "0.9", "--out", a.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let mut v = read_json(&a);
    let merges = v["dendrogram_merges"].as_array_mut().unwrap();
    assert!(merges.len() >= 2);
    // Every merge at the root height: still an ultrametric, but one that
    // flattens all nearby pairs.
    let top = merges.last().unwrap()["height"].clone();
    for m in merges.iter_mut() {
        m["height"] = top.clone();
    }
    std::fs::write(&a, v.to_string()).unwrap();
    let o = run(&["verify", "--report", a.to_str().unwrap(), "--input", input.to_str().unwrap(), "--check", "distortion"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn ramsey_round_trip_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let input = data("ring.edges");
    let r = dir.path().join("r.json");
    let o = run(&["ramsey", "--input", input.to_str().unwrap(), "--epsilon", "0.5", "--derandomize", "--out", r.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["verify", "--report", r.to_str().unwrap(), "--input", input.to_str().unwrap(), "--check", "distortion"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn gen_gnhalf_is_two_valued_and_feeds_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let o = run(&["gen", "--family", "gnhalf", "--n", "16", "--seed", "42", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let x = ultraskel::metric::load_metric(&out, None).unwrap();
    assert_eq!(x.len(), 16);
    assert!(x.space.as_flat().iter().all(|&d| d == 0.0 || d == 1.0 || d == 2.0));
    assert!(dir.path().join("g.json.spec.json").exists());
    let o = run(&["skeleton", "--input", out.to_str().unwrap(), "--delta", "0.3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!report["subset"].as_array().unwrap().is_empty());
}

#[test]
fn exit_codes() {
    let eq = data("eq4.json");
    let eq = eq.to_str().unwrap();
    assert_eq!(code(&run(&["skeleton", "--input", eq, "--epsilon", "1.5"])), 1);
    assert_eq!(code(&run(&["skeleton", "--input", eq, "--epsilon", "0.5", "--delta", "0.3"])), 1);
    assert_eq!(code(&run(&["skeleton", "--input", eq])), 1);
    assert_eq!(code(&run(&["ramsey", "--input", eq, "--epsilon", "0.5"])), 1);
    assert_eq!(code(&run(&["skeleton", "--input", "/nonexistent/x.json", "--epsilon", "0.9"])), 3);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["skeleton", "--input", data("path5.csv").to_str().unwrap(), "--epsilon", "0.9"])), 0);
}
