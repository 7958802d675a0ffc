use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poisson-lab")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, v: Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

/// Sum of the principal k×k minors of a real 3×3 matrix, by cofactors.
fn principal_minor_sum(m: &[[f64; 3]; 3], k: usize) -> f64 {
    match k {
        1 => (0..3).map(|i| m[i][i]).sum(),
        2 => [(0, 1), (0, 2), (1, 2)].iter().map(|&(i, j)| m[i][i] * m[j][j] - m[i][j] * m[j][i]).sum(),
        _ => unreachable!(),
    }
}

#[test]
fn verify_all_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(&["verify", "--n", "2", "--suite", "all", "--seed", "1", "--out", "r.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let reports: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let reports = reports.as_array().unwrap();
    assert!(!reports.is_empty());
    for r in reports {
        assert_eq!(r["status"], "pass");
        assert_eq!(r["schema_version"], 1);
        assert!(!r["reference"].as_str().unwrap().is_empty());
    }
}

#[test]
fn bruhat_of_identity() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "id.json", serde_json::json!([[1, 0, 0], [0, 1, 0], [0, 0, 1]]));
    let o = lab(&["bruhat", "--matrix", &m], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["w"]["word"], "e");
    assert_eq!(v["w"]["length"], 0);
}

#[test]
fn steinberg_of_longest_element_representative() {
    let dir = tempfile::tempdir().unwrap();
    let rep = [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]];
    let m = write(dir.path(), "w0.json", serde_json::json!(rep));
    let o = lab(&["steinberg", "--matrix", &m], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let chi = v["chi"].as_array().unwrap();
    assert_eq!(chi.len(), 2);
    for (k, z) in chi.iter().enumerate() {
        assert!((z[0].as_f64().unwrap() - principal_minor_sum(&rep, k + 1)).abs() < 1e-12);
        assert!(z[1].as_f64().unwrap().abs() < 1e-12);
    }
}

#[test]
fn steinberg_fiber_mismatch_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "id.json", serde_json::json!([[1, 0], [0, 1]]));
    let t = write(dir.path(), "t.json", serde_json::json!([2, 0.5]));
    assert_eq!(lab(&["steinberg", "--matrix", &m, "--t", &t], dir.path()).status.code(), Some(1));
    let same = write(dir.path(), "one.json", serde_json::json!([1, 1]));
    assert_eq!(lab(&["steinberg", "--matrix", &m, "--t", &same], dir.path()).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lab(&["verify", "--n", "2", "--suite", "no-such-suite"], dir.path()).status.code(), Some(2));
    assert_eq!(lab(&["verify", "--n", "9"], dir.path()).status.code(), Some(2));
    assert_eq!(lab(&["frobnicate"], dir.path()).status.code(), Some(2));
    let bad = write(dir.path(), "bad.json", serde_json::json!([[2, 0], [0, 2]]));
    assert_eq!(lab(&["bruhat", "--matrix", &bad], dir.path()).status.code(), Some(2));
    assert_eq!(lab(&["bruhat", "--matrix", "missing.json"], dir.path()).status.code(), Some(2));
}

#[test]
fn rho_sample_checks_pass() {
    let dir = tempfile::tempdir().unwrap();
    let t3 = write(dir.path(), "t3.json", serde_json::json!([2.0, -0.75, -1.0 / 1.5]));
    let o = lab(&["rho-sample", "--n", "3", "--w", "s1 s2", "--t", &t3, "--count", "2", "--seed", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}
