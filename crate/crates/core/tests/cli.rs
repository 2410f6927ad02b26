//! End-to-end runs of the gricci binary: exit codes and artifacts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn gricci(cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gricci"))
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("binary runs")
}

fn report(out: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn sphere2_verify_passes_with_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = gricci(&config("sphere2_verify.json"), dir.path(), &["--resolution", "96"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(dir.path());
    assert_eq!(r["verification"]["N"], 2);
    assert!(r["verification"]["residual_sup"].as_f64().unwrap() < 1e-6);
    let csv = std::fs::read_to_string(dir.path().join("fields.csv")).unwrap();
    assert!(csv.starts_with("chart,x,y,f,K,residual\n"));
    assert_eq!(csv.lines().count(), 2 * 96 * 96 + 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS ricci_residual"));
}

#[test]
fn classify_prints_a2() {
    let dir = tempfile::tempdir().unwrap();
    let o = gricci(&config("classify_a2.json"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(dir.path())["classification"]["label"], "A2");
}

#[test]
fn failed_claim_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = gricci(&config("flat_torus_claim.json"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    let r = report(dir.path());
    assert_eq!(r["pass"], false);
    assert_eq!(r["admissibility"]["verdict"], "admissible");
    assert!(r["verification"]["verdict"]["reasons"].to_string().contains("K < c"));
}

#[test]
fn schema_errors_exit_1_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"command":"verify","family":{"kind":"sphere2","ell":1},"resolutoin":64}"#).unwrap();
    let o = gricci(&cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("schema error") && err.contains("resolutoin"), "{err}");
    assert!(o.stdout.is_empty());
    assert!(!dir.path().join("out/report.json").exists());
    // numerical preconditions are errors too
    std::fs::write(&cfg, r#"{"command":"verify","family":{"kind":"delaunay","a":4,"c":-1}}"#).unwrap();
    assert_eq!(gricci(&cfg, &dir.path().join("out"), &[]).status.code(), Some(1));
    let missing = dir.path().join("missing.json");
    assert_eq!(gricci(&missing, dir.path(), &[]).status.code(), Some(1));
}

#[test]
fn tolerance_scale_flag_flips_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("rot.json");
    std::fs::write(&cfg, r#"{"command":"verify","family":{"kind":"rotational","ell":2,"c":-1,"xi":1},"resolution":128}"#).unwrap();
    assert_eq!(gricci(&cfg, &dir.path().join("a"), &[]).status.code(), Some(0));
    let o = gricci(&cfg, &dir.path().join("b"), &["--tolerance-scale", "1e-6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL ricci_residual sup="));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert_eq!(gricci(&config("cubic_map_construct.json"), out, &["--resolution", "48"]).status.code(), Some(0));
    }
    for f in ["report.json", "fields.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn shipped_configs_parse() {
    for entry in std::fs::read_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")).unwrap() {
        let p = entry.unwrap().path();
        let text = std::fs::read_to_string(&p).unwrap();
        gricci::cli::RunConfig::from_json(&text).unwrap_or_else(|e| panic!("{}: {e:#}", p.display()));
    }
}
