use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn schiffer(args: &[&str], cfg: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schiffer")).args(args).arg("--config").arg(cfg).arg("--out").arg(out).output().unwrap()
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn overlapping_disks_exit_3_with_violations() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"surface": {"kind": "sphere"},
            "domains": [{"label": "a", "coeffs": [[0,0],[1,0]]}, {"label": "b", "coeffs": [[1,0],[1,0]]}],
            "q": [5, 0]}"#,
    )
    .unwrap();
    let out = schiffer(&["identities"], &cfg, &tmp.path().join("out"));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid config"));
    assert!(!tmp.path().join("out/report.json").exists());
}

#[test]
fn broken_nesting_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"density": [{"label": "t", "sigma": {"kind": "annulus", "r1": 0.5, "r2": 1.0},
            "sigma_dprime": {"kind": "annulus", "r1": 0.6, "r2": 2.0},
            "sigma_prime": {"kind": "annulus", "r1": 0.25, "r2": 2.0}}]}"#,
    )
    .unwrap();
    let out = schiffer(&["density"], &cfg, &tmp.path().join("out"));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nesting violation"));
}

#[test]
fn unreachable_tolerance_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = schiffer(&["adjoint", "--tol", "1e-30"], &config("d.json"), tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let r = report(tmp.path());
    assert!(r["checks"].as_array().unwrap().iter().any(|c| c["pass"] == false));
}

#[test]
fn same_seed_gives_identical_checks_and_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let (o1, o2) = (tmp.path().join("1"), tmp.path().join("2"));
    for o in [&o1, &o2] {
        assert_eq!(schiffer(&["jump", "--seed", "11"], &config("b.json"), o).status.code(), Some(0));
    }
    let (r1, r2) = (report(&o1), report(&o2));
    assert_eq!(serde_json::to_string(&r1["checks"]).unwrap(), serde_json::to_string(&r2["checks"]).unwrap());
    assert_eq!(r1["tables"], r2["tables"]);
    assert_eq!(r1["meta"], r2["meta"]);
    assert_eq!(r1["meta"]["seed"], 11);
}

#[test]
fn tables_are_written_as_csv() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(schiffer(&["density"], &config("d.json"), tmp.path()).status.code(), Some(0));
    let r = report(tmp.path());
    let tables = r["tables"].as_array().unwrap();
    assert!(!tables.is_empty());
    for t in tables {
        let text = std::fs::read_to_string(tmp.path().join(t["path"].as_str().unwrap())).unwrap();
        assert_eq!(text.lines().count(), 1 + t["rows"].as_array().unwrap().len());
    }
}

#[test]
fn output_directory_falls_back_to_env() {
    let tmp = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_schiffer"))
        .args(["adjoint", "--config"])
        .arg(config("d.json"))
        .env("SCHIFFER_OUT", tmp.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(tmp.path().join("report.json").exists());
}
