use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn zlab(args: &[&str], out: &Path) -> (Output, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_zlab")).args(args).arg("--out").arg(out).output().unwrap();
    let report = std::fs::read_to_string(out.join("report.json")).unwrap_or_default();
    (output, report)
}

fn value(report: &str) -> serde_json::Value {
    serde_json::from_str(report).unwrap()
}

#[test]
fn flip_axioms_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("flip_axioms.json");
    let (out, report) = zlab(&["verify", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = value(&report);
    for (_, r) in v["checks"]["axioms"]["residuals"].as_object().unwrap() {
        assert_eq!(r["residual"]["value"], 0.0);
    }
}

#[test]
fn sigma_pipeline_records_crossing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("sigma_o3.json");
    let (out, report) = zlab(&["all", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{report}");
    let v = value(&report);
    assert!(v["checks"]["axioms"]["residuals"]["crossing"]["residual"]["value"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["checks"]["diagrams"]["passed"], true);
}

#[test]
fn nonsymmetric_intertwiner_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("nonsymmetric_intertwiner.json");
    let (out, report) = zlab(&["intertwiner", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(report.contains("symmetry precondition violated"));
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let (out, _) = zlab(&["all", "--check", "nonsense"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let (out, _) = zlab(&["verify", "--tolerance", "axioms=-1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"model":{"kind":"flip","sign":1},"grids":{"fock_n_max":2}}"#).unwrap();
    let (out, report) = zlab(&["verify", "--config", bad.to_str().unwrap()], &dir.path().join("bad"));
    assert_eq!(out.status.code(), Some(2));
    assert!(value(&report)["config_error"].is_string());
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("flip_axioms.json");
    let args = ["verify", "--config", cfg.to_str().unwrap(), "--seed", "9", "--check", "axioms", "--check", "fock"];
    let (out, report) = zlab(&[&args[..], &["--tolerance", "fock=1e-9"]].concat(), dir.path());
    assert_eq!(out.status.code(), Some(0), "{report}");
    let v = value(&report);
    assert_eq!(v["run"]["seed"]["value"], 9);
    assert_eq!(v["run"]["order"], serde_json::json!(["axioms", "fock"]));
    assert_eq!(v["checks"]["fock"]["tolerance"]["value"], 1e-9);
}

#[test]
fn bounds_writes_csv_table() {
    let dir = tempfile::tempdir().unwrap();
    let (out, _) = zlab(&["bounds"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("bounds.csv")).unwrap();
    assert!(csv.starts_with("n,upsilon,X1,Xi1,Xi1_pauli,partial_sum\n"));
    assert_eq!(csv.lines().count(), 32);
}
