//! End-to-end runs of the `dioph` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn dioph(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dioph")).current_dir(dir).args(args).output().expect("binary runs")
}

fn golden_dir() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("golden.json"), r#"{"n":1,"m":1,"entries":[["golden"]]}"#).unwrap();
    dir
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("error JSON on stderr")
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = dioph(dir.path(), &["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("best-approx"));
}

#[test]
fn golden_best_approximations_are_fibonacci() {
    let dir = golden_dir();
    let o = dioph(dir.path(), &["best-approx", "--matrix", "golden.json", "--tmax", "1000", "--out", "run"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("run/sequence.csv")).unwrap();
    let norms: Vec<u64> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(norms, [1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987]);
    let manifest = json(dir.path().join("run/manifest.json"));
    assert_eq!(manifest["schema"], "dioph.manifest/1");
    assert_eq!(manifest["command"], "best-approx");
    let files: Vec<&str> = manifest["outputs"].as_array().unwrap().iter().map(|o| o["file"].as_str().unwrap()).collect();
    assert!(files.contains(&"sequence.csv") && files.contains(&"sequence.json"));
}

#[test]
fn missing_matrix_file_is_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    let o = dioph(dir.path(), &["best-approx", "--matrix", "nope.json", "--tmax", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["schema"], "dioph.error/1");
    assert!(e["error"]["message"].as_str().unwrap().contains("matrix file not found"));
}

#[test]
fn zero_tmax_is_rejected() {
    let dir = golden_dir();
    let o = dioph(dir.path(), &["best-approx", "--matrix", "golden.json", "--tmax", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"]["exit_code"], 2);
}

#[test]
fn low_precision_is_rejected() {
    let dir = golden_dir();
    let o = dioph(dir.path(), &["best-approx", "--matrix", "golden.json", "--tmax", "10", "--precision", "32"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cassels_certificate_for_the_golden_ratio() {
    let dir = golden_dir();
    let o = dioph(dir.path(), &["transfer", "--matrix", "golden.json", "--eta", "1/2", "--Y", "5", "--Q", "23", "--out", "c"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let cert = json(dir.path().join("c/certificate.json"));
    assert_eq!(cert["witness_q"], serde_json::json!([1]));
    assert_eq!(cert["kappa"], "2");
}

#[test]
fn cassels_with_too_small_q_reports_the_violating_y() {
    let dir = golden_dir();
    let o = dioph(dir.path(), &["transfer", "--matrix", "golden.json", "--eta", "1/2", "--Y", "5", "--Q", "10"]);
    assert_eq!(o.status.code(), Some(3));
    let e = stderr_json(&o);
    assert_eq!(e["error"]["kind"], "hypothesis_violated");
    assert_eq!(e["error"]["violating_y"], serde_json::json!([5]));
}

#[test]
fn jarnik_accepts_scaled_f1() {
    let dir = golden_dir();
    let o = dioph(
        dir.path(),
        &["transfer", "--matrix", "golden.json", "--mode", "jarnik", "--eta", "1/2", "--psi", "f1:c=1/20", "--out", "j"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(dir.path().join("j/report.json"))["status"], "pass");
}

#[test]
fn construction_invariants_pass_on_the_golden_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let o = dioph(dir.path(), &["construct-eta", "--phi", "f1", "--depth", "5", "--out", "k"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let c = json(dir.path().join("k/construction.json"));
    assert_eq!(c["invariants_status"], "pass");
    let text = fs::read_to_string(dir.path().join("k/construction.json")).unwrap();
    assert!(!text.contains("\"holds\": false"));
}

#[test]
fn measure_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["measure", "--mode", "uniform", "--g", "power_log:1,0:c=0.01", "--samples", "1000", "--seed", "7"];
    let mut a: Vec<&str> = base.to_vec();
    a.extend(["--out", "a"]);
    let mut b: Vec<&str> = base.to_vec();
    b.extend(["--out", "b"]);
    let mut c: Vec<&str> = base.to_vec();
    c.extend(["--threads", "3", "--out", "c"]);
    for args in [&a, &b, &c] {
        let o = dioph(dir.path(), args);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(read_tree(&dir.path().join("a")), read_tree(&dir.path().join("b")));
    for f in ["report.json", "curve.csv"] {
        assert_eq!(fs::read(dir.path().join("a").join(f)).unwrap(), fs::read(dir.path().join("c").join(f)).unwrap(), "{f}");
    }
}

#[test]
fn rerun_reproduces_manifest_and_outputs() {
    let dir = golden_dir();
    let o = dioph(dir.path(), &["best-approx", "--matrix", "golden.json", "--tmax", "500", "--out", "first"]);
    assert_eq!(o.status.code(), Some(0));
    let o = dioph(dir.path(), &["rerun", "--manifest", "first/manifest.json", "--out", "second"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_tree(&dir.path().join("first")), read_tree(&dir.path().join("second")));
}

#[test]
fn dual_table_has_comparison_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = dioph(dir.path(), &["functions", "--f", "power_log:2,1", "--dual", "--out", "f"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(dir.path().join("f/table.csv")).unwrap();
    let mut lines = table.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("T,f,g,g_asym,g_over_g_asym"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 11);
    let last_ratio: f64 = rows[10].split(',').nth(4).unwrap().parse().unwrap();
    assert!((last_ratio - 0.9328).abs() < 1e-3, "{last_ratio}");
    let series = json(dir.path().join("f/series.json"));
    assert_eq!(series["khintchine_groshev"]["verdict"], "converges");
    assert_eq!(series["kleinbock_wadleigh"]["verdict"], "converges");
}

#[test]
fn directions_with_exceptional_scan() {
    let dir = tempfile::tempdir().unwrap();
    let o = dioph(dir.path(), &["directions", "--exceptional", "1", "--out", "d"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("d/directions.json").exists());
    assert!(dir.path().join("d/exceptional.json").exists());
}
