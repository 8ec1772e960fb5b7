use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn zenoclone(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zenoclone"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, value: &Value) -> String {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn header(csv: &str) -> &str {
    csv.lines().find(|l| !l.starts_with('#')).unwrap()
}

fn body_without_timestamp(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.starts_with("# generated_unix_s:"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn simulate_writes_time_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "w.json",
        &json!({ "scenario": "w", "n_cavities": 3, "m_atoms": 100, "mode": "full-closed", "samples": 11 }),
    );
    let out = zenoclone(&["simulate", "--config", &cfg, "--out", "res"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("res/w.csv")).unwrap();
    assert!(csv.starts_with("# config: "));
    assert_eq!(header(&csv), "t,g_t,fidelity_w,pop_ground,pop_fiber");
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 12);
}

#[test]
fn rerunning_an_emitted_file_reproduces_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({ "scenario": "clone", "n_cavities": 3, "m_atoms": 100, "initial": "clone_input", "theta_rad": 1.2, "samples": 9 }),
    );
    let first = zenoclone(&["simulate", "--config", &cfg, "--out", "a"], dir.path());
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let emitted = dir.path().join("a/clone.csv");
    let again = zenoclone(
        &[
            "simulate",
            "--config",
            emitted.to_str().unwrap(),
            "--out",
            "b",
        ],
        dir.path(),
    );
    assert!(
        again.status.success(),
        "{}",
        String::from_utf8_lossy(&again.stderr)
    );
    let a = fs::read_to_string(emitted).unwrap();
    let b = fs::read_to_string(dir.path().join("b/clone.csv")).unwrap();
    assert!(header(&a).contains("clone_q2_corrected"));
    assert_eq!(body_without_timestamp(&a), body_without_timestamp(&b));
}

#[test]
fn json_output_has_rows_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "w.json",
        &json!({ "scenario": "w", "n_cavities": 3, "m_atoms": 100, "samples": 5 }),
    );
    let out = zenoclone(
        &[
            "simulate", "--config", &cfg, "--out", "o", "--format", "json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let doc: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/w.json")).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 5);
    assert_eq!(doc["config"]["n_cavities"], 3);
    assert!(doc["generated_unix_s"].is_u64());
}

#[test]
fn sweep_writes_grid_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.json",
        &json!({
            "scenario": "grid", "n_cavities": 3, "m_atoms": 100, "mode": "full-closed",
            "sweep": { "axes": [
                { "name": "omega", "path": "omega", "values": [0.02, 0.05], "scale": "g_prime" },
                { "name": "v", "path": "v", "values": { "start": 0.5, "stop": 1.5, "num": 3 }, "scale": "g_prime" }
            ] }
        }),
    );
    let out = zenoclone(&["sweep", "--config", &cfg, "--out", "o"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("o/grid.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').take(2).map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0], vec![0.02, 0.5]);
    assert_eq!(rows[2], vec![0.02, 1.5]);
    assert_eq!(rows[3], vec![0.05, 0.5]);
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(
        dir.path(),
        "u.json",
        &json!({ "n_cavities": 3, "m_atoms": 100, "g_typo": 1.0 }),
    );
    let out = zenoclone(
        &["simulate", "--config", &unknown, "--out", "o"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("g_typo"));
    assert!(!dir.path().join("o").exists());

    let bad = write_config(
        dir.path(),
        "b.json",
        &json!({ "n_cavities": 1, "m_atoms": 100 }),
    );
    assert_eq!(
        zenoclone(&["simulate", "--config", &bad], dir.path())
            .status
            .code(),
        Some(1)
    );

    let mixed = write_config(
        dir.path(),
        "m.json",
        &json!({ "n_cavities": 3, "m_atoms": 100, "g_mhz": 18.5, "kappa_dimensionless": 0.1 }),
    );
    assert_eq!(
        zenoclone(&["simulate", "--config", &mixed], dir.path())
            .status
            .code(),
        Some(1)
    );

    fs::write(dir.path().join("broken.json"), "{ not json").unwrap();
    assert_eq!(
        zenoclone(&["simulate", "--config", "broken.json"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        zenoclone(&["simulate", "--config", "missing.json"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        zenoclone(&["reproduce", "fig9"], dir.path()).status.code(),
        Some(1)
    );
    assert_eq!(
        zenoclone(&["validate", "--only", "nothing"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        zenoclone(&["frobnicate"], dir.path()).status.code(),
        Some(1)
    );
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "w.json",
        &json!({ "n_cavities": 3, "m_atoms": 100, "samples": 3 }),
    );
    fs::write(dir.path().join("blocker"), "").unwrap();
    let out = zenoclone(
        &["simulate", "--config", &cfg, "--out", "blocker/sub"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = zenoclone(&["validate", "--only", "zeno"], dir.path());
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );
    let broken = zenoclone(
        &["validate", "--only", "zeno", "--inject", "dark-sign"],
        dir.path(),
    );
    assert_eq!(broken.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&broken.stdout).contains("dark-state annihilation"));
}

#[test]
fn reproduce_fig4_header_and_targets() {
    let dir = tempfile::tempdir().unwrap();
    let out = zenoclone(
        &["reproduce", "fig4", "--out", "r", "--grid", "5", "--plot"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let csv = fs::read_to_string(dir.path().join("r/fig4.csv")).unwrap();
    assert_eq!(
        header(&csv),
        "axis1_name,axis1_rel_dev,axis2_name,axis2_rel_dev,fidelity_raw,fidelity_corrected"
    );
    assert!(dir.path().join("r/fig4.plot.py").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}
