use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn critmet(args: &[&str], config: Option<&str>, dir: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_critmet"));
    cmd.args(args).env_remove("CRITMET_OUT");
    if let Some(text) = config {
        let path = dir.join("config.json");
        fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn run_ok(command: &str, config: &str, dir: &Path) -> Vec<PathBuf> {
    let out = dir.join("out");
    let o = critmet(&[command, "--out", out.to_str().unwrap()], Some(config), dir);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap().lines().map(PathBuf::from).collect()
}

/// Header-stripped rows of a CSV file, split on commas.
fn rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let body = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, body)
}

fn column(header: &[String], body: &[Vec<String>], name: &str) -> Vec<f64> {
    let k = header.iter().position(|h| h == name).unwrap();
    body.iter().map(|r| r[k].parse().unwrap()).collect()
}

#[test]
fn sweep_schedule_ends_at_target() {
    let dir = TempDir::new().unwrap();
    let files = run_ok("sweep", r#"{"params": {"omega0": 1, "Omega": 100, "g": 0.9, "gamma": 0.05}}"#, dir.path());
    assert_eq!(files.len(), 1);
    let text = fs::read_to_string(&files[0]).unwrap();
    assert!(text.starts_with("# critmet sweep\n# config: {"));
    let (h, b) = rows(&files[0]);
    let g = column(&h, &b, "g");
    assert!((g.last().unwrap() - 0.9).abs() < 1e-10);
    assert!(g.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn sweep_integration_reports_infidelity() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"params": {"omega0": 1, "Omega": 100, "g": 0.5, "gamma": 0.2}, "integrate": true, "dt": 0.0002}"#;
    let files = run_ok("sweep", cfg, dir.path());
    assert_eq!(files.len(), 2);
    let (h, b) = rows(&files[1]);
    assert!(column(&h, &b, "norm").iter().all(|n| (n - 1.0).abs() < 1e-8));
    assert!(fs::read_to_string(&files[1]).unwrap().contains("# final_infidelity = "));
}

#[test]
fn output_is_deterministic_and_thread_independent() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"g_values": [0.7, 0.3, 0.5], "params": {"omega0": 1, "Omega": 20, "g": 0.5}}"#;
    let mut outputs = Vec::new();
    for threads in ["1", "4", "4"] {
        let o = critmet(&["qfi", "--threads", threads, "--out", dir.path().join("o").to_str().unwrap()], Some(cfg), dir.path());
        assert!(o.status.success());
        outputs.push(fs::read(dir.path().join("o/qfi.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
    let (h, b) = rows(&dir.path().join("o/qfi.csv"));
    let g = column(&h, &b, "g");
    assert_eq!(g, vec![0.3, 0.3, 0.5, 0.5, 0.7, 0.7]);
}

#[test]
fn dissipative_vacuum_at_zero_coupling() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"g_values": [0.5, 0.0], "params": {"omega0": 1, "Omega": 100, "g": 0.5, "kappa": 1, "Gamma": 10}, "times": [10, 1, 0]}"#;
    let files = run_ok("dissipative", cfg, dir.path());
    let (h, b) = rows(&files[0]);
    assert_eq!(column(&h, &b, "g")[0], 0.0);
    assert_eq!(column(&h, &b, "sigma_xx")[0], 0.5);
    assert_eq!(column(&h, &b, "sigma_xp")[0], 0.0);
    assert_eq!(column(&h, &b, "sigma_pp")[0], 0.5);
    let (h, b) = rows(&files[1]);
    assert_eq!(column(&h, &b, "t"), vec![0.0, 1.0, 10.0]);
}

#[test]
fn benchmark_fits_hamiltonian_quartic_scaling() {
    let dir = TempDir::new().unwrap();
    let files = run_ok("benchmark", "{}", dir.path());
    assert_eq!(files.len(), 3);
    let (h, b) = rows(&files[1]);
    let row = b.iter().find(|r| r[0] == "critical-hamiltonian" && r[1] == "Omega").unwrap();
    let k = h.iter().position(|c| c == "exponent").unwrap();
    let exponent: f64 = row[k].parse().unwrap();
    assert!((exponent - 4.0).abs() < 0.1);
    let (h, b) = rows(&files[0]);
    let fi = column(&h, &b, "fi_homodyne");
    let qfi = column(&h, &b, "qfi");
    assert!(fi.iter().zip(&qfi).all(|(f, q)| *f <= q * (1.0 + 1e-3) + 1e-12));
}

#[test]
fn fig1_writes_both_panels() {
    let dir = TempDir::new().unwrap();
    let files = run_ok("fig1", r#"{"g_values": [0.6, 0.3]}"#, dir.path());
    assert_eq!(files.len(), 2);
    let (h, b) = rows(&files[0]);
    assert_eq!(b.len(), 2 * 3 * 2);
    // The effective-model signal-to-noise ratio does not depend on ω₀/Ω.
    let q = column(&h, &b, "q_effective");
    for chunk in q.chunks(6) {
        assert!(chunk.iter().all(|v| (v / chunk[0] - 1.0).abs() < 5e-3));
    }
    let (h, b) = rows(&files[1]);
    let ratio = column(&h, &b, "fi_over_qfi");
    assert!(ratio.iter().all(|r| *r >= 0.0 && *r <= 1.001));
}

#[test]
fn empty_grid_gives_header_only() {
    let dir = TempDir::new().unwrap();
    for file in run_ok("fig1", r#"{"g_values": []}"#, dir.path()) {
        let (_, b) = rows(&file);
        assert!(b.is_empty());
    }
}

#[test]
fn invalid_grid_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let o = critmet(&["fig1", "--out", dir.path().to_str().unwrap()], Some(r#"{"g_values": [0.5, 1.0]}"#), dir.path());
    assert!(!o.status.success());
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "config");
    assert!(err["message"].as_str().unwrap().contains("grid"));
}

#[test]
fn module_errors_propagate_as_json() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"params": {"omega0": 1, "Omega": 100, "g": 0.5, "kappa": 0}}"#;
    let o = critmet(&["dissipative", "--out", dir.path().to_str().unwrap()], Some(cfg), dir.path());
    assert!(!o.status.success());
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "no_steady_state");

    let o = critmet(&["qfi"], Some(r#"{"params": {"omega0": -1, "Omega": 1, "g": 0.5}}"#), dir.path());
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "domain");

    let o = critmet(&["qfi"], Some("{not json"), dir.path());
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "config");
}

#[test]
fn environment_overrides_out_flag() {
    let dir = TempDir::new().unwrap();
    let env_dir = dir.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_critmet"))
        .args(["sweep", "--out", dir.path().join("flag").to_str().unwrap()])
        .env("CRITMET_OUT", &env_dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(env_dir.join("sweep_schedule.csv").exists());
    assert!(!dir.path().join("flag").exists());
}

#[test]
fn json_format_embeds_config_and_rows() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("j");
    let o = critmet(&["sweep", "--format", "json", "--out", out.to_str().unwrap()], None, dir.path());
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&fs::read_to_string(out.join("sweep_schedule.json")).unwrap()).unwrap();
    assert_eq!(doc["command"], "sweep");
    assert_eq!(doc["config"]["format"], "json");
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 201);
    assert!((rows.last().unwrap()["g"].as_f64().unwrap() - 0.5).abs() < 1e-10);
}
