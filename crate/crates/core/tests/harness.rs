use std::path::Path;
use std::process::Command;

use qfilt::exec::Execution;
use qfilt::harness::{
    manifest_json, results_csv, run_scaling_experiment_with, write_artifacts, ExperimentConfig, CSV_HEADER,
};

const SMALL: &str = r#"
case = "tiny"
n_alpha_grid = [3, 6, 9]
repetitions = 3
t_max = 12
seed = 11

[nmqa]
beta_strategy = "trunc_gauss"
sigma_v = 9.0e-8
sigma_f = 2.6e-5
lambda1 = 0.88
lambda2 = 0.72

[world]
geometry = "grid_2d"
d = 9
field = "square_2d"
"#;

fn small() -> ExperimentConfig {
    ExperimentConfig::from_toml_str(SMALL).unwrap()
}

#[test]
fn csv_has_header_and_one_row_per_cell_and_step() {
    let cfg = small();
    let res = run_scaling_experiment_with(&cfg, Execution::Sequential).unwrap();
    let csv = results_csv(std::slice::from_ref(&res));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), cfg.n_alpha_grid.len() * cfg.t_max);
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 13);
        assert_eq!(fields[0], "tiny");
        assert_eq!(fields[1], "trunc_gauss");
        let mean_l: f64 = fields[5].parse().unwrap();
        assert!(mean_l.is_finite() && mean_l >= 0.0);
        assert_eq!(fields[12], "11");
    }
    // epsilon depends only on t, so it repeats across the grid
    assert_eq!(rows[0].split(',').nth(7), rows[cfg.t_max].split(',').nth(7));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let cfg = small();
    let a = results_csv(&[run_scaling_experiment_with(&cfg, Execution::Sequential).unwrap()]);
    let b = results_csv(&[run_scaling_experiment_with(&cfg, Execution::Sequential).unwrap()]);
    assert_eq!(a, b);
    let mut other = cfg.clone();
    other.seed = 12;
    let c = results_csv(&[run_scaling_experiment_with(&other, Execution::Sequential).unwrap()]);
    assert_ne!(a.lines().nth(5), c.lines().nth(5));
}

#[test]
fn sequential_and_parallel_agree() {
    let cfg = small();
    let seq = run_scaling_experiment_with(&cfg, Execution::Sequential).unwrap();
    let par = run_scaling_experiment_with(&cfg, Execution::Parallel).unwrap();
    assert_eq!(results_csv(&[seq]), results_csv(&[par]));
}

#[test]
fn manifest_records_config_and_cell_seeds() {
    let cfg = small();
    let res = run_scaling_experiment_with(&cfg, Execution::Sequential).unwrap();
    let m = manifest_json(std::slice::from_ref(&res));
    assert_eq!(m["code_version"], env!("CARGO_PKG_VERSION"));
    let exp = &m["experiments"][0];
    let echoed: ExperimentConfig = serde_json::from_value(exp["config"].clone()).unwrap();
    assert_eq!(echoed, cfg);
    let cells = exp["cells"].as_array().unwrap();
    assert_eq!(cells.len(), cfg.n_alpha_grid.len() * cfg.repetitions);
    for cell in cells {
        assert_eq!(cell["seed"], 11);
        assert!(cell["filter_stream"].is_u64());
        assert!(cell["truth_stream"].is_u64());
    }
}

#[test]
fn json_and_toml_configs_match() {
    let cfg = small();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    assert_eq!(ExperimentConfig::load(&path).unwrap(), cfg);
    let path = dir.path().join("cfg.toml");
    std::fs::write(&path, SMALL).unwrap();
    assert_eq!(ExperimentConfig::load(&path).unwrap(), cfg);
}

#[test]
fn unknown_keys_are_rejected_in_both_formats() {
    assert!(ExperimentConfig::from_toml_str(&SMALL.replace("seed = 11", "seed = 11\nextra = 1")).is_err());
    let mut v = serde_json::to_value(small()).unwrap();
    v["nmqa"]["lambda3"] = serde_json::json!(0.5);
    assert!(ExperimentConfig::from_json_str(&v.to_string()).is_err());
}

#[test]
fn artifacts_land_in_the_output_dir() {
    let cfg = small();
    let res = run_scaling_experiment_with(&cfg, Execution::Sequential).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (csv, manifest) = write_artifacts(dir.path(), &[res]).unwrap();
    assert!(std::fs::read_to_string(csv).unwrap().starts_with(CSV_HEADER));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(manifest).unwrap()).unwrap();
    assert!(m["experiments"].is_array());
}

fn qfilt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qfilt"))
}

fn csv_rows(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count() - 1
}

#[test]
fn cli_run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg_path = dir.path().join("run.toml");
    let text = format!("output_dir = {:?}\n{SMALL}", out.to_str().unwrap());
    std::fs::write(&cfg_path, text).unwrap();
    let status = qfilt().args(["run", "--config"]).arg(&cfg_path).output().unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    assert_eq!(csv_rows(&out.join("results.csv")), 3 * 12);
    assert!(out.join("manifest.json").exists());
}

#[test]
fn cli_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.toml");
    std::fs::write(&cfg_path, SMALL.replace("d = 9", "d = 9\nbogus = 2")).unwrap();
    let out = qfilt().args(["run", "--config"]).arg(&cfg_path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
    let missing = qfilt().args(["run", "--config", "/nonexistent/x.toml"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn cli_validate_passes() {
    let out = qfilt().arg("validate").output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().count() >= 4);
    assert!(stdout.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn cli_demo_runs_both_strategies() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfilt()
        .args(["demo", "--case", "2d-gaussian", "--repetitions", "2", "--t-max", "6", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(csv.lines().count() - 1, 2 * 5 * 6);
    assert!(csv.contains(",uniform,") && csv.contains(",trunc_gauss,"));
    let bad = qfilt().args(["demo", "--case", "3d-cube"]).output().unwrap();
    assert!(!bad.status.success());
}
