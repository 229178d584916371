use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quench-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn small_fig1(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "run",
        "fig1",
        "--trajectories",
        "64",
        "--t-end",
        "10",
        "--out-dir",
        dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    lab(&args)
}

#[test]
fn list_shows_every_experiment() {
    let out = lab(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "fig1", "fig2a", "fig2b", "fig2c", "fig3", "fig4", "appA", "appC", "appD", "appG", "custom",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn validate_reports_errors_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "experiment = \"fig3\"\ndt = -0.1\nbins = 0\n").unwrap();
    let out = lab(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    let messages = report["messages"].as_array().unwrap();
    assert!(messages.iter().any(|m| m == "dt must be positive"));
    assert!(messages.iter().any(|m| m == "bins must be positive"));
}

#[test]
fn validate_prints_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ok.toml");
    fs::write(&cfg, "experiment = \"fig4\"\nseed = 12\n").unwrap();
    let out = lab(&["validate", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("seed = 12")
            && text.contains("temperature = 0.1")
            && text.contains("burn_in = 100.0")
    );
}

#[test]
fn runs_are_deterministic_and_replayable() {
    let root = tempfile::tempdir().unwrap();
    let (a, b, c) = (
        root.path().join("a"),
        root.path().join("b"),
        root.path().join("c"),
    );
    assert!(small_fig1(&a, &["--threads", "1"]).status.success());
    assert!(small_fig1(&b, &["--threads", "3"]).status.success());
    assert_eq!(read_dir_sorted(&a), read_dir_sorted(&b));

    let meta = a.join("run_meta.json");
    let out = lab(&[
        "run",
        "fig1",
        "--config",
        meta.to_str().unwrap(),
        "--out-dir",
        c.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(read_dir_sorted(&a), read_dir_sorted(&c));
}

#[test]
fn artifact_formats() {
    let dir = tempfile::tempdir().unwrap();
    assert!(small_fig1(dir.path(), &["--gnuplot"]).status.success());
    let hist = fs::read_to_string(dir.path().join("hist_phi.csv")).unwrap();
    assert!(hist.starts_with("bin_center,density\n") && !hist.contains('\r'));
    let row = hist.lines().nth(1).unwrap();
    let mantissa = row
        .split(',')
        .next()
        .unwrap()
        .trim_start_matches('-')
        .split('e')
        .next()
        .unwrap();
    assert_eq!(mantissa.replace('.', "").len(), 17);
    let fit: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    for key in ["kappa", "offset", "window", "residual", "n_bins_used"] {
        assert!(fit.get(key).is_some(), "{key}");
    }
    assert_eq!(fit["window"].as_array().unwrap().len(), 2);
    assert!(dir.path().join("snapshots_10.csv").exists());
    assert!(dir.path().join("hist_phi.gp").exists());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "seed = 5\ntrajectories = 10\nt_end = 2.0\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = lab(&[
        "run",
        "fig1",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "8",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("run_meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 8);
    assert_eq!(meta["config"]["trajectories"], 10);
}

#[test]
fn runtime_failure_writes_error_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("q.toml");
    fs::write(
        &cfg,
        "experiment = \"custom\"\n[model]\nkind = \"quantum\"\nspin = 3\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = lab(&[
        "run",
        "custom",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("error.json")).unwrap()).unwrap();
    assert_eq!(report["error"], "run");
}

#[test]
fn small_quantum_sweep_writes_probabilities() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    fs::write(&cfg, "grid = [0.5, 1.5]\n[model]\nspin = 200\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = lab(&[
        "run",
        "fig2a",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(out_dir.join("prob_m_y_J0.5.csv")).unwrap();
    assert!(csv.starts_with("m,probability\n"));
    assert_eq!(csv.lines().count(), 402);
    let sweep: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("sweep.json")).unwrap()).unwrap();
    assert_eq!(sweep["grid"].as_array().unwrap().len(), 2);
    assert_eq!(sweep["parameter"], "J/mu");
}
