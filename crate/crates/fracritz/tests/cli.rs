//! End-to-end checks of the `fracritz` binary: flag handling, file
//! formats, determinism, and exit codes.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracritz"))
}

#[test]
fn solve_writes_values_and_vectors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("solution.json");
    let status = bin()
        .args([
            "solve", "--rho", "euler", "--n", "12", "--scheme", "regular", "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(parsed["n"], 12);
    assert_eq!(parsed["scheme"], "regular");
    let values = parsed["values"].as_array().unwrap();
    assert_eq!(values.len(), 12);
    let lambda1 = values[0].as_f64().unwrap();
    let exact = std::f64::consts::PI.powi(2) + 0.25;
    assert!(lambda1 > exact && lambda1 < exact + 1e-2);
}

#[test]
fn solve_accepts_quadrature_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let coarse = dir.path().join("coarse.json");
    let fine = dir.path().join("fine.json");
    for (points, panels, path) in [("8", "8", &coarse), ("16", "96", &fine)] {
        let status = bin()
            .args([
                "solve",
                "--rho",
                "euler",
                "--n",
                "10",
                "--scheme",
                "regular",
                "--quad-points",
                points,
                "--quad-panels",
                panels,
                "--out",
            ])
            .arg(path)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let lambda1 = |p: &std::path::Path| -> f64 {
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        v["values"][0].as_f64().unwrap()
    };
    let exact = std::f64::consts::PI.powi(2) + 0.25;
    // the overrides take effect (different rules, different values) and the
    // fine rule stays within the truncation-error budget of n = 10
    assert_ne!(lambda1(&coarse), lambda1(&fine));
    let fine_gap = lambda1(&fine) - exact;
    assert!(fine_gap > 0.0 && fine_gap < 1e-4, "gap {fine_gap:.3e}");
}

#[test]
fn solve_rejects_bad_density() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let output = bin()
        .args([
            "solve", "--rho", "x-2", "--a", "1", "--b", "3", "--n", "4", "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("strictly positive"), "stderr: {stderr}");
}

#[test]
fn bifurcate_euler_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bif.json");
    let status = bin()
        .args([
            "bifurcate",
            "--t",
            "1",
            "--order",
            "2",
            "--n",
            "16",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let nu1 = parsed["nu1"].as_f64().unwrap();
    assert!(nu1 < -17.9 && nu1 > -18.1, "nu1 = {nu1}");
    assert!(parsed["nu2"].as_f64().is_some());
    assert!(parsed["quad_converged"].as_bool().unwrap());
}

#[test]
fn sweep_config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("sweep.json");
    std::fs::write(
        &config_path,
        serde_json::json!({
            "rho": "euler",
            "n_min": 8,
            "n_max": 12,
            "taus": [0.5],
            "ts": [1],
            "fit_lo": 8,
            "fit_hi": 12,
            "emit": ["csv", "json", "plotdata"]
        })
        .to_string(),
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    // the flag overrides the config's n_max
    let output = bin()
        .args(["sweep", "--config"])
        .arg(&config_path)
        .args(["--n-max", "14", "--fit-hi", "14", "--out-dir"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );

    let csv = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,lambda1,err_lambda,err_tau_0.5,nu1_t1,err_nu1_t1"
    );
    assert_eq!(lines.clone().count(), 7); // n = 8..=14
    assert!(lines.all(|l| l.split(',').count() == 6));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("sweep.json")).unwrap())
            .unwrap();
    assert_eq!(report["schema_version"], "1");
    assert_eq!(report["fit_range"][1], 14);
    assert!(report["axes"].as_str().unwrap().contains("log10"));

    assert!(Path::new(&out_dir.join("plotdata").join("err_lambda.dat")).exists());
    assert!(Path::new(&out_dir.join("plotdata").join("err_nu1_t1.dat")).exists());
}

#[test]
fn sweep_outputs_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut contents = Vec::new();
    for name in ["a", "b"] {
        let out_dir = dir.path().join(name);
        let status = bin()
            .args([
                "sweep",
                "--n-min",
                "8",
                "--n-max",
                "12",
                "--fit-lo",
                "8",
                "--fit-hi",
                "12",
                "--taus",
                "0.5",
                "--ts",
                "1",
                "--emit",
                "csv,json",
                "--out-dir",
            ])
            .arg(&out_dir)
            .status()
            .unwrap();
        assert!(status.success());
        contents.push((
            std::fs::read(out_dir.join("sweep.csv")).unwrap(),
            std::fs::read(out_dir.join("sweep.json")).unwrap(),
        ));
    }
    assert_eq!(contents[0].0, contents[1].0);
    assert_eq!(contents[0].1, contents[1].1);
}

#[test]
fn unknown_flags_are_rejected() {
    let output = bin().args(["solve", "--bogus"]).output().unwrap();
    assert!(!output.status.success());
}
