use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sap_sim::Error;

fn sap_sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sap-sim")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_scenario(dir: &Path, body: &str) -> String {
    let path = dir.join("scenario.toml");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const TRAJECTORY: &str = r#"
name = "traj"
mode = "trajectory"

[physics]
energy = 1.25
total_time = 4000.0

[numerics]
samples = 201
"#;

#[test]
fn trajectory_run_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_scenario(dir.path(), TRAJECTORY);
    let out = dir.path().join("out");
    let res = sap_sim(&["trajectory", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));

    let csv = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,d_L,d_M,d_R,sep_LM,sep_MR");
    assert_eq!(lines.count(), 201);

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["mode"], "trajectory");
    assert_eq!(manifest["scenario_hash"].as_str().unwrap().len(), 64);
    assert!(manifest["outputs"].as_array().unwrap().iter().any(|f| f == "trajectory.csv"));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_scenario(dir.path(), TRAJECTORY);
    let mut files = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let res = sap_sim(&["trajectory", "--config", &config, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&res), 0);
        let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
        files.push((fs::read(out.join("trajectory.csv")).unwrap(), manifest["scenario_hash"].clone()));
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn overrides_change_the_scenario_hash() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_scenario(dir.path(), TRAJECTORY);
    let mut hashes = Vec::new();
    for set in ["physics.total_time=4000.0", "physics.total_time=12000.0"] {
        let out = dir.path().join(set.replace(['.', '='], "_"));
        let res = sap_sim(&["trajectory", "--config", &config, "--set", set, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&res), 0);
        let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
        hashes.push(manifest["scenario_hash"].as_str().unwrap().to_owned());
    }
    assert_ne!(hashes[0], hashes[1]);
}

#[test]
fn hubbard_run_compares_cotunneling() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig6");
    let res = sap_sim(&["hubbard-run", "--preset", "fig6", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    for f in [
        "populations_cotunneling_on.csv",
        "populations_cotunneling_off.csv",
        "dark_state_cotunneling_on.json",
        "dark_state_cotunneling_off.json",
    ] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let runs = manifest["diagnostics"]["runs"].as_array().unwrap();
    let on = runs.iter().find(|r| r["cotunneling"] == true).unwrap();
    let off = runs.iter().find(|r| r["cotunneling"] == false).unwrap();
    assert!(on["final_target_population"].as_f64().unwrap() > 0.99);
    assert!(off["final_target_population"].as_f64().unwrap() < 0.9);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_scenario(dir.path(), TRAJECTORY);
    let cases: &[&[&str]] = &[
        &["trajectory", "--config", &config, "--set", "physics.energy=2.0", "--set", "mode=rates"],
        &["rates", "--config", &config],
        &["trajectory", "--config", &config, "--set", "trajectory.d_min=9"],
        &["trajectory", "--config", &config, "--set", "numerics.no_such_key=1"],
        &["no-such-mode", "--config", &config],
        &["trajectory", "--preset", "no-such-preset"],
        &["trajectory"],
    ];
    for args in cases {
        let res = sap_sim(args);
        assert_eq!(code(&res), 2, "{args:?}: {}", String::from_utf8_lossy(&res.stderr));
    }
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_scenario(dir.path(), TRAJECTORY);
    let blocker = dir.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    let out = blocker.join("out");
    let res = sap_sim(&["trajectory", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 4, "{}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn numerical_failures_map_to_exit_3() {
    let errors = [
        Error::StepSize("drift".into()),
        Error::WindowTooNarrow { start: 0.0, end: 1.0, ratio: 0.1 },
        Error::Singularity { time: 0.0, gap: 0.0 },
        Error::NonConvergence { method: "chfsi", iterations: 1, residual: 1.0, tolerance: 0.1 },
    ];
    for e in errors {
        assert_eq!(e.exit_code(), 3, "{e}");
    }
}

#[test]
fn validate_reports_every_preset() {
    for (name, _) in sap_sim::scenario::PRESETS {
        let res = sap_sim(&["validate", "--preset", name]);
        assert_eq!(code(&res), 0, "{name}: {}", String::from_utf8_lossy(&res.stderr));
        let report: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
        assert!(report.is_object());
    }
}
