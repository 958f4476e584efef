//! End-to-end checks of the `dinls` binary: exit codes, flag precedence,
//! artifact layout, snapshot round-trips, and the sweep worker pool.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dinls"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

const BLOWUP_CONFIG: &str = r#"
mode = "simulate"

[params]
dimension = 3
lambda1 = 1.0
lambda2 = -1.0
p1 = "1"
p2 = "3"
b1 = "2/5"
b2 = "1/2"

[grid]
radius = 10.0
points = 2048

[solver]
t_end = 0.5
dt0 = 1e-3
sample_stride = 5

[initial_data]
width = 1.0
chirp = 1.0
target_energy = -0.5

[output]
directory = "out"
snapshot = "binary"
"#;

#[test]
fn classify_exit_codes_and_verdict_artifact() {
    let dir = tempfile::tempdir().unwrap();
    // Matching tuple: exit 0.
    let out = bin()
        .args([
            "classify", "--dimension", "3", "--lambda1", "1", "--lambda2", "1", "--p1", "1",
            "--p2", "3", "--b1", "1/2", "--b2", "1/2", "--out", "out",
        ])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let verdict = std::fs::read_to_string(dir.path().join("out/verdict.json")).unwrap();
    assert!(verdict.contains("GlobalCase1"));

    // No matching case: exit 2.
    let out = bin()
        .args([
            "classify", "--dimension", "3", "--lambda1", "-1", "--lambda2", "-1", "--p1", "1",
            "--p2", "3", "--b1", "2/5", "--b2", "1/2", "--out", "out2",
        ])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Invalid parameters: exit 1 naming the criticality constraint.
    let out = bin()
        .args([
            "classify", "--dimension", "3", "--lambda1", "1", "--lambda2", "1", "--p1", "1",
            "--p2", "2.9", "--b1", "1/2", "--b2", "1/2",
        ])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p2"));
}

#[test]
fn simulate_blowup_exits_3_with_detection_summary() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("config.toml"), BLOWUP_CONFIG);
    let out = bin()
        .args(["simulate", "--config", "config.toml"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["status"], "BlowupDetected");
    let t_detect = summary["t_detect"].as_f64().unwrap();
    let t_bound = summary["t_bound_predicted"].as_f64().unwrap();
    assert!(t_detect <= t_bound);
    assert!(summary["initial"]["energy_exact"].as_f64().unwrap() <= -0.5);
    assert_eq!(summary["initial"]["blowup_verdict"]["kind"], "BlowupCaseI");
    assert!(dir.path().join("out/diagnostics.csv").exists());
    assert!(dir.path().join("out/final_state.bin").exists());

    // The diagnostics CSV has the fixed column order.
    let csv = std::fs::read_to_string(dir.path().join("out/diagnostics.csv")).unwrap();
    assert!(csv.starts_with("t,mass,energy,kinetic,wn1,wn2,V,y,vpp_formula,max_amp,dt\n"));
}

#[test]
fn flag_overrides_are_recorded_in_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    write(
        &dir.path().join("config.toml"),
        r#"
mode = "simulate"

[params]
dimension = 3
lambda1 = 1.0
lambda2 = 1.0
p1 = "1"
p2 = "3"
b1 = "1/2"
b2 = "1/2"

[grid]
radius = 10.0
points = 128

[solver]
t_end = 0.01
dt0 = 5e-3

[output]
snapshot = "none"
"#,
    );
    let out = bin()
        .args(["simulate", "--config", "config.toml", "--dt", "1e-4"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["config"]["solver"]["dt0"].as_f64(), Some(1e-4));
}

#[test]
fn snapshot_roundtrip_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    write(
        &dir.path().join("config.toml"),
        r#"
mode = "simulate"

[params]
dimension = 3
lambda1 = 1.0
lambda2 = 1.0
p1 = "1"
p2 = "3"
b1 = "1/2"
b2 = "1/2"

[grid]
radius = 10.0
points = 256

[solver]
t_end = 0.02
dt0 = 1e-3

[initial_data]
amplitude = 0.8

[output]
directory = "first"
snapshot = "binary"
"#,
    );
    let out = bin()
        .args(["simulate", "--config", "config.toml"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    // Continue from the snapshot; t_end is absolute, so extend it.
    let out = bin()
        .args([
            "simulate",
            "--config",
            "config.toml",
            "--snapshot",
            "first/final_state.bin",
            "--t-end",
            "0.04",
            "--out",
            "second",
        ])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("second/summary.json")).unwrap())
            .unwrap();
    assert!((summary["final_time"].as_f64().unwrap() - 0.04).abs() < 1e-12);
}

#[test]
fn exponents_prints_the_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "exponents", "--dimension", "3", "--p", "2", "--b", "1/2", "--out", "out",
        ])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("(16/3, 8/3)"), "stdout: {stdout}");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/exponents.json")).unwrap())
            .unwrap();
    assert_eq!(json["intercritical"]["gamma"], "16/3");
    assert_eq!(json["intercritical_identity_defect"], "0");
    assert_eq!(json["wvz"]["w0"]["gamma"], "8");
}

#[test]
fn sweep_runs_configs_into_per_run_directories() {
    let dir = tempfile::tempdir().unwrap();
    let small_sim = |l2: f64| {
        format!(
            r#"
mode = "simulate"

[params]
dimension = 3
lambda1 = 1.0
lambda2 = {l2}
p1 = "1"
p2 = "3"
b1 = "2/5"
b2 = "1/2"

[grid]
radius = 10.0
points = 128

[solver]
t_end = 0.01
dt0 = 1e-3

[initial_data]
amplitude = 0.3

[output]
snapshot = "none"
"#
        )
    };
    write(&dir.path().join("defocusing.toml"), &small_sim(1.0));
    write(&dir.path().join("focusing.toml"), &small_sim(-1.0));
    write(
        &dir.path().join("sweep.toml"),
        r#"
mode = "sweep"

[output]
directory = "runs"

[sweep]
configs = ["defocusing.toml", "focusing.toml"]
jobs = 2
"#,
    );
    let out = bin()
        .args(["sweep", "--config", "sweep.toml"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("runs/defocusing/summary.json").exists());
    assert!(dir.path().join("runs/focusing/summary.json").exists());
}

#[test]
fn picard_check_and_convergence_modes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "picard-check", "--dimension", "3", "--lambda1", "1", "--lambda2", "1", "--p1",
            "1", "--p2", "3", "--b1", "1/2", "--b2", "1/2", "--amplitude", "0.2",
            "--grid-points", "256", "--radius", "10", "--horizon", "0.02", "--out", "out",
        ])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/picard.json")).unwrap())
            .unwrap();
    assert!(json["relative_l2_disagreement"].as_f64().unwrap() < 1e-3);

    let out = bin()
        .args([
            "convergence", "--linear", "--grid-points", "512", "--radius", "15", "--t-end",
            "0.1", "--dt-list", "4e-3,1e-3", "--out", "conv",
        ])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("conv/convergence.json").exists());
}

#[test]
fn verify_modes_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "verify-interpolation", "--dimension", "3", "--lambda1", "1", "--lambda2", "-1",
            "--p1", "1", "--p2", "3", "--b1", "2/5", "--b2", "1/2", "--count", "20",
            "--grid-points", "1024", "--out", "interp",
        ])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("interp/interpolation.json").exists());
    assert!(dir.path().join("interp/interpolation.csv").exists());

    let out = bin()
        .args([
            "verify-kinetic", "--dimension", "3", "--lambda1", "1", "--lambda2", "-1", "--p1",
            "2", "--p2", "3", "--b1", "2/5", "--b2", "1/2", "--amplitude", "0.3",
            "--grid-points", "512", "--radius", "20", "--t-end", "0.2", "--out", "kin",
        ])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("kin/kinetic.json").exists());
    assert!(dir.path().join("kin/diagnostics.csv").exists());
}
