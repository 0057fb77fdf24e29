//! CLI-level acceptance: determinism of the verify report (criterion 11),
//! exit codes, and the documented output surfaces.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

fn critline() -> Command {
    Command::new(env!("CARGO_BIN_EXE_critline"))
}

#[test]
fn a11_verify_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| -> (Vec<u8>, f64) {
        let path: PathBuf = dir.path().join(name);
        let start = Instant::now();
        let status = critline()
            .args(["verify", "--suite", "all", "--seed", "7", "--out"])
            .arg(&path)
            .status()
            .unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        assert!(status.success(), "verify exited with {status}");
        (std::fs::read(&path).unwrap(), elapsed)
    };
    let (first, t1) = run("report1.txt");
    let (second, t2) = run("report2.txt");
    assert_eq!(first, second, "verify reports differ between runs");
    let total = t1 + t2;
    println!(
        "PASS A11 determinism — two runs byte-identical ({} bytes), total {total:.1}s (< 900s each)",
        first.len()
    );
    assert!(t1 < 900.0 && t2 < 900.0, "verify exceeded the 15-minute budget");
    let text = String::from_utf8(first).unwrap();
    assert!(text.contains("10 passed, 0 failed"), "report did not pass cleanly:\n{text}");
}

#[test]
fn usage_error_exits_one() {
    let status = critline().args(["qpe", "--no-such-flag"]).status().unwrap();
    assert_eq!(status.code(), Some(1));
    let status = critline().args(["frobnicate"]).status().unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn promise_violation_exits_two() {
    // A window with no classification change aborts with the violation code.
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("instance.json");
    std::fs::write(
        &instance,
        r#"{"n":4,"mode":{"kind":"one","alpha":0.2,"beta":0.4},
           "oracle":{"kind":"planted_step","phi_star":0.9},
           "phi_window":[0.0,0.5],"theta_window":[0.0,0.0]}"#,
    )
    .unwrap();
    let status = critline()
        .args(["phase-diagram", "--mode", "1crt", "--tol", "0.001", "--instance"])
        .arg(&instance)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn qpe_midpoint_mass_is_half() {
    // At ξ = 2^{-t-1} the CSV masses at labels ≤ 0 sum to exactly 1/2.
    let output = critline().args(["qpe", "--t", "4", "--xi", "0.03125"]).output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let mut mass = 0.0;
    for line in text.lines() {
        if line.starts_with('#') || line.starts_with("label") {
            continue;
        }
        let (label, value) = line.split_once(',').unwrap();
        let label: i64 = label.parse().unwrap();
        if label <= 0 {
            mass += value.parse::<f64>().unwrap();
        }
    }
    assert!((mass - 0.5).abs() < 1e-10, "low-half mass {mass}");
}

#[test]
fn encode_decode_round_trip() {
    let out = critline().args(["encode", "5"]).output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "101222");
    let out = critline().args(["decode", "101222"]).output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "5");
    let out = critline().args(["encode", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn eta_accepts_oracle_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = critline_core::eta::toy_observable_oracle().unwrap();
    let file = critline_core::eta::OracleFile::from_spec(&spec);
    let path = dir.path().join("oracle.json");
    std::fs::write(&path, serde_json::to_string_pretty(&file).unwrap()).unwrap();
    let output = critline()
        .args(["eta", "--mode", "two", "--phi", "0.23", "--theta", "1.45", "--t", "6", "--oracle"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(output.status.success());
    let parsed: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let value = parsed["data"]["value"].as_f64().unwrap();
    assert!(value >= 0.5, "eta_max {value} below the YES threshold");
    // The artifact embeds seed and version.
    assert_eq!(parsed["meta"]["seed"].as_u64(), Some(42));
    assert!(parsed["meta"]["version"].is_string());
}

#[test]
fn phase_diagram_writes_grid_csv() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("instance.json");
    std::fs::write(
        &instance,
        r#"{"n":4,"mode":{"kind":"one","alpha":0.2,"beta":0.6},
           "oracle":{"kind":"planted_step","phi_star":0.37},
           "phi_window":[0.0,1.0],"theta_window":[0.0,0.0]}"#,
    )
    .unwrap();
    let json_out = dir.path().join("diagram.json");
    let csv_out = dir.path().join("grid.csv");
    let status = critline()
        .args(["phase-diagram", "--mode", "1crt", "--tol", "0.001", "--brute", "101"])
        .arg("--instance")
        .arg(&instance)
        .arg("--csv")
        .arg(&csv_out)
        .arg("--out")
        .arg(&json_out)
        .status()
        .unwrap();
    assert!(status.success());
    let diagram: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_out).unwrap()).unwrap();
    assert_eq!(diagram["data"]["decision"].as_str(), Some("Yes"));
    let csv = std::fs::read_to_string(&csv_out).unwrap();
    let rows = csv.lines().filter(|l| !l.starts_with('#') && !l.starts_with("phi")).count();
    assert_eq!(rows, 101);
    // Flip count across the grid is exactly one.
    let labels: Vec<&str> = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("phi"))
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    let flips = labels.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(flips, 1);
}

#[test]
fn config_file_supplies_seed() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{"seed": 1234}"#).unwrap();
    let output = critline()
        .args(["compare", "--phi", "0.1", "--lambda", "0.2", "--t", "3", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(output.status.success());
    let parsed: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(parsed["meta"]["seed"].as_u64(), Some(1234));
}

#[test]
fn out_dir_env_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let output = critline()
        .args(["encode", "9", "--out", "encoded.txt"])
        .env("CRITLINE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = std::fs::read_to_string(dir.path().join("encoded.txt")).unwrap();
    assert_eq!(text.trim(), "10012222");
}
