//! End-to-end checks of the command-line interface: artifact schemas,
//! exit codes, and byte-level reproducibility.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_exsca"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn temp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("exsca-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn json_file(dir: &Path, name: &str) -> serde_json::Value {
    let text = fs::read_to_string(dir.join(name)).expect(name);
    serde_json::from_str(&text).expect("valid JSON")
}

#[test]
fn design_reports_pivot_location() {
    let out = temp_dir("design-apca");
    let result = run(&[
        "design", "--family", "apca", "-M", "4", "-N", "3", "-s", "2",
        "--out-dir", out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let geometry = json_file(&out, "geometry.json");
    assert_eq!(geometry["family"], "apca");
    assert_eq!(geometry["pivot"], serde_json::json!([2, 2]));
    assert_eq!(geometry["subarrays"][0], serde_json::json!([0, 4, 8]));
    assert_eq!(geometry["union"].as_array().unwrap().len(), 6);
    assert_eq!(geometry["overlaps"].as_array().unwrap().len(), 1);
}

#[test]
fn design_odd_shift_has_no_pivot() {
    let out = temp_dir("design-exsca");
    let result = run(&[
        "design", "--family", "exsca", "-M", "4", "-N", "3", "--ex", "2", "-s", "3",
        "--out-dir", out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let geometry = json_file(&out, "geometry.json");
    assert!(geometry["pivot"].is_null());
    assert_eq!(geometry["union"].as_array().unwrap().len(), 7);
    assert!(geometry["overlaps"].as_array().unwrap().is_empty());
}

#[test]
fn missing_spacing_is_a_usage_error() {
    let result = run(&["design", "--family", "apca", "-M", "4", "-s", "2"]);
    assert_eq!(result.status.code(), Some(2));
    let result = run(&["design", "-M", "4", "-N", "3"]);
    assert_eq!(result.status.code(), Some(2));
    let result = run(&["design", "--family", "nosuch", "-M", "4", "-N", "3"]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn analyze_emits_comparison_artifacts() {
    let out = temp_dir("analyze");
    let result = run(&[
        "analyze", "--family", "exsca", "-M", "4", "-N", "3", "--ex", "2", "-s", "3",
        "--out-dir", out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    for name in [
        "weights.csv",
        "bias_simulated.csv",
        "bias_simulated_normalized.csv",
        "bias_theory.csv",
        "bias_theory_normalized.csv",
        "comparison.json",
    ] {
        assert!(out.join(name).exists(), "{name} missing");
    }
    let report = json_file(&out, "comparison.json");
    assert_eq!(report["closed_form_applicable"], true);
    assert_eq!(report["weight_routes_equal"], true);
    assert!(report["max_abs_dev"].as_f64().unwrap() <= 1e-9);
    assert_eq!(report["elements"], 7);

    let weights = fs::read_to_string(out.join("weights.csv")).unwrap();
    assert!(weights.starts_with("lag,count\n"));
    let bias = fs::read_to_string(out.join("bias_theory.csv")).unwrap();
    assert!(bias.starts_with("f,value\n"));
}

#[test]
fn analyze_shift_sweep_reports_unique_counts() {
    for (s, count) in [(0, 17), (1, 19), (2, 21)] {
        let out = temp_dir(&format!("sweep-{s}"));
        let result = run(&[
            "analyze", "--family", "apca", "-M", "4", "-N", "3", "-s", &s.to_string(),
            "--grid", "512", "--out-dir", out.to_str().unwrap(),
        ]);
        assert!(result.status.success());
        let report = json_file(&out, "comparison.json");
        assert_eq!(report["unique_count"], count, "s={s}");
        assert_eq!(report["closed_form_applicable"], true);
    }
}

#[test]
fn analyze_flags_overlap_and_respects_strict() {
    let subarrays = "3:4:1:3:1:0,4:3:1:3:1:0";
    let out = temp_dir("overlap");
    let result = run(&[
        "analyze", "--family", "generalized", "--subarrays", subarrays,
        "--out-dir", out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "non-strict run reports, not fails");
    let report = json_file(&out, "comparison.json");
    assert_eq!(report["closed_form_applicable"], false);
    assert!(!report["overlaps"].as_array().unwrap().is_empty());
    assert!(!out.join("bias_theory.csv").exists());

    let strict = run(&[
        "analyze", "--family", "generalized", "--subarrays", subarrays,
        "--out-dir", out.to_str().unwrap(), "--strict",
    ]);
    assert_eq!(strict.status.code(), Some(3));
}

#[test]
fn analyze_displaced_routes_through_generalized_forms() {
    let out = temp_dir("displaced");
    let result = run(&[
        "analyze", "--family", "exsca", "-M", "4", "-N", "3", "--ex", "2", "-s", "31",
        "--displaced", "--grid", "512", "--out-dir", out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let report = json_file(&out, "comparison.json");
    assert_eq!(report["closed_form_applicable"], true);
    assert!(report["max_abs_dev"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn estimate_is_byte_reproducible() {
    let out1 = temp_dir("est1");
    let out2 = temp_dir("est2");
    let args = |dir: &PathBuf| {
        vec![
            "estimate".to_string(), "--family".into(), "apca".into(),
            "-M".into(), "4".into(), "-N".into(), "3".into(), "-s".into(), "2".into(),
            "--peaks".into(), "0.1,0.3,0.6".into(),
            "-K".into(), "10".into(), "--trials".into(), "5".into(),
            "--seed".into(), "77".into(), "--grid".into(), "512".into(),
            "--out-dir".into(), dir.to_str().unwrap().to_string(),
        ]
    };
    let r1 = bin().args(args(&out1)).output().unwrap();
    let r2 = bin().args(args(&out2)).output().unwrap();
    assert!(r1.status.success() && r2.status.success());
    assert_eq!(
        fs::read(out1.join("spectrum.csv")).unwrap(),
        fs::read(out2.join("spectrum.csv")).unwrap(),
        "spectrum bytes differ between identical runs"
    );
    let p1 = fs::read(out1.join("peaks.json")).unwrap();
    let p2 = fs::read(out2.join("peaks.json")).unwrap();
    assert_eq!(p1, p2, "peaks bytes differ between identical runs");

    let peaks = json_file(&out1, "peaks.json");
    assert_eq!(peaks["truth"], serde_json::json!([0.1, 0.3, 0.6]));
    assert_eq!(peaks["per_trial_errors"].as_array().unwrap().len(), 5);
    assert!(peaks["mean_error"].as_f64().unwrap() < 0.05);
}

#[test]
fn estimate_hybrid2d_emits_triples() {
    let out = temp_dir("est2d");
    let result = run(&[
        "estimate", "--family", "hybrid2d", "-M", "4", "-N", "3", "--ex", "2", "-s", "3",
        "--dim1", "nyquist", "--dim2", "exsca",
        "--peaks-2d", "0:0.1,0:0.3,0:0.6",
        "-K", "25", "--trials", "2", "--grid-2d", "64",
        "--seed", "5", "--out-dir", out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let spectrum = fs::read_to_string(out.join("spectrum2d.csv")).unwrap();
    assert!(spectrum.starts_with("i,j,power\n"));
    assert_eq!(spectrum.lines().count(), 64 * 64 + 1);
    let matrix = json_file(&out, "spectrum2d.json");
    assert_eq!(matrix["grid_size"], 64);
    assert_eq!(matrix["values"].as_array().unwrap().len(), 64);
    let weights = fs::read_to_string(out.join("weights2d.csv")).unwrap();
    assert!(weights.starts_with("l1,l2,count\n"));
    let config = json_file(&out, "config.json");
    assert_eq!(config["family"], "hybrid2d");
    let peaks = json_file(&out, "peaks.json");
    assert_eq!(peaks["peaks"].as_array().unwrap().len(), 3);
    assert!(peaks["mean_error"].as_f64().unwrap() < 0.05);
}

#[test]
fn config_file_with_flag_override() {
    let out = temp_dir("config");
    fs::create_dir_all(&out).unwrap();
    let config_path = out.join("experiment.json");
    fs::write(
        &config_path,
        r#"{"family": "apca", "m": 4, "n": 3, "shift": 0}"#,
    )
    .unwrap();
    let result = run(&[
        "design", "--config", config_path.to_str().unwrap(),
        "-s", "2", "--out-dir", out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let geometry = json_file(&out, "geometry.json");
    assert_eq!(geometry["pivot"], serde_json::json!([2, 2]), "flag overrides file");

    fs::write(&config_path, r#"{"family": "apca", "emm": 4}"#).unwrap();
    let rejected = run(&["design", "--config", config_path.to_str().unwrap()]);
    assert_eq!(rejected.status.code(), Some(2), "unknown keys are rejected");
}
