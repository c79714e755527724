use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn seqrisk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqrisk"))
        .args(args)
        .env_remove("SEQRISK_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn run_config(config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    seqrisk(&args)
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn plan_reports_vc_sample_size() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("plan");
    let o = run_config(&configs().join("plan_vc.json"), &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert_eq!(s["result"]["n"], 2258);
    assert_eq!(s["seed"], 1);
    assert!(out.join("metadata.json").exists());
}

#[test]
fn unknown_field_is_a_config_error_with_no_output() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        &tmp,
        "bad.json",
        r#"{"seed": 1, "command": {"plan": {"epsilon": 0.1, "delta": 0.01, "epsilon2": 3,
            "params": {"method": "vc", "d_vc": 2}}}}"#,
    );
    let out = tmp.path().join("out");
    let o = run_config(&cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());

    // nested unknown field inside a library type
    let cfg = write_config(
        &tmp,
        "bad2.json",
        r#"{"seed": 1, "command": {"simulate": {"n": 10,
            "process": {"kind": "markov_binary", "rho": 0.5, "extra": 1}}}}"#,
    );
    assert_eq!(run_config(&cfg, &out, &[]).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn invalid_parameter_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        &tmp,
        "delta.json",
        r#"{"seed": 1, "command": {"plan": {"epsilon": 0.1, "delta": 1.5, "params": {"method": "vc", "d_vc": 2}}}}"#,
    );
    let out = tmp.path().join("out");
    assert_eq!(run_config(&cfg, &out, &[]).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn missing_config_is_an_io_error() {
    let tmp = TempDir::new().unwrap();
    let o = run_config(&tmp.path().join("nope.json"), &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn vc_validation_writes_records_and_holds() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("v");
    let o = run_config(&configs().join("validate_vc.json"), &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("records.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("replication,seed,statistic,bound,holds"));
    assert_eq!(lines.count(), 200);
    assert!(summary(&out)["result"]["holds_fraction"].as_f64().unwrap() >= 0.95);
}

#[test]
fn replications_flag_overrides_config() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("v");
    let o = run_config(&configs().join("validate_vc.json"), &out, &["--replications", "20", "--threads", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(out.join("records.csv")).unwrap();
    assert_eq!(csv.lines().count(), 21);
    assert_eq!(summary(&out)["config"]["command"]["validate"]["replications"], 20);
}

#[test]
fn summaries_are_byte_identical_across_runs() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let o = run_config(&configs().join("validate_vc.json"), out, &["--replications", "30", "--seed", "99"]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(a.join("summary.json")).unwrap(), fs::read(b.join("summary.json")).unwrap());
    assert_eq!(fs::read(a.join("records.csv")).unwrap(), fs::read(b.join("records.csv")).unwrap());
    assert_eq!(summary(&a)["seed"], 99);
}

#[test]
fn out_dir_defaults_to_environment() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_seqrisk"))
        .args(["run", "--config", configs().join("plan_vc.json").to_str().unwrap()])
        .env("SEQRISK_OUT_DIR", &out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("summary.json").exists());
}

#[test]
fn simulate_writes_sequence_csv() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("s");
    assert_eq!(run_config(&configs().join("simulate_ar1.json"), &out, &[]).status.code(), Some(0));
    let csv = fs::read_to_string(out.join("sequence.csv")).unwrap();
    assert!(csv.starts_with("index,x0,y\n"));
    assert_eq!(csv.lines().count(), 501);
}

#[test]
fn bound_sweep_plot_is_sorted_and_decreasing() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("b");
    assert_eq!(run_config(&configs().join("bound_sweep.json"), &out, &[]).status.code(), Some(0));
    let s = summary(&out);
    for entry in s["result"].as_array().unwrap() {
        assert!(entry["result"]["theorem_tag"].as_str().unwrap().starts_with("vc-dependent"));
    }
    let plot = tmp.path().join("plot.csv");
    let o = seqrisk(&["plot", "--records", out.join("records.csv").to_str().unwrap(), "--out", plot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&plot).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("sweep,statistic,bound,holds"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').take(3).map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![1000.0, 10000.0, 100000.0]);
    assert!(rows.windows(2).all(|w| w[1][2] < w[0][2]));
}

#[test]
fn plot_rejects_malformed_records() {
    let tmp = TempDir::new().unwrap();
    let rec = tmp.path().join("r.csv");
    fs::write(&rec, "replication,seed,statistic,bound,holds\n0,1,zero,1,true\n").unwrap();
    let plot = tmp.path().join("p.csv");
    let o = seqrisk(&["plot", "--records", rec.to_str().unwrap(), "--out", plot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!plot.exists());
}

#[test]
fn failed_acceptance_property_exits_3() {
    // contradictory constraints: theta >= x + gamma and theta <= x - gamma
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        &tmp,
        "infeasible.json",
        r#"{"seed": 5, "command": {"validate": {
            "n": 100, "delta": 0.2, "replications": 4,
            "process": {"kind": "ar1_threshold", "a": 0.5, "sigma": 1.0, "b_star": 0.0, "flip_p": 0.0},
            "experiment": {"experiment": "scenario", "epsilon": 0.9, "draws": 100, "program": {
                "objective": [1.0],
                "pieces": [
                    {"psi_linear": [[0.0]], "psi_offset": [-1.0], "eta_linear": [1.0]},
                    {"psi_linear": [[0.0]], "psi_offset": [1.0], "eta_linear": [-1.0]}
                ],
                "feasible_set": {"box": {"lower": [-2.0], "upper": [2.0]}},
                "margin": 1.0}}}}}"#,
    );
    let out = tmp.path().join("out");
    let o = run_config(&cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(summary(&out)["property_holds"], false);
}
