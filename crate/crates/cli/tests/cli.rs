use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qrepeater_core::chain::FidelityTrace;
use qrepeater_core::rate::{read_curves_csv, write_curves_csv, Regime};

const GOLDEN: &str = "tests/golden";

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(GOLDEN).join(name)).expect("golden file should be readable")
}

fn qrepeater(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrepeater"))
        .args(args)
        .output()
        .expect("binary should run")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn run_ok(args: &[&str]) -> String {
    let o = qrepeater(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

/// Runs a CSV-writing command and returns (stdout, file contents).
fn run_to_file(cfg: &str, command: &str) -> (String, String) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let cfg = config(cfg);
    let report = run_ok(&["--config", cfg.to_str().unwrap(), command, "--out", out.to_str().unwrap()]);
    (report, std::fs::read_to_string(out).unwrap())
}

#[test]
fn fixed_points_ideal_gates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ideal.toml");
    std::fs::write(&cfg, "[gate]\np1 = 1.0\np2 = 1.0\neta = 1.0\n").unwrap();
    assert_eq!(
        run_ok(&["--config", cfg.to_str().unwrap(), "fixed-points"]),
        "f_min=0.500000000000 f_max=1.000000000000\n"
    );
}

#[test]
fn fixed_points_baseline_golden() {
    let cfg = config("baseline.toml");
    assert_eq!(run_ok(&["--config", cfg.to_str().unwrap(), "fixed-points"]), golden("fixed_points_baseline.txt"));
}

#[test]
fn strong_noise_has_no_valid_range() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("noisy.toml");
    std::fs::write(&cfg, "[gate]\np1 = 1.0\np2 = 0.5\neta = 0.6\n").unwrap();
    let o = qrepeater(&["--config", cfg.to_str().unwrap(), "fixed-points"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no valid range"));
}

#[test]
fn trace_baseline_golden() {
    let (report, csv) = run_to_file("baseline.toml", "trace");
    assert_eq!(csv, golden("trace_baseline.csv"));
    assert_eq!(report, golden("trace_baseline.txt"));
    let parsed = FidelityTrace::read_csv(csv.as_bytes()).unwrap();
    let mut again = Vec::new();
    parsed.write_csv(&mut again).unwrap();
    assert_eq!(String::from_utf8(again).unwrap(), csv);
}

#[test]
fn trace_with_zero_depth_is_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("n0.toml");
    let out = dir.path().join("t.csv");
    std::fs::write(&cfg, "[chain]\ndepth = 0\n").unwrap();
    run_ok(&["--config", cfg.to_str().unwrap(), "trace", "--out", out.to_str().unwrap()]);
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("0,init,0.960000000000"));
}

#[test]
fn threshold_baseline_golden() {
    let cfg = config("baseline.toml");
    assert_eq!(run_ok(&["--config", cfg.to_str().unwrap(), "threshold"]), golden("threshold_baseline.txt"));
}

#[test]
fn threshold_without_memory_noise_is_infinite() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("none.toml");
    std::fs::write(&cfg, "[memory]\nmodel = \"none\"\n").unwrap();
    assert_eq!(run_ok(&["--config", cfg.to_str().unwrap(), "threshold"]), "d_th=Infinite\n");
    std::fs::write(&cfg, "[memory]\ntau_s = 0.0\n").unwrap();
    assert_eq!(run_ok(&["--config", cfg.to_str().unwrap(), "threshold"]), "d_th_km=50.0000000000 level=1\n");
}

#[test]
fn polynomial_sweep_golden() {
    let (report, csv) = run_to_file("polynomial.toml", "rate-sweep");
    assert_eq!(csv, golden("rate_polynomial.csv"));
    assert_eq!(report, golden("rate_polynomial.txt"));
    assert!(report.contains("fit.repeater_no_memory_noise.resource_normalized.kind=polynomial\n"));
    assert!(report.contains("fit.repeater_no_memory_noise.resource_normalized.parameter=2.00000000000\n"));
}

#[test]
fn exponential_sweep_golden() {
    let (report, csv) = run_to_file("exponential.toml", "rate-sweep");
    assert_eq!(csv, golden("rate_exponential.csv"));
    assert_eq!(report, golden("rate_exponential.txt"));
    assert!(report.contains("fit.repeater_memory_noise.time_normalized.kind=exponential\n"));
    assert!(report.contains("fit.repeater_memory_noise.time_normalized.window_min_km=200.000000000\n"));
    // Direct transmission decays at alpha·ln10/10 per km.
    assert!(report.contains("fit.direct.resource_normalized.parameter=0.0460517018599\n"));
}

#[test]
fn rate_csv_round_trips() {
    let (_, csv) = run_to_file("exponential.toml", "rate-sweep");
    let curves = read_curves_csv(csv.as_bytes()).unwrap();
    assert_eq!(curves.len(), 5);
    let regimes: Vec<Regime> = curves.iter().map(|c| c.regime()).collect();
    assert!(regimes.contains(&Regime::Direct));
    assert!(regimes.contains(&Regime::RepeaterNoMemoryNoise));
    assert!(regimes.contains(&Regime::RepeaterMemoryNoise));
    let mut again = Vec::new();
    write_curves_csv(&curves, &mut again).unwrap();
    assert_eq!(String::from_utf8(again).unwrap(), csv);
}

#[test]
fn identical_config_gives_identical_bytes() {
    for cfg in ["baseline.toml", "exponential.toml"] {
        let first = run_to_file(cfg, "rate-sweep");
        let second = run_to_file(cfg, "rate-sweep");
        assert_eq!(first, second);
    }
}

#[test]
fn short_sweep_is_an_analysis_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short.toml");
    let out = dir.path().join("r.csv");
    std::fs::write(&cfg, "[sweep]\nstart = 1\nstop = 4\n").unwrap();
    let o = qrepeater(&["--config", cfg.to_str().unwrap(), "rate-sweep", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at least 5"));
}

#[test]
fn purify_golden() {
    let cfg = config("baseline.toml");
    let out = run_ok(&["--config", cfg.to_str().unwrap(), "purify", "--fidelity", "0.9", "--rounds", "3"]);
    assert_eq!(out, golden("purify_baseline.csv"));
}

#[test]
fn swap_reports_each_chain_length() {
    let out = run_ok(&["swap", "--fidelity", "0.95", "--links", "3"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "links,fidelity");
    assert_eq!(lines[1], "1,0.950000000000");
    assert_eq!(lines.len(), 4);
}

#[test]
fn oracle_check_passes() {
    let out = run_ok(&["oracle-check", "--points", "8"]);
    assert!(out.contains("grid=8x9\n"));
    assert!(out.ends_with("status=ok\n"));
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let typo = dir.path().join("typo.toml");
    std::fs::write(&typo, "[gate]\np1 = 0.99\nprecision = 3\n").unwrap();
    let o = qrepeater(&["--config", typo.to_str().unwrap(), "fixed-points"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("precision"));

    let missing = dir.path().join("absent.toml");
    assert_eq!(qrepeater(&["--config", missing.to_str().unwrap(), "fixed-points"]).status.code(), Some(2));
    assert_eq!(qrepeater(&["trace"]).status.code(), Some(2));
    assert_eq!(qrepeater(&["--format", "json", "fixed-points"]).status.code(), Some(2));
    assert_eq!(qrepeater(&["purify", "--fidelity", "1.5"]).status.code(), Some(2));
    assert_eq!(qrepeater(&["no-such-command"]).status.code(), Some(2));
}
