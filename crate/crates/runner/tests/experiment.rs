use std::fs;
use std::path::Path;
use std::process::Command;

use heatbo_runner::config::Algorithm;
use heatbo_runner::experiment::{read_csv, SummaryRow, TimingRecord, TraceRecord, TRACE_HEADER};
use heatbo_runner::{run_experiment, ExperimentConfig, RunnerError};

fn small_config(out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::from_toml(
        r#"
        [benchmark]
        name = "labs"
        dims = 8

        [run]
        init = 4
        budget = 5
        seeds = [3, 7]
        record_timing = false
        "#,
    )
    .unwrap();
    cfg.run.output = out.to_path_buf();
    cfg
}

#[test]
fn two_seeds_write_expected_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&small_config(dir.path())).unwrap();
    assert_eq!(out.traces.len(), 2);
    assert_eq!(out.timings.len(), 2);
    for (path, seed) in out.traces.iter().zip([3u64, 7]) {
        let text = fs::read_to_string(path).unwrap();
        assert_eq!(text.lines().next().unwrap(), TRACE_HEADER.join(","));
        let rows: Vec<TraceRecord> = read_csv(path).unwrap();
        assert_eq!(rows.len(), 9);
        assert!(rows.iter().all(|r| r.seed == seed && r.elapsed_ms == 0.0));
        assert!(rows.windows(2).all(|w| w[1].incumbent <= w[0].incumbent));
        assert!(rows[4..].iter().all(|r| r.tr_radius.is_some()));
        assert!(rows[..4].iter().all(|r| r.tr_radius.is_none()));
    }
    let timing: Vec<TimingRecord> = read_csv(&out.timings[0]).unwrap();
    assert_eq!(timing.len(), 9);
    let summary: Vec<SummaryRow> = read_csv(&out.summary).unwrap();
    assert_eq!(summary.len(), 9);
}

#[test]
fn rerun_is_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut cfg_b = small_config(b.path());
    cfg_b.run.parallel = 2;
    let out_a = run_experiment(&small_config(a.path())).unwrap();
    let out_b = run_experiment(&cfg_b).unwrap();
    for (pa, pb) in out_a.traces.iter().zip(&out_b.traces) {
        assert_eq!(fs::read(pa).unwrap(), fs::read(pb).unwrap());
    }
    assert_eq!(fs::read(&out_a.summary).unwrap(), fs::read(&out_b.summary).unwrap());
}

#[test]
fn summary_recomputes_from_traces() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.run.seeds = vec![0, 1, 2];
    let out = run_experiment(&cfg).unwrap();
    let traces: Vec<Vec<TraceRecord>> = out.traces.iter().map(|p| read_csv(p).unwrap()).collect();
    let summary: Vec<SummaryRow> = read_csv(&out.summary).unwrap();
    for (t, row) in summary.iter().enumerate() {
        let vals: Vec<f64> = traces.iter().map(|tr| tr[t].incumbent).collect();
        let mean = (vals[0] + vals[1] + vals[2]) / 3.0;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 2.0;
        assert_eq!(row.iteration, t);
        assert_eq!(row.mean_incumbent, mean);
        assert_eq!(row.sem, var.sqrt() / 3f64.sqrt());
    }
}

#[test]
fn random_search_uses_whole_budget() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.run.algorithm = Algorithm::RandomSearch;
    cfg.run.seeds = vec![5];
    let out = run_experiment(&cfg).unwrap();
    let rows: Vec<TraceRecord> = read_csv(&out.traces[0]).unwrap();
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0].run_id, "labs-random-s5");
}

#[test]
fn startup_errors_precede_any_run() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("occupied");
    fs::write(&file, "x").unwrap();
    let cfg = small_config(&file.join("sub"));
    assert!(matches!(run_experiment(&cfg), Err(RunnerError::Config(_))));

    let mut cfg = small_config(&dir.path().join("never"));
    cfg.kernel.family = "no-such-kernel".into();
    assert!(matches!(run_experiment(&cfg), Err(RunnerError::Config(_))));
    assert!(!dir.path().join("never").exists());

    let mut cfg = small_config(&dir.path().join("never"));
    cfg.benchmark.name = "no-such-benchmark".into();
    assert!(matches!(run_experiment(&cfg), Err(RunnerError::Config(_))));
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_heatbo"))
}

#[test]
fn cli_exit_codes_and_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    fs::write(
        &config,
        "[benchmark]\nname = \"onemax\"\ndims = 6\n[run]\ninit = 3\nbudget = 2\noutput = \"ignored\"\n",
    )
    .unwrap();
    let env_dir = dir.path().join("from-env");
    let status = cli()
        .args(["run", config.to_str().unwrap(), "--seeds", "1,2"])
        .env("HEATBO_OUT_DIR", &env_dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(env_dir.join("trace_seed2.csv").exists());

    let cli_dir = dir.path().join("from-cli");
    let status = cli()
        .args(["run", config.to_str().unwrap(), "--out", cli_dir.to_str().unwrap()])
        .env("HEATBO_OUT_DIR", &env_dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(cli_dir.join("trace_seed0.csv").exists());

    let missing = cli().args(["run", "/nonexistent/exp.toml"]).status().unwrap();
    assert_eq!(missing.code(), Some(1));
    let bad = cli()
        .args(["run", config.to_str().unwrap(), "--kernel", "nope"])
        .env("HEATBO_OUT_DIR", &env_dir)
        .status()
        .unwrap();
    assert_eq!(bad.code(), Some(1));

    let st = cli().arg("selftest").output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    let text = String::from_utf8(st.stdout).unwrap();
    assert!(text.contains("distinct eigenvalues: 77 15 9 5 3 1 — PASS"));
    assert!(text.contains("padded distance 4 vs sorted 7 — PASS"));

    let kernels = cli().arg("list-kernels").output().unwrap();
    assert!(String::from_utf8(kernels.stdout).unwrap().lines().any(|l| l == "heat"));
}
