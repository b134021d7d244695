//! Seeded multi-run execution and CSV persistence.
//!
//! Per seed `s` the output directory receives `trace_seed{s}.csv` (the trace
//! schema below) and `timing_seed{s}.csv` (objective time per iteration);
//! `summary.csv` aggregates the incumbents across seeds.

use std::fs;
use std::path::{Path, PathBuf};

use heatbo::benchmarks::{relocate_objective, Benchmark, BenchmarkOptions};
use heatbo::bo::{random_search, run_bo, InitialDesign, TraceRow};
use heatbo::rng::relocation_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, ExperimentConfig};
use crate::RunnerError;

/// Trace columns, in order.
pub const TRACE_HEADER: [&str; 8] = [
    "run_id",
    "seed",
    "iteration",
    "point",
    "raw_value",
    "incumbent",
    "elapsed_ms",
    "tr_radius",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub run_id: String,
    pub seed: u64,
    pub iteration: usize,
    /// Category indices joined by `;`.
    pub point: String,
    pub raw_value: f64,
    pub incumbent: f64,
    pub elapsed_ms: f64,
    pub tr_radius: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub iteration: usize,
    pub objective_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub iteration: usize,
    pub mean_incumbent: f64,
    /// Sample standard deviation over seeds divided by `√seeds`; 0 for one seed.
    pub sem: f64,
    pub mean_elapsed_ms: f64,
}

/// Files written by [`run_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub traces: Vec<PathBuf>,
    pub timings: Vec<PathBuf>,
    pub summary: PathBuf,
    pub rows: Vec<SummaryRow>,
}

fn runtime(e: impl std::fmt::Display) -> RunnerError {
    RunnerError::Runtime(e.to_string())
}

/// Benchmark named by the config, relocated when requested.
pub fn build_benchmark(cfg: &ExperimentConfig) -> Result<Benchmark, RunnerError> {
    let b = &cfg.benchmark;
    let instance = match &b.instance {
        Some(path) => Some(
            fs::read_to_string(path)
                .map_err(|e| RunnerError::Config(format!("{}: {e}", path.display())))?,
        ),
        None => None,
    };
    let opts = BenchmarkOptions {
        dims: b.dims,
        grid: b.grid,
        instance,
        synthetic_clauses: b.synthetic_clauses,
        noise_seed: b.noise_seed,
    };
    let bench = Benchmark::from_name(&b.name, &opts).map_err(|e| RunnerError::Config(e.to_string()))?;
    Ok(if b.relocate {
        let seed = b.relocation_seed.unwrap_or_else(|| relocation_seed(&b.name, 0));
        relocate_objective(bench, seed)
    } else {
        bench
    })
}

pub fn run_id(cfg: &ExperimentConfig, seed: u64) -> String {
    let method = match cfg.run.algorithm {
        Algorithm::Bo => cfg.kernel.family.as_str(),
        Algorithm::RandomSearch => "random",
    };
    let reloc = if cfg.benchmark.relocate { "-reloc" } else { "" };
    format!("{}{reloc}-{method}-s{seed}", cfg.benchmark.name)
}

/// One seed's trace.
pub fn run_seed(cfg: &ExperimentConfig, bench: &Benchmark, seed: u64) -> Result<Vec<TraceRow>, RunnerError> {
    let objective = |x: &heatbo::Point| bench.evaluate(x);
    match cfg.run.algorithm {
        Algorithm::Bo => {
            let spec = cfg.kernel.build(bench.space(), seed)?;
            run_bo(
                objective,
                bench.space(),
                spec,
                cfg.bo_config(),
                InitialDesign::Random(cfg.run.init),
                cfg.run.budget,
                seed,
            )
            .map_err(runtime)
        }
        Algorithm::RandomSearch => {
            random_search(objective, bench.space(), cfg.run.init + cfg.run.budget, seed).map_err(runtime)
        }
    }
}

fn to_records(cfg: &ExperimentConfig, seed: u64, rows: &[TraceRow]) -> Vec<TraceRecord> {
    let id = run_id(cfg, seed);
    rows.iter()
        .map(|r| TraceRecord {
            run_id: id.clone(),
            seed,
            iteration: r.iteration,
            point: r.point.join(";"),
            raw_value: r.value,
            incumbent: r.incumbent,
            elapsed_ms: if cfg.run.record_timing { r.elapsed_ms } else { 0.0 },
            tr_radius: r.tr_radius,
        })
        .collect()
}

fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<(), RunnerError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r).map_err(runtime)?;
    }
    w.flush().map_err(runtime)
}

pub fn read_csv<R: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<R>, RunnerError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    r.deserialize().map(|row| row.map_err(runtime)).collect()
}

/// Mean incumbent, SEM and mean elapsed time per iteration across traces.
/// Traces of different lengths are summarized over their common prefix.
pub fn summarize(traces: &[Vec<TraceRecord>]) -> Vec<SummaryRow> {
    let len = traces.iter().map(Vec::len).min().unwrap_or(0);
    let k = traces.len() as f64;
    (0..len)
        .map(|t| {
            let inc: Vec<f64> = traces.iter().map(|tr| tr[t].incumbent).collect();
            let mean = inc.iter().sum::<f64>() / k;
            let sem = if traces.len() > 1 {
                let var = inc.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
                var.sqrt() / k.sqrt()
            } else {
                0.0
            };
            let elapsed = traces.iter().map(|tr| tr[t].elapsed_ms).sum::<f64>() / k;
            SummaryRow {
                iteration: t,
                mean_incumbent: mean,
                sem,
                mean_elapsed_ms: elapsed,
            }
        })
        .collect()
}

fn prepare_output(dir: &Path) -> Result<(), RunnerError> {
    fs::create_dir_all(dir).map_err(|e| RunnerError::Config(format!("{}: {e}", dir.display())))?;
    let probe = dir.join(".write-probe");
    fs::write(&probe, b"").map_err(|e| RunnerError::Config(format!("{} is not writable: {e}", dir.display())))?;
    let _ = fs::remove_file(probe);
    Ok(())
}

/// Validates the config, runs every seed (in parallel when configured) and
/// writes traces, timings and the summary.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, RunnerError> {
    cfg.validate()?;
    let bench = build_benchmark(cfg)?;
    if cfg.run.algorithm == Algorithm::Bo {
        cfg.kernel.build(bench.space(), cfg.run.seeds[0])?;
    }
    let dir = &cfg.run.output;
    prepare_output(dir)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.parallel)
        .build()
        .map_err(runtime)?;
    let results: Vec<Result<Vec<TraceRow>, RunnerError>> =
        pool.install(|| cfg.run.seeds.par_iter().map(|&s| run_seed(cfg, &bench, s)).collect());

    let mut traces = Vec::new();
    let mut out = ExperimentOutput {
        traces: Vec::new(),
        timings: Vec::new(),
        summary: dir.join("summary.csv"),
        rows: Vec::new(),
    };
    for (&seed, rows) in cfg.run.seeds.iter().zip(results) {
        let rows = rows?;
        let records = to_records(cfg, seed, &rows);
        let trace_path = dir.join(format!("trace_seed{seed}.csv"));
        write_csv(&trace_path, &records)?;
        let timing: Vec<TimingRecord> = rows
            .iter()
            .map(|r| TimingRecord {
                iteration: r.iteration,
                objective_ms: if cfg.run.record_timing { r.objective_ms } else { 0.0 },
            })
            .collect();
        let timing_path = dir.join(format!("timing_seed{seed}.csv"));
        write_csv(&timing_path, &timing)?;
        out.traces.push(trace_path);
        out.timings.push(timing_path);
        traces.push(records);
    }
    out.rows = summarize(&traces);
    write_csv(&out.summary, &out.rows)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(it: usize, inc: f64) -> TraceRecord {
        TraceRecord {
            run_id: "r".into(),
            seed: 0,
            iteration: it,
            point: "0;1".into(),
            raw_value: inc,
            incumbent: inc,
            elapsed_ms: 2.0,
            tr_radius: None,
        }
    }

    #[test]
    fn summary_statistics() {
        let traces = vec![vec![rec(0, 1.0), rec(1, 0.0)], vec![rec(0, 3.0), rec(1, 0.0)]];
        let s = summarize(&traces);
        assert_eq!(s[0].mean_incumbent, 2.0);
        assert!((s[0].sem - 1.0).abs() < 1e-15);
        assert_eq!(s[1].sem, 0.0);
        assert_eq!(s[0].mean_elapsed_ms, 2.0);
        let one = summarize(&traces[..1]);
        assert_eq!(one[0].sem, 0.0);
    }

    #[test]
    fn run_ids() {
        let mut cfg = ExperimentConfig::default();
        assert_eq!(run_id(&cfg, 3), "labs-heat-s3");
        cfg.benchmark.relocate = true;
        cfg.run.algorithm = Algorithm::RandomSearch;
        assert_eq!(run_id(&cfg, 0), "labs-reloc-random-s0");
    }
}
