use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use heatbo::benchmarks::BENCHMARK_NAMES;
use heatbo::kernels::FAMILY_NAMES;
use heatbo_runner::config::OUT_DIR_ENV;
use heatbo_runner::speed::{compare_speed, ordering_violations, write_speed_csv, SpeedOptions};
use heatbo_runner::{checks, run_experiment, ExperimentConfig, Overrides, RunnerError};

#[derive(Parser)]
#[command(name = "heatbo", version, about = "Bayesian optimization over categorical spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run the theorem checks; exits 3 on any failure.
    Selftest,
    /// Time closed-form heat against numeric COMBO Gram construction.
    Speed {
        #[arg(long, default_value_t = 10)]
        dims: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32")]
        categories: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        /// Output directory for `speed.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    ListBenchmarks,
    ListKernels,
}

#[derive(Args)]
struct RunFlags {
    /// Comma-separated seed list.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    init: Option<usize>,
    /// Kernel family name.
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    relocate: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seeds run concurrently.
    #[arg(long)]
    parallel: Option<usize>,
}

fn env_out() -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn run(config: PathBuf, flags: RunFlags) -> Result<(), RunnerError> {
    let mut cfg = ExperimentConfig::load(&config)?;
    let overrides = Overrides {
        seeds: flags.seeds,
        budget: flags.budget,
        init: flags.init,
        kernel: flags.kernel,
        relocate: flags.relocate,
        out: flags.out,
        parallel: flags.parallel,
    };
    cfg.apply(&overrides, env_out());
    let out = run_experiment(&cfg)?;
    for p in &out.traces {
        println!("{}", p.display());
    }
    println!("{}", out.summary.display());
    if let Some(last) = out.rows.last() {
        println!(
            "final mean incumbent {:.6} (sem {:.6}) after {} evaluations",
            last.mean_incumbent,
            last.sem,
            out.rows.len()
        );
    }
    Ok(())
}

fn speed(opts: SpeedOptions, out: Option<PathBuf>) -> Result<bool, RunnerError> {
    let rows = compare_speed(&opts)?;
    println!("kernel,dims,categories,points,seconds,max_diff");
    for r in &rows {
        println!(
            "{},{},{},{},{:.6},{:.1e}",
            r.kernel, r.dims, r.categories, r.points, r.seconds, r.max_diff
        );
    }
    if let Some(dir) = out.or_else(env_out) {
        std::fs::create_dir_all(&dir).map_err(|e| RunnerError::Config(format!("{}: {e}", dir.display())))?;
        write_speed_csv(&dir.join("speed.csv"), &rows)?;
    }
    let slow = ordering_violations(&rows);
    if !slow.is_empty() {
        eprintln!("closed form not faster at g = {slow:?}");
    }
    Ok(slow.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, flags } => run(config, flags).map(|_| 0),
        Command::Selftest => {
            let results = checks::selftest();
            for r in &results {
                println!("{r}");
            }
            Ok(if results.iter().all(|r| r.passed) { 0 } else { 3 })
        }
        Command::Speed {
            dims,
            categories,
            points,
            repeats,
            out,
        } => {
            let opts = SpeedOptions {
                dims,
                categories,
                points,
                repeats,
                seed: 0,
            };
            speed(opts, out).map(|ok| if ok { 0 } else { 3 })
        }
        Command::ListBenchmarks => {
            BENCHMARK_NAMES.iter().for_each(|b| println!("{b}"));
            Ok(0)
        }
        Command::ListKernels => {
            FAMILY_NAMES.iter().for_each(|k| println!("{k}"));
            Ok(0)
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("heatbo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
