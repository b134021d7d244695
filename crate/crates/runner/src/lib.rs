//! Experiment runner for `heatbo`: TOML configs, seeded multi-run BO with
//! CSV traces, the theorem selftest and the Gram timing harness.

pub mod checks;
pub mod config;
pub mod experiment;
pub mod speed;

pub use config::{ExperimentConfig, Overrides};
pub use experiment::{run_experiment, ExperimentOutput};

#[derive(Debug, thiserror::Error)]
pub enum RunnerError {
    #[error("config error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl RunnerError {
    /// 1 for configuration problems, 2 for failures during a run.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunnerError::Config(_) => 1,
            RunnerError::Runtime(_) => 2,
        }
    }
}
