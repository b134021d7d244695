//! Experiment configuration: one TOML file plus command-line overrides.
//!
//! ```toml
//! [benchmark]
//! name = "labs"
//! dims = 20
//! relocate = true
//!
//! [kernel]
//! family = "heat"
//! ard = true
//!
//! [run]
//! init = 20
//! budget = 60
//! seeds = [0, 1, 2]
//! output = "results/labs"
//! ```
//!
//! `[ga]`, `[trust_region]` and `[optimizer]` take the fields of the
//! corresponding `heatbo::bo` / `heatbo::gp` config structs.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use heatbo::bo::{BoConfig, GaConfig, TrustRegionConfig};
use heatbo::gp::OptimizerConfig;
use heatbo::kernels::{FamilyTag, InvariantMode, KernelSpec};
use heatbo::SearchSpace;
use serde::{Deserialize, Serialize};

use crate::RunnerError;

/// Environment variable that overrides the output directory.
pub const OUT_DIR_ENV: &str = "HEATBO_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkSection {
    pub name: String,
    pub dims: Option<usize>,
    pub grid: Option<usize>,
    /// WCNF file for `maxsat` / `cluster-expansion`.
    pub instance: Option<PathBuf>,
    pub synthetic_clauses: Option<usize>,
    pub noise_seed: u64,
    pub relocate: bool,
    /// Defaults to a seed derived from the benchmark name.
    pub relocation_seed: Option<u64>,
}

impl Default for BenchmarkSection {
    fn default() -> Self {
        Self {
            name: "labs".into(),
            dims: None,
            grid: None,
            instance: None,
            synthetic_clauses: None,
            noise_seed: 0,
            relocate: false,
            relocation_seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSection {
    pub family: String,
    pub ard: bool,
    /// `sum[:samples]`, `proj`, `padded` or `prod[:samples]`.
    pub invariance: Option<String>,
    /// Initial values per hyperparameter group, e.g. `beta = [0.1]`.
    pub init: BTreeMap<String, Vec<f64>>,
}

impl Default for KernelSection {
    fn default() -> Self {
        Self {
            family: "heat".into(),
            ard: true,
            invariance: None,
            init: BTreeMap::new(),
        }
    }
}

impl KernelSection {
    pub fn tag(&self) -> Result<FamilyTag, RunnerError> {
        self.family.parse().map_err(|e| RunnerError::Config(format!("{e}")))
    }

    /// Kernel for one run; random decompositions are drawn from `seed`.
    pub fn build(&self, space: &SearchSpace, seed: u64) -> Result<KernelSpec<f64>, RunnerError> {
        let cfg = |e: heatbo::Error| RunnerError::Config(format!("kernel: {e}"));
        let mut spec = KernelSpec::default_for(space, self.tag()?, self.ard, seed).map_err(cfg)?;
        for (name, values) in &self.init {
            spec = spec.with_param(name, values.clone()).map_err(cfg)?;
        }
        if let Some(inv) = &self.invariance {
            let mode: InvariantMode = inv.parse().map_err(cfg)?;
            spec = spec.invariant(mode, seed).map_err(cfg)?;
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Bo,
    RandomSearch,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub algorithm: Algorithm,
    pub init: usize,
    pub budget: usize,
    pub seeds: Vec<u64>,
    pub output: PathBuf,
    /// Worker threads across seeds.
    pub parallel: usize,
    /// When false, `elapsed_ms` is written as 0 so reruns are byte-identical.
    pub record_timing: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Bo,
            init: 20,
            budget: 200,
            seeds: vec![0],
            output: PathBuf::from("results"),
            parallel: 1,
            record_timing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub benchmark: BenchmarkSection,
    pub kernel: KernelSection,
    pub run: RunSection,
    pub ga: GaConfig,
    pub trust_region: TrustRegionConfig,
    pub optimizer: OptimizerConfig,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seeds: Option<Vec<u64>>,
    pub budget: Option<usize>,
    pub init: Option<usize>,
    pub kernel: Option<String>,
    pub relocate: bool,
    pub out: Option<PathBuf>,
    pub parallel: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, RunnerError> {
        toml::from_str(text).map_err(|e| RunnerError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, RunnerError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunnerError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Applies the output-directory environment override, then `o`.
    pub fn apply(&mut self, o: &Overrides, env_out: Option<PathBuf>) {
        if let Some(dir) = env_out {
            self.run.output = dir;
        }
        if let Some(s) = &o.seeds {
            self.run.seeds = s.clone();
        }
        if let Some(b) = o.budget {
            self.run.budget = b;
        }
        if let Some(i) = o.init {
            self.run.init = i;
        }
        if let Some(k) = &o.kernel {
            self.kernel.family = k.clone();
        }
        if o.relocate {
            self.benchmark.relocate = true;
        }
        if let Some(dir) = &o.out {
            self.run.output = dir.clone();
        }
        if let Some(p) = o.parallel {
            self.run.parallel = p;
        }
    }

    pub fn bo_config(&self) -> BoConfig {
        BoConfig {
            ga: self.ga.clone(),
            trust_region: self.trust_region.clone(),
            optimizer: self.optimizer.clone(),
        }
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<(), RunnerError> {
        let bad = |m: String| Err(RunnerError::Config(m));
        if self.run.seeds.is_empty() {
            return bad("seed list is empty".into());
        }
        let distinct: HashSet<_> = self.run.seeds.iter().collect();
        if distinct.len() != self.run.seeds.len() {
            return bad("seed list has duplicates".into());
        }
        if self.run.parallel == 0 {
            return bad("parallel must be at least 1".into());
        }
        if self.run.algorithm == Algorithm::Bo && self.run.init + self.run.budget == 0 {
            return bad("nothing to evaluate: init and budget are both 0".into());
        }
        self.kernel.tag()?;
        self.ga
            .validate()
            .map_err(|e| RunnerError::Config(e.to_string()))?;
        if self.optimizer.learning_rate <= 0.0 {
            return bad("optimizer learning rate must be positive".into());
        }
        Ok(())
    }
}

pub fn parse_seed_list(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|e| format!("bad seed `{t}`: {e}")))
        .collect()
}
