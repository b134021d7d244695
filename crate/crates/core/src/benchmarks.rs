//! Black-box objectives, all minimized.
//!
//! * LABS: `−F(S)` with merit factor `F = n²/(2E)`.
//! * Weighted MaxSAT from DIMACS WCNF (also used for cluster expansion):
//!   minus the sum of satisfied normalized clause weights.
//! * Contamination control and pest control: Monte Carlo chain simulations
//!   with constants from `data/benchmark_constants.toml`.
//! * Discretized SFU test functions on a regular grid.
//!
//! [`Benchmark`] bundles a space, an evaluator and an optional relocation.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded, SeededRng};
use crate::space::{sample_relocation, Point, Relocation, SearchSpace};

const CONSTANTS_TOML: &str = include_str!("../data/benchmark_constants.toml");

#[derive(Debug, Clone, Deserialize)]
pub struct ContaminationConstants {
    pub stages: usize,
    pub simulations: usize,
    pub threshold: f64,
    pub epsilon: f64,
    pub penalty: f64,
    pub cost: f64,
    pub initial: [f64; 2],
    pub contamination: [f64; 2],
    pub restoration: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
pub struct PestControlConstants {
    pub stations: usize,
    pub categories: usize,
    pub simulations: usize,
    pub threshold: f64,
    pub initial: [f64; 2],
    pub spread: [f64; 2],
    pub control_alpha: f64,
    pub price: Vec<f64>,
    pub control_beta: Vec<f64>,
    pub tolerance_rate: Vec<f64>,
    pub max_discount: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct BenchmarkConstants {
    pub version: u32,
    pub contamination: ContaminationConstants,
    pub pest_control: PestControlConstants,
}

/// The shipped constants table.
pub fn constants() -> &'static BenchmarkConstants {
    static TABLE: OnceLock<BenchmarkConstants> = OnceLock::new();
    TABLE.get_or_init(|| toml::from_str(CONSTANTS_TOML).expect("shipped constants table parses"))
}

fn beta(params: [f64; 2]) -> Beta<f64> {
    Beta::new(params[0], params[1]).expect("constants table has positive Beta parameters")
}

fn draws(rng: &mut SeededRng, law: &Beta<f64>, count: usize) -> Vec<f64> {
    (0..count).map(|_| law.sample(rng)).collect()
}

fn check_binary(x: &Point) -> Result<()> {
    match x.0.iter().find(|&&c| c > 1) {
        Some(c) => Err(Error::invalid(format!("expected a binary point, found category {c}"))),
        None => Ok(()),
    }
}

/// `E(S) = Σ_{k=1}^{n−1} C_k²` with `C_k = Σ_i s_i s_{i+k}`, `{0,1} → {−1,+1}`.
pub fn labs_energy(x: &Point) -> Result<f64> {
    check_binary(x)?;
    let s: Vec<i64> = x.0.iter().map(|&c| if c == 1 { 1 } else { -1 }).collect();
    let n = s.len();
    let mut e = 0i64;
    for k in 1..n {
        let c: i64 = (0..n - k).map(|i| s[i] * s[i + k]).sum();
        e += c * c;
    }
    Ok(e as f64)
}

/// `F(S) = n²/(2E)`; infinite only for `n = 1`.
pub fn merit_factor(x: &Point) -> Result<f64> {
    let e = labs_energy(x)?;
    let n = x.len() as f64;
    Ok(n * n / (2.0 * e))
}

/// One soft clause.
#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub weight: f64,
    pub literals: Vec<i64>,
}

/// Weighted MaxSAT instance with standardized clause weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WcnfInstance {
    num_vars: usize,
    clauses: Vec<Clause>,
    weight_mean: f64,
    weight_std: f64,
}

impl WcnfInstance {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self> {
        if clauses.is_empty() {
            return Err(Error::invalid("instance has no clauses"));
        }
        for c in &clauses {
            if !(c.weight > 0.0) || !c.weight.is_finite() {
                return Err(Error::invalid(format!("clause weight {} is not positive", c.weight)));
            }
            if c.literals.is_empty() {
                return Err(Error::invalid("empty clause"));
            }
            if let Some(l) = c.literals.iter().find(|l| **l == 0 || l.unsigned_abs() as usize > num_vars) {
                return Err(Error::invalid(format!("literal {l} out of range 1..={num_vars}")));
            }
        }
        let m = clauses.len() as f64;
        let mean = clauses.iter().map(|c| c.weight).sum::<f64>() / m;
        let var = clauses.iter().map(|c| (c.weight - mean).powi(2)).sum::<f64>() / m;
        let std = if var > 0.0 { var.sqrt() } else { 1.0 };
        Ok(Self {
            num_vars,
            clauses,
            weight_mean: mean,
            weight_std: std,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Mean and population standard deviation of the raw weights.
    pub fn weight_stats(&self) -> (f64, f64) {
        (self.weight_mean, self.weight_std)
    }

    pub fn normalized_weight(&self, clause: usize) -> f64 {
        (self.clauses[clause].weight - self.weight_mean) / self.weight_std
    }

    pub fn space(&self) -> SearchSpace {
        SearchSpace::binary(self.num_vars).expect("instance has variables")
    }

    /// Serializes back to WCNF (no `top` field).
    pub fn to_wcnf(&self) -> String {
        let mut out = format!("p wcnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            out.push_str(&fmt_weight(c.weight));
            for l in &c.literals {
                out.push_str(&format!(" {l}"));
            }
            out.push_str(" 0\n");
        }
        out
    }
}

fn fmt_weight(w: f64) -> String {
    if w.fract() == 0.0 && w.abs() < 1e15 {
        format!("{}", w as i64)
    } else {
        format!("{w}")
    }
}

impl FromStr for WcnfInstance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_wcnf(s)
    }
}

/// Parses DIMACS WCNF: `p wcnf <vars> <clauses> [top]`, clause lines
/// `<weight> <lit>… 0`, comments starting with `c`. Hard clauses
/// (weight = top) are rejected.
pub fn parse_wcnf(text: &str) -> Result<WcnfInstance> {
    let err = |line: usize, msg: String| Error::Parse { line, msg };
    let mut header: Option<(usize, usize, Option<f64>)> = None;
    let mut clauses = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(line_no, "duplicate header".into()));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if !(4..=5).contains(&parts.len()) || parts[0] != "p" || parts[1] != "wcnf" {
                return Err(err(line_no, format!("malformed header `{line}`")));
            }
            let vars = parts[2]
                .parse()
                .map_err(|_| err(line_no, format!("bad variable count `{}`", parts[2])))?;
            let count = parts[3]
                .parse()
                .map_err(|_| err(line_no, format!("bad clause count `{}`", parts[3])))?;
            let top = match parts.get(4) {
                Some(t) => Some(t.parse::<f64>().map_err(|_| err(line_no, format!("bad top `{t}`")))?),
                None => None,
            };
            header = Some((vars, count, top));
            continue;
        }
        let Some((vars, _, top)) = header else {
            return Err(err(line_no, "clause before header".into()));
        };
        let mut tokens = line.split_whitespace();
        let w_tok = tokens.next().expect("line is not empty");
        let weight: f64 = w_tok
            .parse()
            .map_err(|_| err(line_no, format!("bad weight `{w_tok}`")))?;
        if !(weight > 0.0) {
            return Err(err(line_no, format!("weight must be positive, got {w_tok}")));
        }
        if top == Some(weight) {
            return Err(err(line_no, "hard clauses are not supported".into()));
        }
        let mut literals = Vec::new();
        let mut terminated = false;
        for tok in tokens {
            if terminated {
                return Err(err(line_no, "tokens after terminating 0".into()));
            }
            let l: i64 = tok
                .parse()
                .map_err(|_| err(line_no, format!("bad literal `{tok}`")))?;
            if l == 0 {
                terminated = true;
            } else if l.unsigned_abs() as usize > vars {
                return Err(err(line_no, format!("literal {l} exceeds {vars} variables")));
            } else {
                literals.push(l);
            }
        }
        if !terminated {
            return Err(err(line_no, "clause is missing its terminating 0".into()));
        }
        if literals.is_empty() {
            return Err(err(line_no, "empty clause".into()));
        }
        clauses.push(Clause { weight, literals });
    }
    let last = text.lines().count().max(1);
    let (vars, count, _) = header.ok_or_else(|| err(last, "missing `p wcnf` header".into()))?;
    if clauses.is_empty() {
        return Err(err(last, "no clauses".into()));
    }
    if clauses.len() != count {
        return Err(err(
            last,
            format!("header declares {count} clauses, found {}", clauses.len()),
        ));
    }
    WcnfInstance::new(vars, clauses).map_err(|e| err(last, e.to_string()))
}

/// `−Σ_{satisfied} w_normalized`; variable `v` is true when `x[v−1] = 1`.
pub fn maxsat_eval(instance: &WcnfInstance, x: &Point) -> Result<f64> {
    if x.len() != instance.num_vars {
        return Err(Error::invalid(format!(
            "point has {} entries, instance has {} variables",
            x.len(),
            instance.num_vars
        )));
    }
    check_binary(x)?;
    let mut total = 0.0;
    for (i, c) in instance.clauses.iter().enumerate() {
        let sat = c.literals.iter().any(|&l| {
            let v = x.0[l.unsigned_abs() as usize - 1] == 1;
            if l > 0 {
                v
            } else {
                !v
            }
        });
        if sat {
            total += instance.normalized_weight(i);
        }
    }
    Ok(-total)
}

/// Exhaustive minimum of [`maxsat_eval`]; first assignment in index order wins ties.
pub fn maxsat_brute_force(instance: &WcnfInstance) -> Result<(Point, f64)> {
    if instance.num_vars > 24 {
        return Err(Error::invalid("brute force limited to 24 variables"));
    }
    let space = instance.space();
    let mut best: Option<(Point, f64)> = None;
    for x in space.enumerate() {
        let v = maxsat_eval(instance, &x)?;
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((x, v));
        }
    }
    Ok(best.expect("space is not empty"))
}

/// Random instance: clauses of 1–3 distinct variables, integer weights 1–100.
pub fn synthetic_wcnf(num_vars: usize, num_clauses: usize, seed: u64) -> Result<WcnfInstance> {
    if num_vars == 0 || num_clauses == 0 {
        return Err(Error::invalid("synthetic instance needs variables and clauses"));
    }
    let mut rng = seeded(seed);
    let clauses = (0..num_clauses)
        .map(|_| {
            let len = rng.random_range(1..=3usize.min(num_vars));
            let vars = rand::seq::index::sample(&mut rng, num_vars, len);
            let literals = vars
                .iter()
                .map(|v| {
                    let l = v as i64 + 1;
                    if rng.random_bool(0.5) {
                        l
                    } else {
                        -l
                    }
                })
                .collect();
            Clause {
                weight: rng.random_range(1..=100) as f64,
                literals,
            }
        })
        .collect();
    WcnfInstance::new(num_vars, clauses)
}

/// Contamination-control chain cost for a binary prevention plan.
///
/// `Σ_i [c x_i + penalty (P̂(Z_i ≥ U) − ε)]` where `Z_i` follows
/// `Z_i = λ_i (1 − x_i)(1 − Z_{i−1}) + (1 − γ_i x_i) Z_{i−1}` per sample.
pub fn contamination_eval(x: &Point, noise_seed: u64) -> Result<f64> {
    let k = &constants().contamination;
    if x.len() != k.stages {
        return Err(Error::invalid(format!(
            "contamination needs {} stages, got {}",
            k.stages,
            x.len()
        )));
    }
    check_binary(x)?;
    let violations = contamination_violations(x, noise_seed, k);
    let mut cost = 0.0;
    for (i, &xi) in x.0.iter().enumerate() {
        let frac = violations[i] as f64 / k.simulations as f64;
        cost += k.cost * xi as f64 + k.penalty * (frac - k.epsilon);
    }
    Ok(cost)
}

/// Per-stage count of samples with `Z_i ≥ U`.
pub fn contamination_violations(x: &Point, noise_seed: u64, k: &ContaminationConstants) -> Vec<usize> {
    let mut rng = seeded(noise_seed);
    let m = k.simulations;
    let mut z = draws(&mut rng, &beta(k.initial), m);
    let lam_law = beta(k.contamination);
    let gam_law = beta(k.restoration);
    let mut out = Vec::with_capacity(k.stages);
    for &xi in &x.0 {
        let lambdas = draws(&mut rng, &lam_law, m);
        let gammas = draws(&mut rng, &gam_law, m);
        let xf = xi as f64;
        for s in 0..m {
            z[s] = lambdas[s] * (1.0 - xf) * (1.0 - z[s]) + (1.0 - gammas[s] * xf) * z[s];
        }
        out.push(z.iter().filter(|&&v| v >= k.threshold).count());
    }
    out
}

/// Pest-control chain cost: paid prices plus the expected number of stations
/// with pest fraction above the threshold. Category 0 is no control; repeated
/// use of a pesticide earns a discount but builds tolerance.
pub fn pest_control_eval(x: &Point, noise_seed: u64) -> Result<f64> {
    let k = &constants().pest_control;
    if x.len() != k.stations {
        return Err(Error::invalid(format!(
            "pest control needs {} stations, got {}",
            k.stations,
            x.len()
        )));
    }
    if let Some(c) = x.0.iter().find(|&&c| c >= k.categories) {
        return Err(Error::invalid(format!("category {c} >= {}", k.categories)));
    }
    let m = k.simulations;
    let n = k.stations as f64;
    let mut frac = draws(&mut seeded(noise_seed), &beta(k.initial), m);
    let spread_law = beta(k.spread);
    let mut control_beta = k.control_beta.clone();
    let mut paid = 0.0;
    let mut above = 0.0;
    for (i, &c) in x.0.iter().enumerate() {
        // each station draws from its own stream so choices elsewhere do not shift the noise
        let mut rng = seeded(derive_seed(noise_seed, i as u64 + 1));
        let spread = draws(&mut rng, &spread_law, m);
        above += frac.iter().filter(|&&v| v > k.threshold).count() as f64 / m as f64;
        if c > 0 {
            let p = c - 1;
            let law = Beta::new(k.control_alpha, control_beta[p])
                .map_err(|e| Error::NumericFailure(e.to_string()))?;
            let control = draws(&mut rng, &law, m);
            for s in 0..m {
                frac[s] *= 1.0 - control[s];
            }
            control_beta[p] += k.tolerance_rate[p] / n;
            let uses = x.0.iter().filter(|&&v| v == c).count() as f64;
            paid += k.price[p] * (1.0 - k.max_discount[p] / n * uses);
        } else {
            for s in 0..m {
                frac[s] += spread[s] * (1.0 - frac[s]);
            }
        }
    }
    Ok(paid + above)
}

/// Discretizable test functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfuFunction {
    Ackley,
    Rastrigin,
    Schwefel,
    StyblinskiTang,
    Salomon,
    /// Not permutation-invariant: the cosine product scales by the coordinate index.
    Griewank,
    /// Not permutation-invariant: the first and last terms are special.
    Levy,
}

/// The permutation-invariant functions, in listing order.
pub const SFU_INVARIANT: [SfuFunction; 5] = [
    SfuFunction::Ackley,
    SfuFunction::Rastrigin,
    SfuFunction::Schwefel,
    SfuFunction::StyblinskiTang,
    SfuFunction::Salomon,
];

impl SfuFunction {
    pub fn name(self) -> &'static str {
        match self {
            SfuFunction::Ackley => "ackley",
            SfuFunction::Griewank => "griewank",
            SfuFunction::Rastrigin => "rastrigin",
            SfuFunction::Schwefel => "schwefel",
            SfuFunction::StyblinskiTang => "styblinski-tang",
            SfuFunction::Salomon => "salomon",
            SfuFunction::Levy => "levy",
        }
    }

    /// Standard box `[lo, hi]` per coordinate.
    pub fn domain(self) -> (f64, f64) {
        match self {
            SfuFunction::Ackley => (-32.768, 32.768),
            SfuFunction::Griewank => (-600.0, 600.0),
            SfuFunction::Rastrigin => (-5.12, 5.12),
            SfuFunction::Schwefel => (-500.0, 500.0),
            SfuFunction::StyblinskiTang => (-5.0, 5.0),
            SfuFunction::Salomon => (-100.0, 100.0),
            SfuFunction::Levy => (-10.0, 10.0),
        }
    }

    pub fn permutation_invariant(self) -> bool {
        !matches!(self, SfuFunction::Griewank | SfuFunction::Levy)
    }

    pub fn eval(self, z: &[f64]) -> f64 {
        let d = z.len() as f64;
        match self {
            SfuFunction::Ackley => {
                let sq = z.iter().map(|v| v * v).sum::<f64>() / d;
                let cs = z.iter().map(|v| (2.0 * std::f64::consts::PI * v).cos()).sum::<f64>() / d;
                -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + std::f64::consts::E
            }
            SfuFunction::Griewank => {
                let s = z.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let p: f64 = z
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                s - p + 1.0
            }
            SfuFunction::Rastrigin => {
                10.0 * d
                    + z.iter()
                        .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos())
                        .sum::<f64>()
            }
            SfuFunction::Schwefel => {
                418.982_887_272_433_9 * d - z.iter().map(|v| v * v.abs().sqrt().sin()).sum::<f64>()
            }
            SfuFunction::StyblinskiTang => {
                0.5 * z.iter().map(|v| v.powi(4) - 16.0 * v * v + 5.0 * v).sum::<f64>()
            }
            SfuFunction::Salomon => {
                let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
                1.0 - (2.0 * std::f64::consts::PI * r).cos() + 0.1 * r
            }
            SfuFunction::Levy => {
                let w: Vec<f64> = z.iter().map(|v| 1.0 + (v - 1.0) / 4.0).collect();
                let pi = std::f64::consts::PI;
                let last = w[w.len() - 1];
                let mid: f64 = w[..w.len() - 1]
                    .iter()
                    .map(|wi| (wi - 1.0).powi(2) * (1.0 + 10.0 * (pi * wi + 1.0).sin().powi(2)))
                    .sum();
                (pi * w[0]).sin().powi(2)
                    + mid
                    + (last - 1.0).powi(2) * (1.0 + (2.0 * pi * last).sin().powi(2))
            }
        }
    }
}

impl FromStr for SfuFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "ackley" => SfuFunction::Ackley,
            "griewank" => SfuFunction::Griewank,
            "rastrigin" => SfuFunction::Rastrigin,
            "schwefel" => SfuFunction::Schwefel,
            "styblinski-tang" | "styblinskitang" => SfuFunction::StyblinskiTang,
            "salomon" => SfuFunction::Salomon,
            "levy" => SfuFunction::Levy,
            other => return Err(Error::invalid(format!("unknown SFU function `{other}`"))),
        })
    }
}

/// Grid coordinate of category `j` out of `g`: `lo + j (hi − lo)/(g − 1)`.
pub fn grid_value(f: SfuFunction, j: usize, g: usize) -> f64 {
    let (lo, hi) = f.domain();
    if j == g - 1 {
        return hi;
    }
    lo + j as f64 * (hi - lo) / (g - 1) as f64
}

pub fn sfu_eval(name: &str, space: &SearchSpace, x: &Point) -> Result<f64> {
    let f: SfuFunction = name.parse()?;
    space.check(x)?;
    let z: Vec<f64> = x
        .0
        .iter()
        .enumerate()
        .map(|(i, &j)| grid_value(f, j, space.cardinality(i)))
        .collect();
    Ok(f.eval(&z))
}

type Evaluator = Arc<dyn Fn(&Point) -> Result<f64> + Send + Sync>;

/// A named objective on a search space, optionally relocated.
#[derive(Clone)]
pub struct Benchmark {
    name: String,
    space: SearchSpace,
    eval: Evaluator,
    relocation: Option<Relocation>,
}

impl fmt::Debug for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Benchmark")
            .field("name", &self.name)
            .field("space", &self.space)
            .field("relocation", &self.relocation)
            .finish_non_exhaustive()
    }
}

/// Names accepted by [`Benchmark::from_name`].
pub const BENCHMARK_NAMES: [&str; 13] = [
    "labs",
    "maxsat",
    "cluster-expansion",
    "contamination",
    "pest-control",
    "ackley",
    "griewank",
    "rastrigin",
    "schwefel",
    "styblinski-tang",
    "salomon",
    "levy",
    "onemax",
];

/// Construction options; unused fields are ignored by each benchmark.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, serde::Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkOptions {
    /// Dimension (LABS, SFU, onemax).
    pub dims: Option<usize>,
    /// Grid points per SFU dimension.
    pub grid: Option<usize>,
    /// WCNF text for MaxSAT / cluster expansion.
    #[serde(skip)]
    pub instance: Option<String>,
    /// Clause count of the synthetic instance used when no text is given.
    pub synthetic_clauses: Option<usize>,
    pub noise_seed: u64,
}

impl Benchmark {
    pub fn custom(
        name: impl Into<String>,
        space: SearchSpace,
        f: impl Fn(&Point) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            space,
            eval: Arc::new(f),
            relocation: None,
        }
    }

    pub fn labs(n: usize) -> Result<Self> {
        let space = SearchSpace::binary(n)?;
        Ok(Self::custom("labs", space, |x| Ok(-merit_factor(x)?)))
    }

    pub fn maxsat(name: &str, instance: WcnfInstance) -> Self {
        let space = instance.space();
        Self::custom(name, space, move |x| maxsat_eval(&instance, x))
    }

    pub fn contamination(noise_seed: u64) -> Self {
        let space = SearchSpace::binary(constants().contamination.stages).expect("stages > 0");
        Self::custom("contamination", space, move |x| contamination_eval(x, noise_seed))
    }

    pub fn pest_control(noise_seed: u64) -> Self {
        let k = &constants().pest_control;
        let space = SearchSpace::uniform(k.stations, k.categories).expect("valid constants");
        Self::custom("pest-control", space, move |x| pest_control_eval(x, noise_seed))
    }

    pub fn sfu(f: SfuFunction, dims: usize, grid: usize) -> Result<Self> {
        let space = SearchSpace::uniform(dims, grid)?;
        let name = f.name();
        Ok(Self::custom(name, space.clone(), move |x| sfu_eval(name, &space, x)))
    }

    pub fn from_name(name: &str, opts: &BenchmarkOptions) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        match lower.as_str() {
            "labs" => Self::labs(opts.dims.unwrap_or(50)),
            "maxsat" | "cluster-expansion" => {
                let inst = match &opts.instance {
                    Some(text) => parse_wcnf(text)?,
                    None if lower == "cluster-expansion" => synthetic_wcnf(
                        opts.dims.unwrap_or(125),
                        opts.synthetic_clauses.unwrap_or(500),
                        opts.noise_seed,
                    )?,
                    None => {
                        return Err(Error::invalid("maxsat needs an instance file"));
                    }
                };
                Ok(Self::maxsat(&lower, inst))
            }
            "contamination" => Ok(Self::contamination(opts.noise_seed)),
            "pest-control" => Ok(Self::pest_control(opts.noise_seed)),
            "onemax" => {
                let space = SearchSpace::binary(opts.dims.unwrap_or(10))?;
                Ok(Self::custom("onemax", space, |x| {
                    Ok(-(x.0.iter().filter(|&&c| c == 1).count() as f64))
                }))
            }
            other => {
                let f: SfuFunction = other
                    .parse()
                    .map_err(|_| Error::invalid(format!("unknown benchmark `{name}`")))?;
                Self::sfu(f, opts.dims.unwrap_or(20), opts.grid.unwrap_or(11))
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn relocation(&self) -> Option<&Relocation> {
        self.relocation.as_ref()
    }

    /// `f(r⁻¹(x))` when relocated, `f(x)` otherwise.
    pub fn evaluate(&self, x: &Point) -> Result<f64> {
        self.space.check(x)?;
        match &self.relocation {
            Some(r) => (self.eval)(&r.invert(x)),
            None => (self.eval)(x),
        }
    }
}

/// Wraps `obj` so that `f′(x) = f(r⁻¹(x))` with `r = sample_relocation(space, seed)`.
/// Relocating twice composes the relocations.
pub fn relocate_objective(obj: Benchmark, seed: u64) -> Benchmark {
    let r = sample_relocation(&obj.space, seed);
    relocate_with(obj, r)
}

pub fn relocate_with(obj: Benchmark, r: Relocation) -> Benchmark {
    match obj.relocation.clone() {
        None => Benchmark {
            relocation: Some(r),
            ..obj
        },
        Some(inner) => {
            let prior = Benchmark {
                relocation: Some(inner),
                ..obj.clone()
            };
            let name = obj.name.clone();
            let space = obj.space.clone();
            Benchmark {
                relocation: Some(r),
                ..Benchmark::custom(name, space, move |x| prior.evaluate(x))
            }
        }
    }
}
