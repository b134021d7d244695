//! Bayesian-optimization loop: Expected Improvement, a genetic acquisition
//! optimizer restricted to a Hamming trust region, and an ask/tell run.
//!
//! Minimization throughout. Random choices that move a point are expressed
//! relative to the current point (flip a dimension, move to "another"
//! category), so on binary spaces the whole run commutes with relocations.

use std::collections::HashSet;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::gp::{fit, GpState, OptimizerConfig, TrainingSet, DEFAULT_NOISE};
use crate::kernels::KernelSpec;
use crate::rng::{derive_seed, seeded, SeededRng};
use crate::scalar::Real;
use crate::space::{mismatches, Point, SearchSpace};

/// Balls with at most this many points are enumerated when the GA only
/// finds observed candidates.
pub const ENUMERATION_LIMIT: usize = 4096;

/// Minimization EI: `(best − μ) Φ(z) + σ φ(z)` with `z = (best − μ)/σ`.
pub fn expected_improvement<T: Real>(mean: T, variance: T, best: T) -> T {
    let (mu, var, best) = (mean.as_f64(), variance.as_f64().max(0.0), best.as_f64());
    let sigma = var.sqrt();
    let diff = best - mu;
    if sigma <= 0.0 {
        return T::of(diff.max(0.0));
    }
    let z = diff / sigma;
    let cdf = 0.5 * erfc(-z / std::f64::consts::SQRT_2);
    let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    T::of((diff * cdf + sigma * pdf).max(0.0))
}

/// Genetic-algorithm settings.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub tournament: usize,
    pub crossover: f64,
    /// Per-dimension mutation probability; `None` means `1/n`.
    pub mutation: Option<f64>,
    pub elite: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 50,
            generations: 20,
            tournament: 3,
            crossover: 0.9,
            mutation: None,
            elite: 2,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::invalid("GA population must be at least 2"));
        }
        if self.elite >= self.population {
            return Err(Error::invalid("GA elite count must be below the population size"));
        }
        if self.tournament == 0 {
            return Err(Error::invalid("GA tournament size must be positive"));
        }
        if !(0.0..=1.0).contains(&self.crossover) {
            return Err(Error::invalid("GA crossover probability must be in [0, 1]"));
        }
        if let Some(m) = self.mutation {
            if !(0.0..=1.0).contains(&m) {
                return Err(Error::invalid("GA mutation probability must be in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Trust-region schedule. `None` bounds resolve against the dimension.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrustRegionConfig {
    /// Defaults to `max(⌈n/4⌉, 1)`.
    pub l_init: Option<usize>,
    pub l_min: usize,
    /// Defaults to `n`.
    pub l_max: Option<usize>,
    pub succ_tol: usize,
    pub fail_tol: usize,
}

impl Default for TrustRegionConfig {
    fn default() -> Self {
        Self {
            l_init: None,
            l_min: 1,
            l_max: None,
            succ_tol: 3,
            fail_tol: 10,
        }
    }
}

/// What a trust-region update did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrEvent {
    Unchanged,
    Expanded,
    Shrunk,
    /// Collapsed at `L_min`; the caller re-centers and the radius is back at `L_init`.
    Restart,
}

/// Hamming-ball trust region `{x : h(x, center) ≤ L}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustRegion {
    pub center: Point,
    pub radius: usize,
    pub l_min: usize,
    pub l_max: usize,
    pub l_init: usize,
    pub succ_tol: usize,
    pub fail_tol: usize,
    pub successes: usize,
    pub failures: usize,
}

impl TrustRegion {
    pub fn new(space: &SearchSpace, center: Point, config: &TrustRegionConfig) -> Result<Self> {
        space.check(&center)?;
        let n = space.dims();
        let l_max = config.l_max.unwrap_or(n);
        let l_init = config.l_init.unwrap_or(n.div_ceil(4).max(1));
        if config.l_min > l_init || l_init > l_max {
            return Err(Error::invalid(format!(
                "trust region needs L_min <= L_init <= L_max, got {} <= {l_init} <= {l_max}",
                config.l_min
            )));
        }
        if config.succ_tol == 0 || config.fail_tol == 0 {
            return Err(Error::invalid("trust-region tolerances must be positive"));
        }
        Ok(Self {
            center,
            radius: l_init,
            l_min: config.l_min,
            l_max,
            l_init,
            succ_tol: config.succ_tol,
            fail_tol: config.fail_tol,
            successes: 0,
            failures: 0,
        })
    }

    pub fn contains(&self, x: &Point) -> bool {
        mismatches(&x.0, &self.center.0) <= self.radius
    }

    /// Streak bookkeeping: doubling after `succ_tol` successes, halving after
    /// `fail_tol` failures, restart when already at `L_min`.
    pub fn update(&mut self, improved: bool) -> TrEvent {
        if improved {
            self.successes += 1;
            self.failures = 0;
        } else {
            self.failures += 1;
            self.successes = 0;
        }
        if self.successes >= self.succ_tol {
            self.successes = 0;
            self.radius = (2 * self.radius).min(self.l_max);
            return TrEvent::Expanded;
        }
        if self.failures >= self.fail_tol {
            self.failures = 0;
            if self.radius <= self.l_min {
                self.radius = self.l_init;
                return TrEvent::Restart;
            }
            self.radius = (self.radius / 2).max(self.l_min);
            return TrEvent::Shrunk;
        }
        TrEvent::Unchanged
    }
}

/// `|{x : h(x, c) ≤ L}|`, saturating.
pub fn ball_size(space: &SearchSpace, radius: usize) -> usize {
    let r = radius.min(space.dims());
    let mut count = vec![0usize; r + 1];
    count[0] = 1;
    for &g in space.cardinalities() {
        for k in (1..=r).rev() {
            count[k] = count[k].saturating_add(count[k - 1].saturating_mul(g - 1));
        }
    }
    count.iter().fold(0usize, |a, &b| a.saturating_add(b))
}

/// Every point of the ball, ordered by the pattern of moves away from the
/// center (category `c + s mod g` for shift `s`), not by category index.
pub fn enumerate_ball(space: &SearchSpace, center: &Point, radius: usize) -> Vec<Point> {
    fn rec(
        space: &SearchSpace,
        center: &[usize],
        dim: usize,
        left: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Point>,
    ) {
        if dim == center.len() {
            out.push(Point(cur.clone()));
            return;
        }
        let g = space.cardinality(dim);
        cur.push(center[dim]);
        rec(space, center, dim + 1, left, cur, out);
        cur.pop();
        if left > 0 {
            for shift in 1..g {
                cur.push((center[dim] + shift) % g);
                rec(space, center, dim + 1, left - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(space, &center.0, 0, radius, &mut Vec::new(), &mut out);
    out
}

fn other_category(rng: &mut SeededRng, current: usize, g: usize) -> usize {
    (current + rng.random_range(1..g)) % g
}

/// Random point within `radius` of `center`: a uniform number of moved
/// dimensions, each moved to a uniform other category.
fn random_in_ball(rng: &mut SeededRng, space: &SearchSpace, center: &Point, radius: usize) -> Point {
    let n = space.dims();
    let k = rng.random_range(0..=radius.min(n));
    let dims = rand::seq::index::sample(rng, n, k);
    let mut x = center.0.clone();
    for d in dims.iter() {
        x[d] = other_category(rng, x[d], space.cardinality(d));
    }
    Point(x)
}

/// Pulls `x` back into the ball by reverting random differing dimensions.
fn repair(rng: &mut SeededRng, x: &mut [usize], center: &[usize], radius: usize) {
    let mut diff: Vec<usize> = (0..x.len()).filter(|&i| x[i] != center[i]).collect();
    while diff.len() > radius {
        let j = rng.random_range(0..diff.len());
        let d = diff.swap_remove(j);
        x[d] = center[d];
    }
}

/// Candidate pool in evaluation order.
struct Evaluated<T> {
    order: Vec<(Point, T)>,
    seen: HashSet<Point>,
}

impl<T: Real> Evaluated<T> {
    fn new() -> Self {
        Self {
            order: Vec::new(),
            seen: HashSet::new(),
        }
    }

    fn add_batch(
        &mut self,
        batch: Vec<Point>,
        acq: &mut impl FnMut(&[Point]) -> Result<Vec<T>>,
    ) -> Result<Vec<T>> {
        let mut fresh = Vec::new();
        for p in &batch {
            if !self.seen.contains(p) && !fresh.contains(p) {
                fresh.push(p.clone());
            }
        }
        if !fresh.is_empty() {
            let vals = acq(&fresh)?;
            for (p, v) in fresh.into_iter().zip(vals) {
                self.seen.insert(p.clone());
                self.order.push((p, v));
            }
        }
        Ok(batch.iter().map(|p| self.value(p)).collect())
    }

    fn value(&self, p: &Point) -> T {
        self.order
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, v)| *v)
            .expect("evaluated")
    }

    /// Highest value among unobserved candidates; earliest wins ties.
    fn best_unobserved(&self, observed: &HashSet<Point>) -> Option<(Point, T)> {
        let mut best: Option<&(Point, T)> = None;
        for entry in &self.order {
            if observed.contains(&entry.0) {
                continue;
            }
            if best.is_none_or(|b| entry.1 > b.1) {
                best = Some(entry);
            }
        }
        best.cloned()
    }
}

fn tournament<T: Real>(rng: &mut SeededRng, fitness: &[T], size: usize) -> usize {
    let mut best = rng.random_range(0..fitness.len());
    for _ in 1..size {
        let c = rng.random_range(0..fitness.len());
        if fitness[c] > fitness[best] {
            best = c;
        }
    }
    best
}

/// Maximizes `acq` over the trust region with a GA. Returns the best
/// unobserved candidate evaluated; falls back to enumerating (or sampling)
/// the ball when every GA candidate was already observed, and reports
/// [`Error::Exhausted`] when the ball holds no unobserved point.
pub fn ga_optimize<T: Real>(
    mut acq: impl FnMut(&[Point]) -> Result<Vec<T>>,
    space: &SearchSpace,
    tr: &TrustRegion,
    observed: &HashSet<Point>,
    config: &GaConfig,
    seed: u64,
) -> Result<Point> {
    config.validate()?;
    space.check(&tr.center)?;
    if tr.radius == 0 {
        return Ok(tr.center.clone());
    }
    let n = space.dims();
    let center = &tr.center;
    let mut rng = seeded(seed);
    let p_mut = config.mutation.unwrap_or(1.0 / n as f64);
    let mut pool = Evaluated::new();

    let mut pop: Vec<Point> = (0..config.population)
        .map(|_| random_in_ball(&mut rng, space, center, tr.radius))
        .collect();
    let mut fit_vals = pool.add_batch(pop.clone(), &mut acq)?;

    for _ in 0..config.generations {
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&a, &b| fit_vals[b].partial_cmp(&fit_vals[a]).unwrap_or(std::cmp::Ordering::Equal));
        let mut next: Vec<Point> = order[..config.elite].iter().map(|&i| pop[i].clone()).collect();
        while next.len() < config.population {
            let a = tournament(&mut rng, &fit_vals, config.tournament);
            let b = tournament(&mut rng, &fit_vals, config.tournament);
            let mut child = pop[a].0.clone();
            if rng.random_bool(config.crossover) {
                for (d, c) in child.iter_mut().enumerate() {
                    if rng.random_bool(0.5) {
                        *c = pop[b].0[d];
                    }
                }
            }
            for (d, c) in child.iter_mut().enumerate() {
                if rng.random_bool(p_mut) {
                    *c = other_category(&mut rng, *c, space.cardinality(d));
                }
            }
            repair(&mut rng, &mut child, &center.0, tr.radius);
            next.push(Point(child));
        }
        fit_vals = pool.add_batch(next.clone(), &mut acq)?;
        pop = next;
    }

    if let Some((p, _)) = pool.best_unobserved(observed) {
        return Ok(p);
    }
    let candidates: Vec<Point> = if ball_size(space, tr.radius) <= ENUMERATION_LIMIT {
        enumerate_ball(space, center, tr.radius)
            .into_iter()
            .filter(|p| !observed.contains(p))
            .collect()
    } else {
        let mut found = Vec::new();
        for _ in 0..ENUMERATION_LIMIT {
            let p = random_in_ball(&mut rng, space, center, tr.radius);
            if !observed.contains(&p) && !found.contains(&p) {
                found.push(p);
                if found.len() >= config.population {
                    break;
                }
            }
        }
        found
    };
    if candidates.is_empty() {
        return Err(Error::Exhausted { radius: tr.radius });
    }
    let vals = acq(&candidates)?;
    let mut best = 0;
    for i in 1..vals.len() {
        if vals[i] > vals[best] {
            best = i;
        }
    }
    Ok(candidates[best].clone())
}

/// Settings of one BO run.
#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoConfig {
    pub ga: GaConfig,
    pub trust_region: TrustRegionConfig,
    pub optimizer: OptimizerConfig,
}

/// One row of a run trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub point: Point,
    pub value: f64,
    pub incumbent: f64,
    /// Wall-clock milliseconds spent by the optimizer, objective excluded.
    pub elapsed_ms: f64,
    /// Objective evaluation time in milliseconds.
    pub objective_ms: f64,
    /// Trust-region radius after the observation; `None` during the initial design.
    pub tr_radius: Option<usize>,
}

/// Ask/tell state of one BO run.
#[derive(Debug, Clone)]
pub struct BoRun<T: Real> {
    space: SearchSpace,
    config: BoConfig,
    seed: u64,
    default_spec: KernelSpec<T>,
    warm: (KernelSpec<T>, T),
    history: Vec<(Point, T)>,
    observed: HashSet<Point>,
    incumbent: Option<usize>,
    epoch_best: Option<usize>,
    tr: Option<TrustRegion>,
    pending_restart: Option<Point>,
    restarts: usize,
    rng: SeededRng,
    gp: Option<GpState<T>>,
}

impl<T: Real> BoRun<T> {
    pub fn new(space: &SearchSpace, spec: KernelSpec<T>, config: BoConfig, seed: u64) -> Result<Self> {
        config.ga.validate()?;
        if spec.cardinalities() != space.cardinalities() {
            return Err(Error::invalid("kernel was built for a different search space"));
        }
        TrustRegion::new(space, Point(vec![0; space.dims()]), &config.trust_region)?;
        Ok(Self {
            space: space.clone(),
            config,
            seed,
            warm: (spec.clone(), T::of(DEFAULT_NOISE)),
            default_spec: spec,
            history: Vec::new(),
            observed: HashSet::new(),
            incumbent: None,
            epoch_best: None,
            tr: None,
            pending_restart: None,
            restarts: 0,
            rng: seeded(derive_seed(seed, 0x7265_7374)),
            gp: None,
        })
    }

    pub fn history(&self) -> &[(Point, T)] {
        &self.history
    }

    /// Best `(point, value)` so far; earliest observation wins ties.
    pub fn incumbent(&self) -> Option<(&Point, T)> {
        self.incumbent.map(|i| (&self.history[i].0, self.history[i].1))
    }

    pub fn trust_region(&self) -> Option<&TrustRegion> {
        self.tr.as_ref()
    }

    pub fn restarts(&self) -> usize {
        self.restarts
    }

    /// Last fitted surrogate.
    pub fn gp(&self) -> Option<&GpState<T>> {
        self.gp.as_ref()
    }

    pub fn is_observed(&self, x: &Point) -> bool {
        self.observed.contains(x)
    }

    /// Uniform random point not observed yet (or any point once the space is
    /// exhausted).
    fn random_unobserved(&mut self) -> Result<Point> {
        for _ in 0..ENUMERATION_LIMIT {
            let p = self.space.random_point(&mut self.rng);
            if !self.observed.contains(&p) {
                return Ok(p);
            }
        }
        self.space
            .num_points()
            .filter(|&m| m <= 1 << 20)
            .and_then(|_| self.space.enumerate().find(|p| !self.observed.contains(p)))
            .ok_or(Error::Exhausted { radius: self.space.dims() })
    }

    /// Restart center: from the old center, every dimension moves to a
    /// uniform other category with probability `(g − 1)/g`.
    fn restart_point(&mut self, from: &Point) -> Result<Point> {
        for _ in 0..ENUMERATION_LIMIT {
            let mut x = from.0.clone();
            for (d, c) in x.iter_mut().enumerate() {
                let g = self.space.cardinality(d);
                if self.rng.random_bool((g - 1) as f64 / g as f64) {
                    *c = other_category(&mut self.rng, *c, g);
                }
            }
            let p = Point(x);
            if !self.observed.contains(&p) {
                return Ok(p);
            }
        }
        self.random_unobserved()
    }

    fn fit_model(&mut self) -> Result<GpState<T>> {
        let (points, values): (Vec<Point>, Vec<T>) = self.history.iter().cloned().unzip();
        let train = TrainingSet::new(points, values)?;
        let mut starts = vec![self.warm.clone()];
        if self.config.optimizer.restart_from_defaults {
            starts.push((self.default_spec.clone(), T::of(DEFAULT_NOISE)));
        }
        let gp = fit(&self.space, train, &starts, &self.config.optimizer)?;
        self.warm = (gp.spec().clone(), gp.noise());
        Ok(gp)
    }

    /// Next point to evaluate: EI maximized over the trust region.
    pub fn suggest(&mut self) -> Result<Point> {
        if let Some(p) = self.pending_restart.clone() {
            return Ok(p);
        }
        if self.history.len() < 2 {
            return self.random_unobserved();
        }
        if self.tr.is_none() {
            let center = self.history[self.epoch_best.expect("history is not empty")].0.clone();
            self.tr = Some(TrustRegion::new(&self.space, center, &self.config.trust_region)?);
        }
        let gp = self.fit_model()?;
        let best = self.history[self.incumbent.expect("history is not empty")].1;
        let seed = derive_seed(self.seed, self.history.len() as u64);
        let tr = self.tr.clone().expect("created above");
        let acq = |pts: &[Point]| -> Result<Vec<T>> {
            Ok(gp
                .predict_batch(pts)?
                .into_iter()
                .map(|(m, v)| expected_improvement(m, v, best))
                .collect())
        };
        let result = ga_optimize(acq, &self.space, &tr, &self.observed, &self.config.ga, seed);
        self.gp = Some(gp);
        match result {
            Err(Error::Exhausted { .. }) => {
                let p = self.restart_point(&tr.center)?;
                self.begin_restart(p.clone());
                Ok(p)
            }
            other => other,
        }
    }

    fn begin_restart(&mut self, p: Point) {
        self.restarts += 1;
        self.epoch_best = None;
        if let Some(tr) = self.tr.as_mut() {
            tr.radius = tr.l_init;
            tr.successes = 0;
            tr.failures = 0;
        }
        self.pending_restart = Some(p);
    }

    /// Records an evaluation and updates the incumbent and trust region.
    pub fn observe(&mut self, x: Point, value: T) -> Result<()> {
        self.space.check(&x)?;
        if !value.is_finite() {
            return Err(Error::invalid(format!("non-finite objective value {value}")));
        }
        let eps = T::of(1e-12);
        let idx = self.history.len();
        let improved_epoch = self.epoch_best.is_none_or(|b| value < self.history[b].1 - eps);
        self.observed.insert(x.clone());
        self.history.push((x.clone(), value));
        if self.incumbent.is_none_or(|b| value < self.history[b].1 - eps) {
            self.incumbent = Some(idx);
        }
        let restarting = self.pending_restart.as_ref() == Some(&x);
        if restarting {
            self.pending_restart = None;
        }
        if improved_epoch {
            self.epoch_best = Some(idx);
        }
        let Some(tr) = self.tr.as_mut() else {
            return Ok(());
        };
        if restarting {
            tr.center = x;
            return Ok(());
        }
        if tr.update(improved_epoch) == TrEvent::Restart {
            let from = tr.center.clone();
            let p = self.restart_point(&from)?;
            self.begin_restart(p);
        } else if improved_epoch {
            tr.center = x;
        }
        Ok(())
    }
}

/// Runs `init.len()` (or `init_count` random) initial evaluations followed
/// by `budget` suggest/observe iterations.
pub fn run_bo<T: Real>(
    mut objective: impl FnMut(&Point) -> Result<f64>,
    space: &SearchSpace,
    spec: KernelSpec<T>,
    config: BoConfig,
    init: InitialDesign,
    budget: usize,
    seed: u64,
) -> Result<Vec<TraceRow>> {
    let mut run = BoRun::new(space, spec, config, seed)?;
    let design = init.points(space, seed)?;
    let mut rows = Vec::with_capacity(design.len() + budget);
    let mut best = f64::INFINITY;
    let mut record = |run: &mut BoRun<T>, x: Point, started: Instant, rows: &mut Vec<TraceRow>| -> Result<()> {
        let pre = started.elapsed();
        let t_obj = Instant::now();
        let value = objective(&x)?;
        let objective_time = t_obj.elapsed();
        let t_obs = Instant::now();
        run.observe(x.clone(), T::of(value))?;
        let elapsed = pre + t_obs.elapsed();
        best = best.min(value);
        rows.push(TraceRow {
            iteration: rows.len(),
            point: x,
            value,
            incumbent: best,
            elapsed_ms: elapsed.as_secs_f64() * 1e3,
            objective_ms: objective_time.as_secs_f64() * 1e3,
            tr_radius: run.trust_region().map(|t| t.radius),
        });
        Ok(())
    };
    for x in design {
        record(&mut run, x, Instant::now(), &mut rows)?;
    }
    for _ in 0..budget {
        let started = Instant::now();
        let x = run.suggest()?;
        record(&mut run, x, started, &mut rows)?;
    }
    Ok(rows)
}

/// Uniform random search without repeats, traced like [`run_bo`].
pub fn random_search(
    mut objective: impl FnMut(&Point) -> Result<f64>,
    space: &SearchSpace,
    evaluations: usize,
    seed: u64,
) -> Result<Vec<TraceRow>> {
    let mut rng = seeded(seed);
    let mut seen = HashSet::new();
    let mut rows = Vec::with_capacity(evaluations);
    let mut best = f64::INFINITY;
    let total = space.num_points().unwrap_or(usize::MAX);
    for i in 0..evaluations.min(total) {
        let started = Instant::now();
        let x = loop {
            let p = space.random_point(&mut rng);
            if seen.insert(p.clone()) {
                break p;
            }
        };
        let pre = started.elapsed();
        let t_obj = Instant::now();
        let value = objective(&x)?;
        let objective_ms = t_obj.elapsed().as_secs_f64() * 1e3;
        best = best.min(value);
        rows.push(TraceRow {
            iteration: i,
            point: x,
            value,
            incumbent: best,
            elapsed_ms: pre.as_secs_f64() * 1e3,
            objective_ms,
            tr_radius: None,
        });
    }
    Ok(rows)
}

/// Initial design of a run.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialDesign {
    /// `count` distinct uniform random points drawn from the run seed.
    Random(usize),
    Given(Vec<Point>),
}

impl InitialDesign {
    pub fn points(&self, space: &SearchSpace, seed: u64) -> Result<Vec<Point>> {
        match self {
            InitialDesign::Given(pts) => {
                pts.iter().try_for_each(|p| space.check(p))?;
                Ok(pts.clone())
            }
            InitialDesign::Random(count) => {
                let mut rng = seeded(derive_seed(seed, 0x696e_6974));
                let total = space.num_points().unwrap_or(usize::MAX);
                let mut out: Vec<Point> = Vec::with_capacity(*count);
                let mut seen = HashSet::new();
                while out.len() < (*count).min(total) {
                    let p = space.random_point(&mut rng);
                    if seen.insert(p.clone()) {
                        out.push(p);
                    }
                }
                Ok(out)
            }
        }
    }
}
