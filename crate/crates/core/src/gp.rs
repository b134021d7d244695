//! Exact Gaussian-process regression on standardized targets.
//!
//! The model is `y = f(x) + ε` with `f ~ GP(0, k)` and `ε ~ N(0, σ_n²)` on
//! targets standardized by the mean and sample standard deviation of all
//! observations. Hyperparameters are fitted by Adam ascent on the marginal
//! log-likelihood in the kernel's unconstrained parameterization, with the
//! noise carried as `log σ_n²`.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::{cross_gram, gram, gram_with_grads, KernelSpec};
use crate::linalg::{cholesky_lower, solve_lower, solve_upper_t};
use crate::scalar::Real;
use crate::space::{Point, SearchSpace};

/// Initial observation noise on standardized targets.
pub const DEFAULT_NOISE: f64 = 1e-3;

/// Bounds on the fitted noise variance.
pub const NOISE_BOUNDS: (f64, f64) = (1e-6, 1.0);

/// Box on every unconstrained coordinate during ascent.
const FREE_LIMIT: f64 = 15.0;

/// Adam and factorization settings.
#[derive(Debug, Clone, PartialEq, serde::Deserialize, serde::Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub steps: usize,
    pub learning_rate: f64,
    /// Also start from the default hyperparameters, not only the warm start.
    pub restart_from_defaults: bool,
    /// Multiples of the mean diagonal tried after a plain factorization fails.
    pub jitter: Vec<f64>,
    /// Keep the noise variance fixed at its initial value.
    pub fixed_noise: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            steps: 100,
            learning_rate: 0.03,
            restart_from_defaults: true,
            jitter: vec![1e-8, 1e-6, 1e-4],
            fixed_noise: false,
        }
    }
}

/// Observed points with raw targets and their standardization.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet<T: Real> {
    points: Vec<Point>,
    raw: Vec<T>,
    mean: T,
    std: T,
}

impl<T: Real> TrainingSet<T> {
    /// Standardizes with the sample mean and standard deviation (`m − 1`
    /// denominator). A single point or constant targets leave the scale at 1;
    /// a single point is also left uncentered.
    pub fn new(points: Vec<Point>, raw: Vec<T>) -> Result<Self> {
        if points.len() != raw.len() {
            return Err(Error::invalid(format!(
                "{} points but {} targets",
                points.len(),
                raw.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::invalid("training set is empty"));
        }
        if let Some(v) = raw.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite target {v}")));
        }
        let m = raw.len();
        let (mean, std) = if m == 1 {
            (T::zero(), T::one())
        } else {
            let mean = raw.iter().fold(T::zero(), |a, &b| a + b) / T::of_usize(m);
            let ss = raw.iter().fold(T::zero(), |a, &b| a + (b - mean) * (b - mean));
            let std = (ss / T::of_usize(m - 1)).sqrt();
            (mean, if std > T::zero() { std } else { T::one() })
        };
        Ok(Self {
            points,
            raw,
            mean,
            std,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn raw(&self) -> &[T] {
        &self.raw
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    pub fn std(&self) -> T {
        self.std
    }

    pub fn standardize(&self, v: T) -> T {
        (v - self.mean) / self.std
    }

    pub fn destandardize(&self, v: T) -> T {
        v * self.std + self.mean
    }

    pub fn standardized(&self) -> DVector<T> {
        DVector::from_iterator(self.len(), self.raw.iter().map(|&v| self.standardize(v)))
    }
}

/// Factorization of `K + σ_n² I`, escalating jitter along the ladder.
struct Factor<T: Real> {
    l: DMatrix<T>,
    jitter: T,
}

fn factor<T: Real>(k: &DMatrix<T>, noise: T, ladder: &[f64]) -> Result<Factor<T>> {
    let m = k.nrows();
    let mut a = k.clone();
    for i in 0..m {
        a[(i, i)] += noise;
    }
    if let Some(l) = cholesky_lower(&a, T::zero()) {
        return Ok(Factor { l, jitter: T::zero() });
    }
    let mean_diag = a.diagonal().iter().fold(T::zero(), |s, &v| s + v) / T::of_usize(m.max(1));
    for &j in ladder {
        let jitter = T::of(j) * mean_diag;
        if let Some(l) = cholesky_lower(&a, jitter) {
            return Ok(Factor { l, jitter });
        }
    }
    Err(Error::NumericFailure(format!(
        "covariance factorization failed after jitter {:?}",
        ladder
    )))
}

fn log_det_half<T: Real>(l: &DMatrix<T>) -> T {
    l.diagonal().iter().fold(T::zero(), |s, &v| s + v.ln())
}

fn mll_value<T: Real>(y: &DVector<T>, alpha: &DVector<T>, l: &DMatrix<T>) -> T {
    let m = T::of_usize(y.len());
    -T::of(0.5) * y.dot(alpha) - log_det_half(l) - m / T::of(2.0) * T::two_pi().ln()
}

/// Marginal log-likelihood and its gradient with respect to the kernel's
/// unconstrained parameters followed by `log σ_n²`.
pub fn mll_and_grad<T: Real>(
    space: &SearchSpace,
    train: &TrainingSet<T>,
    spec: &KernelSpec<T>,
    noise: T,
    ladder: &[f64],
) -> Result<(T, Vec<T>)> {
    let (k, dk) = gram_with_grads(space, spec, train.points())?;
    let f = factor(&k, noise, ladder)?;
    let y = train.standardized();
    let alpha = solve_upper_t(&f.l, &solve_lower(&f.l, &y));
    let value = mll_value(&y, &alpha, &f.l);
    let m = y.len();
    let linv = f
        .l
        .solve_lower_triangular(&DMatrix::identity(m, m))
        .ok_or_else(|| Error::NumericFailure("singular Cholesky factor".into()))?;
    let kinv = linv.transpose() * &linv;
    // W = ααᵀ − K⁻¹; dL/dθ = ½ tr(W dK)
    let w = &alpha * alpha.transpose() - kinv;
    let half = T::of(0.5);
    let mut grad: Vec<T> = dk
        .iter()
        .map(|d| half * w.component_mul(d).sum())
        .collect();
    grad.push(half * noise * w.trace());
    Ok((value, grad))
}

/// A fitted GP: hyperparameters, training data and the factored covariance.
#[derive(Debug, Clone)]
pub struct GpState<T: Real> {
    space: SearchSpace,
    spec: KernelSpec<T>,
    noise: T,
    train: TrainingSet<T>,
    l: DMatrix<T>,
    alpha: DVector<T>,
    jitter: T,
    clamps: Arc<AtomicUsize>,
}

impl<T: Real> GpState<T> {
    /// Conditions on `train` with fixed hyperparameters.
    pub fn condition(
        space: &SearchSpace,
        train: TrainingSet<T>,
        spec: KernelSpec<T>,
        noise: T,
        ladder: &[f64],
    ) -> Result<Self> {
        if !(noise > T::zero()) {
            return Err(Error::Constraint {
                name: "noise_variance",
                value: noise.as_f64(),
                constraint: "> 0".into(),
            });
        }
        let k = gram(space, &spec, train.points())?;
        let f = factor(&k, noise, ladder)?;
        let y = train.standardized();
        let alpha = solve_upper_t(&f.l, &solve_lower(&f.l, &y));
        Ok(Self {
            space: space.clone(),
            spec,
            noise,
            train,
            l: f.l,
            alpha,
            jitter: f.jitter,
            clamps: Arc::new(AtomicUsize::new(0)),
        })
    }

    pub fn spec(&self) -> &KernelSpec<T> {
        &self.spec
    }

    pub fn noise(&self) -> T {
        self.noise
    }

    pub fn train(&self) -> &TrainingSet<T> {
        &self.train
    }

    /// Lower Cholesky factor of `K + (σ_n² + jitter) I`.
    pub fn factor(&self) -> &DMatrix<T> {
        &self.l
    }

    pub fn alpha(&self) -> &DVector<T> {
        &self.alpha
    }

    /// Jitter added on top of the noise, 0 when none was needed.
    pub fn jitter(&self) -> T {
        self.jitter
    }

    /// How many predictive variances were clamped at zero so far.
    pub fn clamp_count(&self) -> usize {
        self.clamps.load(Ordering::Relaxed)
    }

    pub fn mll(&self) -> T {
        mll_value(&self.train.standardized(), &self.alpha, &self.l)
    }

    /// Posterior mean and variance of `f` in raw target units.
    pub fn predict(&self, x: &Point) -> Result<(T, T)> {
        let out = self.predict_batch(std::slice::from_ref(x))?;
        Ok(out[0])
    }

    pub fn predict_batch(&self, xs: &[Point]) -> Result<Vec<(T, T)>> {
        let kx = cross_gram(&self.space, &self.spec, self.train.points(), xs)?;
        let s = self.train.std();
        let mut out = Vec::with_capacity(xs.len());
        for (j, x) in xs.iter().enumerate() {
            let col = kx.column(j).into_owned();
            let mean = col.dot(&self.alpha);
            let v = solve_lower(&self.l, &col);
            let mut var = self.spec.eval(&x.0, &x.0) - v.dot(&v);
            if var < T::zero() {
                self.clamps.fetch_add(1, Ordering::Relaxed);
                var = T::zero();
            }
            out.push((self.train.destandardize(mean), var * s * s));
        }
        Ok(out)
    }
}

fn free_vector<T: Real>(spec: &KernelSpec<T>, noise: T) -> Vec<T> {
    let mut v = spec.unconstrained();
    v.push(noise.ln());
    v
}

fn clamp_free<T: Real>(v: &mut [T], fixed_noise: Option<T>) {
    let lim = T::of(FREE_LIMIT);
    let last = v.len() - 1;
    for x in v[..last].iter_mut() {
        *x = x.max(-lim).min(lim);
    }
    v[last] = match fixed_noise {
        Some(n) => n.ln(),
        None => v[last]
            .max(T::of(NOISE_BOUNDS.0.ln()))
            .min(T::of(NOISE_BOUNDS.1.ln())),
    };
}

/// Adam ascent from one start; returns the best `(mll, spec, noise)` seen.
fn ascend<T: Real>(
    space: &SearchSpace,
    train: &TrainingSet<T>,
    spec: &KernelSpec<T>,
    noise: T,
    config: &OptimizerConfig,
) -> Option<(T, KernelSpec<T>, T)> {
    let fixed = config.fixed_noise.then_some(noise);
    let mut theta = free_vector(spec, noise);
    clamp_free(&mut theta, fixed);
    let p = theta.len();
    let (b1, b2, eps) = (T::of(0.9), T::of(0.999), T::of(1e-8));
    let lr = T::of(config.learning_rate);
    let mut m1 = vec![T::zero(); p];
    let mut m2 = vec![T::zero(); p];
    let mut best: Option<(T, KernelSpec<T>, T)> = None;
    for step in 0..=config.steps {
        let Ok(cur) = spec.with_unconstrained(&theta[..p - 1]) else {
            break;
        };
        let cur_noise = theta[p - 1].exp();
        let Ok((value, grad)) = mll_and_grad(space, train, &cur, cur_noise, &config.jitter) else {
            break;
        };
        if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            break;
        }
        if best.as_ref().is_none_or(|(b, _, _)| value > *b) {
            best = Some((value, cur, cur_noise));
        }
        if step == config.steps {
            break;
        }
        let t = (step + 1) as i32;
        for i in 0..p {
            m1[i] = b1 * m1[i] + (T::one() - b1) * grad[i];
            m2[i] = b2 * m2[i] + (T::one() - b2) * grad[i] * grad[i];
            let mh = m1[i] / (T::one() - b1.powi(t));
            let vh = m2[i] / (T::one() - b2.powi(t));
            theta[i] += lr * mh / (vh.sqrt() + eps);
        }
        clamp_free(&mut theta, fixed);
    }
    best
}

/// Fits hyperparameters by Adam ascent from each start and keeps the one
/// with the highest marginal log-likelihood (first start wins ties).
pub fn fit<T: Real>(
    space: &SearchSpace,
    train: TrainingSet<T>,
    starts: &[(KernelSpec<T>, T)],
    config: &OptimizerConfig,
) -> Result<GpState<T>> {
    if train.len() < 2 {
        return Err(Error::invalid("fitting needs at least two observations"));
    }
    if starts.is_empty() {
        return Err(Error::invalid("no starting hyperparameters"));
    }
    let mut best: Option<(T, KernelSpec<T>, T)> = None;
    for (spec, noise) in starts {
        if let Some(cand) = ascend(space, &train, spec, *noise, config) {
            if best.as_ref().is_none_or(|(b, _, _)| cand.0 > *b) {
                best = Some(cand);
            }
        }
    }
    let (_, spec, noise) = best.ok_or_else(|| {
        Error::NumericFailure("marginal likelihood could not be evaluated at any start".into())
    })?;
    GpState::condition(space, train, spec, noise, &config.jitter)
}
