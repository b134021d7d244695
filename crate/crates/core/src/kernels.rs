//! Closed-form kernels on categorical spaces.
//!
//! All product-type kernels (heat, COMBO closed form, CASMOPOLITAN, ρ) reduce
//! to `σ² · Π_{i: x_i ≠ y_i} ρ_i` and cost `O(n)` per entry; they differ only
//! in how `ρ_i` is parameterized:
//!
//! | family | `ρ_i` |
//! |--------|-------|
//! | heat | `(1 − e^{−β_i g_i}) / (1 + (g_i − 1) e^{−β_i g_i})` |
//! | COMBO closed form | ratio of the per-factor off/on-diagonal heat values |
//! | CASMOPOLITAN | `exp(−ℓ_i / n)` |
//! | ρ | `ρ_i ∈ (−1/(g_i − 1), 1)` directly |
//!
//! Hamming profiles depend on `√h` only; additive families combine
//! compound-symmetry base kernels `k_i ∈ {v_i, v_i ρ_i}`; invariance
//! wrappers make any of the above invariant to permutations of the
//! dimensions.
//!
//! Hyperparameters are stored constrained; [`KernelSpec::unconstrained`] and
//! [`KernelSpec::with_unconstrained`] map to the optimizer's space (log for
//! positive values, scaled logistic for ρ).

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{permutation, seeded};
use crate::scalar::Real;
use crate::space::{mismatches, Point, SearchSpace};

/// Default Monte Carlo sample count for sum/product invariance.
pub const DEFAULT_INVARIANT_SAMPLES: usize = 200;

/// Largest component size drawn by [`Decomposition::sample`].
pub const MAX_COMPONENT_SIZE: usize = 3;

const NONNEG_FLOOR: f64 = 1e-12;

/// Kernel family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Heat,
    Casmopolitan,
    ComboClosed,
    HammingRbf,
    HammingMatern52,
    HammingRq,
    Rho,
    AdditiveSum,
    RandomDecomposition(Decomposition),
    ExplainableAdditive,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Heat => "heat",
            Family::Casmopolitan => "casmopolitan",
            Family::ComboClosed => "combo",
            Family::HammingRbf => "hamming-rbf",
            Family::HammingMatern52 => "hamming-matern52",
            Family::HammingRq => "hamming-rq",
            Family::Rho => "rho",
            Family::AdditiveSum => "additive",
            Family::RandomDecomposition(_) => "random-decomposition",
            Family::ExplainableAdditive => "explainable-additive",
        }
    }

    fn is_hamming_profile(&self) -> bool {
        matches!(
            self,
            Family::HammingRbf | Family::HammingMatern52 | Family::HammingRq
        )
    }

    fn is_additive(&self) -> bool {
        matches!(
            self,
            Family::AdditiveSum | Family::RandomDecomposition(_) | Family::ExplainableAdditive
        )
    }

    fn has_analytic_gradient(&self) -> bool {
        !self.is_additive()
    }
}

/// Family names accepted by [`FamilyTag::from_str`], in listing order.
pub const FAMILY_NAMES: [&str; 10] = [
    "heat",
    "casmopolitan",
    "combo",
    "hamming-rbf",
    "hamming-matern52",
    "hamming-rq",
    "rho",
    "additive",
    "random-decomposition",
    "explainable-additive",
];

/// Family identifier without structural data, as written in configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyTag {
    Heat,
    Casmopolitan,
    ComboClosed,
    HammingRbf,
    HammingMatern52,
    HammingRq,
    Rho,
    AdditiveSum,
    RandomDecomposition,
    ExplainableAdditive,
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "heat" | "diffusion" => FamilyTag::Heat,
            "casmopolitan" | "casmo" => FamilyTag::Casmopolitan,
            "combo" | "combo-closed" => FamilyTag::ComboClosed,
            "hamming-rbf" | "rbf" => FamilyTag::HammingRbf,
            "hamming-matern52" | "matern52" => FamilyTag::HammingMatern52,
            "hamming-rq" | "rq" => FamilyTag::HammingRq,
            "rho" => FamilyTag::Rho,
            "additive" | "cocabo" => FamilyTag::AdditiveSum,
            "random-decomposition" | "rducb" => FamilyTag::RandomDecomposition,
            "explainable-additive" | "explainable" => FamilyTag::ExplainableAdditive,
            other => return Err(Error::invalid(format!("unknown kernel family `{other}`"))),
        })
    }
}

/// Collection `C` of dimension subsets for the random-decomposition kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    components: Vec<Vec<usize>>,
    seed: Option<u64>,
}

impl Decomposition {
    pub fn new(n: usize, components: Vec<Vec<usize>>) -> Result<Self> {
        let mut covered = vec![false; n];
        for c in &components {
            if c.is_empty() {
                return Err(Error::invalid("empty decomposition component"));
            }
            for &i in c {
                if i >= n {
                    return Err(Error::invalid(format!("component index {i} >= {n}")));
                }
                covered[i] = true;
            }
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(Error::invalid(format!("dimension {i} not in any component")));
        }
        Ok(Self {
            components,
            seed: None,
        })
    }

    /// Uniform random partition into components of size `1..=3`.
    pub fn sample(n: usize, seed: u64) -> Self {
        let mut rng = seeded(seed);
        let order = permutation(&mut rng, n);
        let mut components = Vec::new();
        let mut start = 0;
        while start < n {
            let size = rng.random_range(1..=MAX_COMPONENT_SIZE).min(n - start);
            let mut comp = order[start..start + size].to_vec();
            comp.sort_unstable();
            components.push(comp);
            start += size;
        }
        Self {
            components,
            seed: Some(seed),
        }
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}

/// Invariance construction applied on top of a base kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantMode {
    /// Mean of `k(g x, g' y)` over a sampled set of dimension permutations.
    Sum { samples: usize },
    /// `k(sort x, sort y)`.
    Proj,
    /// Isotropic profile at the padded-sorting distance.
    PaddedProj,
    /// Geometric mean of `k(g x, g' y)` over a sampled set of permutations.
    Prod { samples: usize },
}

impl FromStr for InvariantMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, count) = match s.split_once(':') {
            Some((h, c)) => (
                h,
                Some(c.parse::<usize>().map_err(|e| Error::invalid(e.to_string()))?),
            ),
            None => (s, None),
        };
        let samples = count.unwrap_or(DEFAULT_INVARIANT_SAMPLES);
        Ok(match head {
            "sum" => InvariantMode::Sum { samples },
            "proj" => InvariantMode::Proj,
            "padded" | "padded-proj" => InvariantMode::PaddedProj,
            "prod" => InvariantMode::Prod { samples },
            other => return Err(Error::invalid(format!("unknown invariance `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Invariance {
    mode: InvariantMode,
    /// Dimension permutations used by `Sum`/`Prod`.
    perms: Vec<Vec<usize>>,
}

/// How one hyperparameter group maps to the unconstrained space.
#[derive(Debug, Clone, PartialEq)]
enum Constraint<T> {
    /// `> 0`, log transform.
    Positive,
    /// `>= 0`, log transform with a floor.
    NonNegative,
    /// `(lo_i, 1)`, scaled logistic.
    Interval(Vec<T>),
}

#[derive(Debug, Clone, PartialEq)]
struct ParamGroup<T> {
    name: &'static str,
    values: Vec<T>,
    constraint: Constraint<T>,
}

impl<T: Real> ParamGroup<T> {
    fn check(&self) -> Result<()> {
        for (i, &v) in self.values.iter().enumerate() {
            let ok = match &self.constraint {
                Constraint::Positive => v > T::zero(),
                Constraint::NonNegative => v >= T::zero(),
                Constraint::Interval(lo) => v > lo[i] && v < T::one(),
            };
            if !ok || !v.is_finite() {
                let constraint = match &self.constraint {
                    Constraint::Positive => "> 0".to_string(),
                    Constraint::NonNegative => ">= 0".to_string(),
                    Constraint::Interval(lo) => format!("in ({}, 1)", lo[i]),
                };
                return Err(Error::Constraint {
                    name: self.name,
                    value: v.as_f64(),
                    constraint,
                });
            }
        }
        Ok(())
    }

    fn to_free(&self, i: usize) -> T {
        let v = self.values[i];
        match &self.constraint {
            Constraint::Positive => v.ln(),
            Constraint::NonNegative => v.max(T::of(NONNEG_FLOOR)).ln(),
            Constraint::Interval(lo) => {
                let p = (v - lo[i]) / (T::one() - lo[i]);
                (p / (T::one() - p)).ln()
            }
        }
    }

    fn from_free(&self, i: usize, u: T) -> T {
        match &self.constraint {
            Constraint::Positive | Constraint::NonNegative => u.exp(),
            Constraint::Interval(lo) => {
                let s = sigmoid(u);
                // keep strictly inside the open interval
                let s = s.max(T::of(1e-15)).min(T::one() - T::of(1e-15));
                lo[i] + (T::one() - lo[i]) * s
            }
        }
    }

    /// d(constrained)/d(unconstrained) at the current value.
    fn dvalue_dfree(&self, i: usize) -> T {
        let v = self.values[i];
        match &self.constraint {
            Constraint::Positive | Constraint::NonNegative => v,
            Constraint::Interval(lo) => {
                let s = (v - lo[i]) / (T::one() - lo[i]);
                (T::one() - lo[i]) * s * (T::one() - s)
            }
        }
    }
}

fn sigmoid<T: Real>(u: T) -> T {
    if u >= T::zero() {
        T::one() / (T::one() + (-u).exp())
    } else {
        let e = u.exp();
        e / (T::one() + e)
    }
}

/// Heat-kernel correlation `ρ = (1 − e^{−βg}) / (1 + (g − 1) e^{−βg})`.
pub fn heat_rho<T: Real>(beta: T, g: usize) -> T {
    let e = (-beta * T::of_usize(g)).exp();
    (T::one() - e) / (T::one() + T::of_usize(g - 1) * e)
}

fn heat_drho_dbeta<T: Real>(beta: T, g: usize) -> T {
    let gf = T::of_usize(g);
    let e = (-beta * gf).exp();
    let den = T::one() + T::of_usize(g - 1) * e;
    gf * gf * e / (den * den)
}

/// COMBO per-factor closed form `((1 + (g−1)e^{−βg})/g, (1 − e^{−βg})/g)`
/// for equal and different categories.
pub fn combo_factor<T: Real>(beta: T, g: usize) -> (T, T) {
    let gf = T::of_usize(g);
    let e = (-beta * gf).exp();
    ((T::one() + (gf - T::one()) * e) / gf, (T::one() - e) / gf)
}

/// Maps a heat `β` to the CASMOPOLITAN `γ = −ln ρ(β)` (with `ℓ = n γ`).
pub fn beta_to_gamma<T: Real>(beta: T, g: usize) -> Result<T> {
    if g < 2 {
        return Err(Error::invalid(format!("g must be >= 2, got {g}")));
    }
    if !(beta > T::zero()) {
        return Err(Error::Range(format!(
            "beta = {beta} maps to an infinite gamma; need beta > 0"
        )));
    }
    Ok(-heat_rho(beta, g).ln())
}

fn expand<T: Real>(values: &[T], n: usize, ard: bool, what: &str) -> Result<Vec<T>> {
    match (ard, values.len()) {
        (true, l) if l == n => Ok(values.to_vec()),
        (false, 1) => Ok(values.to_vec()),
        (_, l) => Err(Error::invalid(format!(
            "{what}: expected {} value(s), got {l}",
            if ard { n } else { 1 }
        ))),
    }
}

/// Lower ends `−1/(g_i − 1)` of the admissible ρ intervals. A shared ρ takes
/// the tightest bound.
fn rho_lower<T: Real>(cards: &[usize], ard: bool) -> Vec<T> {
    let lo: Vec<T> = cards
        .iter()
        .map(|&g| -T::one() / T::of_usize(g - 1))
        .collect();
    if ard {
        lo
    } else {
        vec![lo.iter().copied().fold(-T::one(), |a, b| a.max(b))]
    }
}

/// Compound-symmetry base kernels `k_i = v_i` on match, `v_i ρ_i` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseKernels<T> {
    pub variances: Vec<T>,
    pub rhos: Vec<T>,
}

impl<T: Real> BaseKernels<T> {
    pub fn new(variances: Vec<T>, rhos: Vec<T>) -> Self {
        Self { variances, rhos }
    }

    /// From explicit variances `v_i` and covariances `c_i`.
    pub fn from_covariances(variances: Vec<T>, covariances: Vec<T>) -> Self {
        let rhos = variances
            .iter()
            .zip(&covariances)
            .map(|(&v, &c)| c / v)
            .collect();
        Self { variances, rhos }
    }

    fn value(&self, i: usize, same: bool) -> T {
        let (v, r) = self.at(i);
        if same {
            v
        } else {
            v * r
        }
    }

    fn at(&self, i: usize) -> (T, T) {
        let v = if self.variances.len() == 1 { self.variances[0] } else { self.variances[i] };
        let r = if self.rhos.len() == 1 { self.rhos[0] } else { self.rhos[i] };
        (v, r)
    }

    fn check(&self, cards: &[usize]) -> Result<()> {
        let n = cards.len();
        let ard = self.variances.len() == n && n > 1;
        if !(self.variances.len() == 1 || self.variances.len() == n)
            || self.rhos.len() != self.variances.len()
        {
            return Err(Error::invalid(format!(
                "base kernels need 1 or {n} variances with matching rhos"
            )));
        }
        let lo = rho_lower::<T>(cards, ard || self.variances.len() == n);
        ParamGroup {
            name: "variance",
            values: self.variances.clone(),
            constraint: Constraint::Positive,
        }
        .check()?;
        ParamGroup {
            name: "rho",
            values: self.rhos.clone(),
            constraint: Constraint::Interval(lo),
        }
        .check()
    }

    fn evaluate(&self, x: &[usize], y: &[usize]) -> Vec<T> {
        x.iter()
            .zip(y)
            .enumerate()
            .map(|(i, (a, b))| self.value(i, a == b))
            .collect()
    }
}

/// A kernel family with validated hyperparameters, bound to the category
/// counts of one search space.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec<T: Real> {
    cards: Vec<usize>,
    family: Family,
    ard: bool,
    params: Vec<ParamGroup<T>>,
    invariance: Option<Invariance>,
}

impl<T: Real> KernelSpec<T> {
    fn build(
        space: &SearchSpace,
        family: Family,
        ard: bool,
        params: Vec<ParamGroup<T>>,
    ) -> Result<Self> {
        for p in &params {
            p.check()?;
        }
        Ok(Self {
            cards: space.cardinalities().to_vec(),
            family,
            ard,
            params,
            invariance: None,
        })
    }

    fn signal(v: T) -> ParamGroup<T> {
        ParamGroup {
            name: "signal_variance",
            values: vec![v],
            constraint: Constraint::Positive,
        }
    }

    /// Heat kernel; `betas` has `n` entries (ARD) or one.
    pub fn heat(space: &SearchSpace, betas: Vec<T>, signal_variance: T) -> Result<Self> {
        let ard = betas.len() == space.dims() && space.dims() > 1;
        let betas = expand(&betas, space.dims(), ard, "heat betas")?;
        Self::build(
            space,
            Family::Heat,
            ard,
            vec![
                ParamGroup {
                    name: "beta",
                    values: betas,
                    constraint: Constraint::NonNegative,
                },
                Self::signal(signal_variance),
            ],
        )
    }

    /// COMBO kernel through the per-factor closed form.
    pub fn combo_closed(space: &SearchSpace, betas: Vec<T>, signal_variance: T) -> Result<Self> {
        let mut s = Self::heat(space, betas, signal_variance)?;
        s.family = Family::ComboClosed;
        Ok(s)
    }

    /// CASMOPOLITAN kernel; `lengthscales` has `n` entries (ARD) or one.
    pub fn casmopolitan(
        space: &SearchSpace,
        lengthscales: Vec<T>,
        signal_variance: T,
    ) -> Result<Self> {
        let ard = lengthscales.len() == space.dims() && space.dims() > 1;
        let ls = expand(&lengthscales, space.dims(), ard, "casmopolitan lengthscales")?;
        Self::build(
            space,
            Family::Casmopolitan,
            ard,
            vec![
                ParamGroup {
                    name: "lengthscale",
                    values: ls,
                    constraint: Constraint::Positive,
                },
                Self::signal(signal_variance),
            ],
        )
    }

    /// Hamming kernel `σ² 𝕜(√h)` with an RBF, Matérn-5/2 or RQ profile.
    /// `alpha` is required for RQ and rejected otherwise.
    pub fn hamming(
        space: &SearchSpace,
        family: Family,
        lengthscale: T,
        alpha: Option<T>,
        signal_variance: T,
    ) -> Result<Self> {
        if !family.is_hamming_profile() {
            return Err(Error::invalid(format!(
                "`{}` is not a Hamming profile family",
                family.name()
            )));
        }
        let mut params = vec![ParamGroup {
            name: "lengthscale",
            values: vec![lengthscale],
            constraint: Constraint::Positive,
        }];
        match (&family, alpha) {
            (Family::HammingRq, Some(a)) => params.push(ParamGroup {
                name: "alpha",
                values: vec![a],
                constraint: Constraint::Positive,
            }),
            (Family::HammingRq, None) => {
                return Err(Error::invalid("rational quadratic needs alpha"))
            }
            (_, Some(_)) => return Err(Error::invalid("alpha only applies to hamming-rq")),
            (_, None) => {}
        }
        params.push(Self::signal(signal_variance));
        Self::build(space, family, false, params)
    }

    /// Compound-symmetry product kernel with `ρ_i` given directly.
    pub fn rho(space: &SearchSpace, rhos: Vec<T>, signal_variance: T) -> Result<Self> {
        let ard = rhos.len() == space.dims() && space.dims() > 1;
        let rhos = expand(&rhos, space.dims(), ard, "rho values")?;
        Self::build(
            space,
            Family::Rho,
            ard,
            vec![
                ParamGroup {
                    name: "rho",
                    values: rhos,
                    constraint: Constraint::Interval(rho_lower(space.cardinalities(), ard)),
                },
                Self::signal(signal_variance),
            ],
        )
    }

    fn base_groups(space: &SearchSpace, base: &BaseKernels<T>) -> Result<(bool, Vec<ParamGroup<T>>)> {
        base.check(space.cardinalities())?;
        let ard = base.variances.len() == space.dims() && space.dims() > 1;
        Ok((
            ard,
            vec![
                ParamGroup {
                    name: "variance",
                    values: base.variances.clone(),
                    constraint: Constraint::Positive,
                },
                ParamGroup {
                    name: "rho",
                    values: base.rhos.clone(),
                    constraint: Constraint::Interval(rho_lower(space.cardinalities(), ard)),
                },
            ],
        ))
    }

    /// First-order additive kernel `Σ_i k_i`.
    pub fn additive_sum(space: &SearchSpace, base: BaseKernels<T>) -> Result<Self> {
        let (ard, params) = Self::base_groups(space, &base)?;
        Self::build(space, Family::AdditiveSum, ard, params)
    }

    /// `Σ_{c∈C} Π_{i∈c} k_i`.
    pub fn random_decomposition(
        space: &SearchSpace,
        decomposition: Decomposition,
        base: BaseKernels<T>,
    ) -> Result<Self> {
        let (ard, params) = Self::base_groups(space, &base)?;
        for c in decomposition.components() {
            if c.iter().any(|&i| i >= space.dims()) {
                return Err(Error::invalid("decomposition does not fit the space"));
            }
        }
        Self::build(space, Family::RandomDecomposition(decomposition), ard, params)
    }

    /// `Σ_d σ_d e_d(k_1, …, k_n)` with `degree_weights[d − 1] = σ_d`.
    pub fn explainable_additive(
        space: &SearchSpace,
        degree_weights: Vec<T>,
        base: BaseKernels<T>,
    ) -> Result<Self> {
        if degree_weights.len() != space.dims() {
            return Err(Error::invalid(format!(
                "need {} degree weights, got {}",
                space.dims(),
                degree_weights.len()
            )));
        }
        let (ard, mut params) = Self::base_groups(space, &base)?;
        params.push(ParamGroup {
            name: "degree_weight",
            values: degree_weights,
            constraint: Constraint::NonNegative,
        });
        Self::build(space, Family::ExplainableAdditive, ard, params)
    }

    /// Default hyperparameters: `β_i = 1/n`, `ℓ = √n`, `σ² = 1`, `α = 1`,
    /// `ρ_i = ρ(1/n)`, `v_i = 1`, `σ_d = 1`.
    pub fn default_for(space: &SearchSpace, tag: FamilyTag, ard: bool, seed: u64) -> Result<Self> {
        let n = space.dims();
        let nf = T::of_usize(n);
        let width = if ard { n } else { 1 };
        let beta = T::one() / nf;
        let ls = nf.sqrt();
        let one = T::one();
        let base = || {
            let rhos = if ard {
                space.cardinalities().iter().map(|&g| heat_rho(beta, g)).collect()
            } else {
                let g = *space.cardinalities().iter().max().expect("n >= 1");
                vec![heat_rho(beta, g)]
            };
            BaseKernels::new(vec![one; width], rhos)
        };
        let profile_only = |tag: FamilyTag| {
            if ard {
                Err(Error::invalid(format!(
                    "{tag:?} depends on the Hamming distance only; ARD is not available"
                )))
            } else {
                Ok(())
            }
        };
        match tag {
            FamilyTag::Heat => Self::heat(space, vec![beta; width], one),
            FamilyTag::ComboClosed => Self::combo_closed(space, vec![beta; width], one),
            FamilyTag::Casmopolitan => Self::casmopolitan(space, vec![ls; width], one),
            FamilyTag::HammingRbf => {
                profile_only(tag)?;
                Self::hamming(space, Family::HammingRbf, ls, None, one)
            }
            FamilyTag::HammingMatern52 => {
                profile_only(tag)?;
                Self::hamming(space, Family::HammingMatern52, ls, None, one)
            }
            FamilyTag::HammingRq => {
                profile_only(tag)?;
                Self::hamming(space, Family::HammingRq, ls, Some(one), one)
            }
            FamilyTag::Rho => {
                let b = base();
                Self::rho(space, b.rhos, one)
            }
            FamilyTag::AdditiveSum => Self::additive_sum(space, base()),
            FamilyTag::RandomDecomposition => {
                Self::random_decomposition(space, Decomposition::sample(n, seed), base())
            }
            FamilyTag::ExplainableAdditive => {
                Self::explainable_additive(space, vec![one; n], base())
            }
        }
    }

    /// Wraps `self` into a kernel invariant to permutations of the dimensions.
    /// Requires equal category counts; `Sum`/`Prod` sample their permutation
    /// set from `seed` (or enumerate it when `n!` is no larger).
    pub fn invariant(self, mode: InvariantMode, seed: u64) -> Result<Self> {
        if self.invariance.is_some() {
            return Err(Error::invalid("kernel is already wrapped"));
        }
        if self.cards.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::invalid(
                "permutation invariance needs a common category alphabet",
            ));
        }
        let n = self.cards.len();
        let perms = match mode {
            InvariantMode::Sum { samples } | InvariantMode::Prod { samples } => {
                if samples == 0 {
                    return Err(Error::invalid("invariant wrapper needs at least one sample"));
                }
                let full = (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k));
                match full {
                    Some(total) if total <= samples => all_permutations(n),
                    _ => {
                        let mut rng = seeded(seed);
                        (0..samples).map(|_| permutation(&mut rng, n)).collect()
                    }
                }
            }
            InvariantMode::Proj => Vec::new(),
            InvariantMode::PaddedProj => {
                if self.isotropic_rho_or_profile().is_none() {
                    return Err(Error::invalid(format!(
                        "padded projection needs an isotropic inner kernel, `{}` (ard={}) is not",
                        self.family.name(),
                        self.ard
                    )));
                }
                Vec::new()
            }
        };
        Ok(Self {
            invariance: Some(Invariance { mode, perms }),
            ..self
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn ard(&self) -> bool {
        self.ard
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn invariant_mode(&self) -> Option<InvariantMode> {
        self.invariance.as_ref().map(|i| i.mode)
    }

    /// Constrained values of a named hyperparameter group.
    pub fn param(&self, name: &str) -> Option<&[T]> {
        self.params
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.values.as_slice())
    }

    /// `(name, values)` for every hyperparameter group.
    pub fn params(&self) -> impl Iterator<Item = (&'static str, &[T])> {
        self.params.iter().map(|p| (p.name, p.values.as_slice()))
    }

    /// Replaces a named group, re-validating constraints.
    pub fn with_param(&self, name: &str, values: Vec<T>) -> Result<Self> {
        let mut out = self.clone();
        let group = out
            .params
            .iter_mut()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::invalid(format!("no hyperparameter `{name}`")))?;
        if group.values.len() != values.len() {
            return Err(Error::invalid(format!(
                "`{name}` has {} values, got {}",
                group.values.len(),
                values.len()
            )));
        }
        group.values = values;
        group.check()?;
        Ok(out)
    }

    pub fn num_params(&self) -> usize {
        self.params.iter().map(|p| p.values.len()).sum()
    }

    pub fn unconstrained(&self) -> Vec<T> {
        self.params
            .iter()
            .flat_map(|p| (0..p.values.len()).map(move |i| p.to_free(i)))
            .collect()
    }

    pub fn with_unconstrained(&self, free: &[T]) -> Result<Self> {
        if free.len() != self.num_params() {
            return Err(Error::invalid(format!(
                "expected {} unconstrained values, got {}",
                self.num_params(),
                free.len()
            )));
        }
        let mut out = self.clone();
        let mut k = 0;
        for p in &mut out.params {
            for i in 0..p.values.len() {
                p.values[i] = p.from_free(i, free[k]);
                k += 1;
            }
            p.check()?;
        }
        Ok(out)
    }

    /// Whether [`gram_with_grads`] differentiates in closed form.
    pub fn has_analytic_gradient(&self) -> bool {
        self.invariance.is_none() && self.family.has_analytic_gradient()
    }

    fn signal_variance(&self) -> T {
        self.param("signal_variance").map(|v| v[0]).unwrap_or_else(T::one)
    }

    fn dim_values(&self, name: &str) -> Vec<T> {
        let v = self.param(name).expect("family defines the group");
        if v.len() == 1 {
            vec![v[0]; self.cards.len()]
        } else {
            v.to_vec()
        }
    }

    /// Per-dimension mismatch factors for product-type families.
    fn product_rhos(&self) -> Option<Vec<T>> {
        let n = self.cards.len();
        Some(match self.family {
            Family::Heat => self
                .dim_values("beta")
                .iter()
                .zip(&self.cards)
                .map(|(&b, &g)| heat_rho(b, g))
                .collect(),
            Family::ComboClosed => self
                .dim_values("beta")
                .iter()
                .zip(&self.cards)
                .map(|(&b, &g)| {
                    let (same, diff) = combo_factor(b, g);
                    diff / same
                })
                .collect(),
            Family::Casmopolitan => self
                .dim_values("lengthscale")
                .iter()
                .map(|&l| (-l / T::of_usize(n)).exp())
                .collect(),
            Family::Rho => self.dim_values("rho"),
            _ => return None,
        })
    }

    /// `Some` when the kernel depends on `h` only: either a shared `ρ` (value
    /// `σ² ρ^h`) or a Hamming profile.
    fn isotropic_rho_or_profile(&self) -> Option<()> {
        if self.family.is_hamming_profile() {
            return Some(());
        }
        let rhos = self.product_rhos()?;
        rhos.windows(2).all(|w| w[0] == w[1]).then_some(())
    }

    /// Value at Hamming distance `h` for isotropic kernels.
    pub fn profile(&self, h: usize) -> Option<T> {
        let s = self.signal_variance();
        if self.family.is_hamming_profile() {
            return Some(s * self.hamming_profile(T::of_usize(h)).0);
        }
        let rhos = self.product_rhos()?;
        if !rhos.windows(2).all(|w| w[0] == w[1]) {
            return None;
        }
        Some(s * rhos[0].powi(h as i32))
    }

    /// Unit-variance Hamming profile at squared distance `d² = h` and its
    /// derivatives with respect to the free lengthscale and free alpha.
    fn hamming_profile(&self, h: T) -> (T, T, T) {
        let ls = self.param("lengthscale").expect("profile lengthscale")[0];
        match self.family {
            Family::HammingRbf => {
                let k = (-h / (ls * ls)).exp();
                (k, k * T::of(2.0) * h / (ls * ls), T::zero())
            }
            Family::HammingMatern52 => {
                let r = T::of(5.0).sqrt() * h.sqrt() / ls;
                let e = (-r).exp();
                let k = (T::one() + r + r * r / T::of(3.0)) * e;
                let dk_du = e * r * r * (T::one() + r) / T::of(3.0);
                (k, dk_du, T::zero())
            }
            Family::HammingRq => {
                let a = self.param("alpha").expect("rq alpha")[0];
                let q = h / (T::of(2.0) * a * ls * ls);
                let base = T::one() + q;
                let k = base.powf(-a);
                let dk_dul = T::of(2.0) * a * q * base.powf(-a - T::one());
                let dk_dua = k * a * (q / base - base.ln());
                (k, dk_dul, dk_dua)
            }
            _ => unreachable!("not a Hamming profile"),
        }
    }

    fn base_kernels(&self) -> BaseKernels<T> {
        BaseKernels {
            variances: self.param("variance").expect("additive variances").to_vec(),
            rhos: self.param("rho").expect("additive rhos").to_vec(),
        }
    }

    fn eval_base(&self, x: &[usize], y: &[usize]) -> T {
        match &self.family {
            Family::HammingRbf | Family::HammingMatern52 | Family::HammingRq => {
                let h = T::of_usize(mismatches(x, y));
                self.signal_variance() * self.hamming_profile(h).0
            }
            Family::AdditiveSum => self.base_kernels().evaluate(x, y).into_iter().fold(T::zero(), |a, b| a + b),
            Family::RandomDecomposition(d) => {
                let ks = self.base_kernels().evaluate(x, y);
                decomposition_sum(d, &ks)
            }
            Family::ExplainableAdditive => {
                let ks = self.base_kernels().evaluate(x, y);
                let w = self.param("degree_weight").expect("degree weights");
                let e = elementary_symmetric(&ks);
                w.iter().enumerate().fold(T::zero(), |acc, (d, &s)| acc + s * e[d + 1])
            }
            _ => {
                let rhos = self.product_rhos().expect("product family");
                let mut steps = 0;
                self.signal_variance() * rho_product(&rhos, x, y, &mut steps)
            }
        }
    }

    /// Kernel value for two coordinate vectors. Inputs are assumed valid for
    /// the bound space; [`gram`] checks them.
    pub fn eval(&self, x: &[usize], y: &[usize]) -> T {
        let Some(inv) = &self.invariance else {
            return self.eval_base(x, y);
        };
        match inv.mode {
            InvariantMode::Proj => {
                let (mut sx, mut sy) = (x.to_vec(), y.to_vec());
                sx.sort_unstable();
                sy.sort_unstable();
                self.eval_base(&sx, &sy)
            }
            InvariantMode::PaddedProj => {
                let h = padded_distance(x, y, self.cards[0]);
                self.profile(h).expect("checked at construction")
            }
            InvariantMode::Sum { .. } | InvariantMode::Prod { .. } => {
                let moved_x: Vec<Vec<usize>> = inv.perms.iter().map(|p| permute(p, x)).collect();
                let moved_y: Vec<Vec<usize>> = inv.perms.iter().map(|p| permute(p, y)).collect();
                let count = T::of_usize(inv.perms.len() * inv.perms.len());
                let prod = matches!(inv.mode, InvariantMode::Prod { .. });
                let mut acc = T::zero();
                for a in &moved_x {
                    for b in &moved_y {
                        let v = self.eval_base(a, b);
                        acc += if prod { v.max(T::min_positive()).ln() } else { v };
                    }
                }
                if prod {
                    (acc / count).exp()
                } else {
                    acc / count
                }
            }
        }
    }

    /// Kernel value and its gradient with respect to the unconstrained
    /// parameters, for families with closed-form derivatives.
    fn eval_grad(&self, x: &[usize], y: &[usize], grad: &mut [T]) -> T {
        debug_assert!(self.has_analytic_gradient());
        let s = self.signal_variance();
        let sig_idx = self.num_params() - 1;
        if self.family.is_hamming_profile() {
            let h = T::of_usize(mismatches(x, y));
            let (k, dl, da) = self.hamming_profile(h);
            grad[0] = s * dl;
            if matches!(self.family, Family::HammingRq) {
                grad[1] = s * da;
            }
            grad[sig_idx] = s * k;
            return s * k;
        }
        let rhos = self.product_rhos().expect("product family");
        let group = &self.params[0];
        let n = self.cards.len();
        // dρ_i/du for the shared or per-dimension free parameter
        let drho: Vec<T> = (0..n)
            .map(|i| {
                let j = if group.values.len() == 1 { 0 } else { i };
                let dv = group.dvalue_dfree(j);
                match self.family {
                    Family::Heat | Family::ComboClosed => {
                        heat_drho_dbeta(group.values[j], self.cards[i]) * dv
                    }
                    Family::Casmopolitan => -rhos[i] / T::of_usize(n) * dv,
                    Family::Rho => dv,
                    _ => unreachable!(),
                }
            })
            .collect();
        let diff: Vec<usize> = (0..n).filter(|&i| x[i] != y[i]).collect();
        let m = diff.len();
        // prefix/suffix products over mismatched dimensions, zero-safe
        let mut prefix = vec![T::one(); m + 1];
        for (k, &i) in diff.iter().enumerate() {
            prefix[k + 1] = prefix[k] * rhos[i];
        }
        let mut suffix = vec![T::one(); m + 1];
        for k in (0..m).rev() {
            suffix[k] = suffix[k + 1] * rhos[diff[k]];
        }
        let prod = prefix[m];
        for g in grad[..group.values.len()].iter_mut() {
            *g = T::zero();
        }
        for (k, &i) in diff.iter().enumerate() {
            let j = if group.values.len() == 1 { 0 } else { i };
            grad[j] += s * prefix[k] * suffix[k + 1] * drho[i];
        }
        grad[sig_idx] = s * prod;
        s * prod
    }
}

fn permute(perm: &[usize], x: &[usize]) -> Vec<usize> {
    perm.iter().map(|&p| x[p]).collect()
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// `Π_{i: x_i ≠ y_i} ρ_i`, one multiply per dimension; `steps` counts them.
pub fn rho_product<T: Real>(rhos: &[T], x: &[usize], y: &[usize], steps: &mut usize) -> T {
    let mut acc = T::one();
    for ((r, a), b) in rhos.iter().zip(x).zip(y) {
        acc *= if a == b { T::one() } else { *r };
        *steps += 1;
    }
    acc
}

fn decomposition_sum<T: Real>(d: &Decomposition, ks: &[T]) -> T {
    d.components()
        .iter()
        .map(|c| c.iter().fold(T::one(), |acc, &i| acc * ks[i]))
        .fold(T::zero(), |a, b| a + b)
}

/// `e_0..=e_n` of `values` via the Newton–Girard identities.
pub fn elementary_symmetric<T: Real>(values: &[T]) -> Vec<T> {
    let n = values.len();
    let mut power = vec![T::zero(); n + 1];
    for (k, p) in power.iter_mut().enumerate().skip(1) {
        *p = values.iter().fold(T::zero(), |acc, &v| acc + v.powi(k as i32));
    }
    let mut e = vec![T::zero(); n + 1];
    e[0] = T::one();
    for d in 1..=n {
        let mut acc = T::zero();
        for j in 1..=d {
            let term = e[d - j] * power[j];
            if j % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e[d] = acc / T::of_usize(d);
    }
    e
}

/// Symbol of a padded vector: a category or the padding `*`.
pub type PaddedSymbol = Option<usize>;

/// Padded sorting: for each category `c`, `count_c(x)` copies of `c` then
/// padding to length `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedVector(pub Vec<PaddedSymbol>);

impl PaddedVector {
    pub fn hamming(&self, other: &Self) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for PaddedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|s| s.map_or_else(|| "*".to_string(), |c| c.to_string()))
            .collect();
        write!(f, "[{}]", parts.join(","))
    }
}

pub fn pad_sort(space: &SearchSpace, x: &Point) -> Result<PaddedVector> {
    if !space.equal_sized() {
        return Err(Error::invalid("padded sorting needs a common category alphabet"));
    }
    space.check(x)?;
    let (n, g) = (space.dims(), space.cardinality(0));
    let mut counts = vec![0usize; g];
    for &c in x.coords() {
        counts[c] += 1;
    }
    let mut out = Vec::with_capacity(n * g);
    for (c, &cnt) in counts.iter().enumerate() {
        out.extend(std::iter::repeat_n(Some(c), cnt));
        out.extend(std::iter::repeat_n(None, n - cnt));
    }
    Ok(PaddedVector(out))
}

/// Hamming distance between padded-sorted vectors, `Σ_c |count_c(x) − count_c(y)|`,
/// computed from category counts.
pub fn padded_distance(x: &[usize], y: &[usize], g: usize) -> usize {
    let mut diff = vec![0isize; g];
    for &c in x {
        diff[c] += 1;
    }
    for &c in y {
        diff[c] -= 1;
    }
    diff.iter().map(|d| d.unsigned_abs()).sum()
}

fn check_points(space: &SearchSpace, spec_cards: &[usize], pts: &[Point]) -> Result<()> {
    if space.cardinalities() != spec_cards {
        return Err(Error::invalid("kernel was built for a different search space"));
    }
    pts.iter().try_for_each(|p| space.check(p))
}

/// Pairwise kernel matrix; upper triangle computed and mirrored.
pub fn gram<T: Real>(space: &SearchSpace, spec: &KernelSpec<T>, points: &[Point]) -> Result<DMatrix<T>> {
    check_points(space, &spec.cards, points)?;
    let m = points.len();
    let mut k = DMatrix::zeros(m, m);
    for r in 0..m {
        for c in r..m {
            let v = spec.eval(&points[r].0, &points[c].0);
            k[(r, c)] = v;
            k[(c, r)] = v;
        }
    }
    Ok(k)
}

/// Rectangular kernel matrix `K[a, b]`.
pub fn cross_gram<T: Real>(
    space: &SearchSpace,
    spec: &KernelSpec<T>,
    a: &[Point],
    b: &[Point],
) -> Result<DMatrix<T>> {
    check_points(space, &spec.cards, a)?;
    check_points(space, &spec.cards, b)?;
    Ok(DMatrix::from_fn(a.len(), b.len(), |r, c| spec.eval(&a[r].0, &b[c].0)))
}

/// Gram matrix and its derivatives with respect to every unconstrained
/// hyperparameter. Closed-form for product and Hamming families, central
/// differences (relative step `1e-5`) for additive and invariant kernels.
pub fn gram_with_grads<T: Real>(
    space: &SearchSpace,
    spec: &KernelSpec<T>,
    points: &[Point],
) -> Result<(DMatrix<T>, Vec<DMatrix<T>>)> {
    check_points(space, &spec.cards, points)?;
    let m = points.len();
    let p = spec.num_params();
    if spec.has_analytic_gradient() {
        let mut k = DMatrix::zeros(m, m);
        let mut dk = vec![DMatrix::zeros(m, m); p];
        let mut g = vec![T::zero(); p];
        for r in 0..m {
            for c in r..m {
                let v = spec.eval_grad(&points[r].0, &points[c].0, &mut g);
                k[(r, c)] = v;
                k[(c, r)] = v;
                for (d, &gv) in dk.iter_mut().zip(&g) {
                    d[(r, c)] = gv;
                    d[(c, r)] = gv;
                }
            }
        }
        return Ok((k, dk));
    }
    let k = gram(space, spec, points)?;
    let free = spec.unconstrained();
    let mut dk = Vec::with_capacity(p);
    for j in 0..p {
        let step = T::of(1e-5) * free[j].abs().max(T::one());
        let mut up = free.clone();
        up[j] += step;
        let mut down = free.clone();
        down[j] -= step;
        let kp = gram(space, &spec.with_unconstrained(&up)?, points)?;
        let km = gram(space, &spec.with_unconstrained(&down)?, points)?;
        dk.push((kp - km) / (T::of(2.0) * step));
    }
    Ok((k, dk))
}

fn signal_check<T: Real>(s: T) -> Result<()> {
    if s > T::zero() {
        Ok(())
    } else {
        Err(Error::Constraint {
            name: "signal_variance",
            value: s.as_f64(),
            constraint: "> 0".into(),
        })
    }
}

/// Heat kernel `σ² Π_i ρ_i(β_i)^{1−δ(x_i,y_i)}`; `betas` has one or `n`
/// entries, all `>= 0`.
pub fn heat_eval<T: Real>(
    space: &SearchSpace,
    betas: &[T],
    signal_variance: T,
    x: &Point,
    y: &Point,
) -> Result<T> {
    space.check(x)?;
    space.check(y)?;
    signal_check(signal_variance)?;
    let spec = KernelSpec::heat(space, betas.to_vec(), signal_variance)?;
    Ok(spec.eval(&x.0, &y.0))
}

/// CASMOPOLITAN kernel normalized to `k(x, x) = σ²`.
pub fn casmo_eval<T: Real>(
    space: &SearchSpace,
    lengthscales: &[T],
    signal_variance: T,
    x: &Point,
    y: &Point,
) -> Result<T> {
    space.check(x)?;
    space.check(y)?;
    let spec = KernelSpec::casmopolitan(space, lengthscales.to_vec(), signal_variance)?;
    Ok(spec.eval(&x.0, &y.0))
}

/// Hamming kernel `σ² 𝕜(√h(x, y))`.
pub fn hamming_family_eval<T: Real>(
    space: &SearchSpace,
    family: Family,
    lengthscale: T,
    alpha: Option<T>,
    signal_variance: T,
    x: &Point,
    y: &Point,
) -> Result<T> {
    space.check(x)?;
    space.check(y)?;
    let spec = KernelSpec::hamming(space, family, lengthscale, alpha, signal_variance)?;
    Ok(spec.eval(&x.0, &y.0))
}

/// Compound-symmetry product `σ² Π_i ρ_i^{1−δ}` with `ρ_i ∈ (−1/(g_i−1), 1)`.
pub fn rho_eval<T: Real>(
    space: &SearchSpace,
    rhos: &[T],
    signal_variance: T,
    x: &Point,
    y: &Point,
) -> Result<T> {
    space.check(x)?;
    space.check(y)?;
    let spec = KernelSpec::rho(space, rhos.to_vec(), signal_variance)?;
    Ok(spec.eval(&x.0, &y.0))
}

pub fn additive_sum_eval<T: Real>(
    space: &SearchSpace,
    base: &BaseKernels<T>,
    x: &Point,
    y: &Point,
) -> Result<T> {
    space.check(x)?;
    space.check(y)?;
    let spec = KernelSpec::additive_sum(space, base.clone())?;
    Ok(spec.eval(&x.0, &y.0))
}

pub fn random_decomposition_eval<T: Real>(
    space: &SearchSpace,
    decomposition: &Decomposition,
    base: &BaseKernels<T>,
    x: &Point,
    y: &Point,
) -> Result<T> {
    space.check(x)?;
    space.check(y)?;
    let spec = KernelSpec::random_decomposition(space, decomposition.clone(), base.clone())?;
    Ok(spec.eval(&x.0, &y.0))
}

pub fn explainable_additive_eval<T: Real>(
    space: &SearchSpace,
    degree_weights: &[T],
    base: &BaseKernels<T>,
    x: &Point,
    y: &Point,
) -> Result<T> {
    space.check(x)?;
    space.check(y)?;
    let spec = KernelSpec::explainable_additive(space, degree_weights.to_vec(), base.clone())?;
    Ok(spec.eval(&x.0, &y.0))
}

/// Invariant version of `inner` evaluated at one pair.
pub fn invariant_eval<T: Real>(
    space: &SearchSpace,
    inner: &KernelSpec<T>,
    mode: InvariantMode,
    seed: u64,
    x: &Point,
    y: &Point,
) -> Result<T> {
    space.check(x)?;
    space.check(y)?;
    let spec = inner.clone().invariant(mode, seed)?;
    Ok(spec.eval(&x.0, &y.0))
}
