//! Spectral machinery of Hamming graphs.
//!
//! A Hamming graph is the Cartesian product of complete graphs `K_g`. The
//! Laplacian of `K_g` is `g·I − J`: eigenvalue `0` on the constants and `g`
//! on their orthogonal complement. Product eigenvalues are sums of factor
//! eigenvalues, so every eigenvalue class is an integer `Σ_{i∈S} g_i`.
//!
//! The routines here deliberately take the slow road (explicit eigenbases,
//! numeric eigendecompositions) so they can serve as oracles for the closed
//! forms in [`crate::kernels`].

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{group_distinct, least_squares, solve_square, sym_eigen, sym_eigenvalues};
use crate::scalar::Real;
use crate::space::{mismatches, Point, SearchSpace};

/// Relative tolerance used to call two eigenvalues equal.
pub const DISTINCT_TOL: f64 = 1e-6;

/// Laplacian `D − A` of the complete graph on `g` vertices.
pub fn complete_graph_laplacian<T: Real>(g: usize) -> Result<DMatrix<T>> {
    if g < 2 {
        return Err(Error::invalid(format!("complete graph needs g >= 2, got {g}")));
    }
    let deg = T::of_usize(g - 1);
    Ok(DMatrix::from_fn(g, g, |r, c| if r == c { deg } else { -T::one() }))
}

/// Eigenstructure of one complete-graph factor.
#[derive(Debug, Clone)]
pub struct FactorSpectrum<T: Real> {
    pub g: usize,
    /// Ascending; `0` first, then `g` repeated `g − 1` times.
    pub eigenvalues: Vec<T>,
    /// Orthonormal eigenvectors as columns, matching `eigenvalues`.
    pub basis: DMatrix<T>,
}

impl<T: Real> FactorSpectrum<T> {
    /// `Σ_j w(λ_j) f_j(a) f_j(b)`.
    pub fn spectral_sum(&self, a: usize, b: usize, weight: impl Fn(T) -> T) -> T {
        let mut acc = T::zero();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            acc += weight(lam) * self.basis[(a, j)] * self.basis[(b, j)];
        }
        acc
    }

    /// Max-entry error of `F Λ Fᵀ` against the Laplacian.
    pub fn reconstruction_error(&self) -> T {
        let lap: DMatrix<T> = complete_graph_laplacian(self.g).expect("g >= 2");
        let lam = DMatrix::from_diagonal(&DVector::from_vec(self.eigenvalues.clone()));
        (&self.basis * lam * self.basis.transpose() - lap).amax()
    }

    /// Max-entry deviation of `Fᵀ F` from the identity.
    pub fn orthonormality_error(&self) -> T {
        (self.basis.transpose() * &self.basis - DMatrix::identity(self.g, self.g)).amax()
    }
}

/// Analytic spectrum of `K_g` with a Helmert completion of the constant
/// eigenvector.
pub fn factor_spectrum<T: Real>(g: usize) -> Result<FactorSpectrum<T>> {
    if g < 2 {
        return Err(Error::invalid(format!("complete graph needs g >= 2, got {g}")));
    }
    let mut basis = DMatrix::zeros(g, g);
    let c0 = T::one() / T::of_usize(g).sqrt();
    for r in 0..g {
        basis[(r, 0)] = c0;
    }
    for k in 1..g {
        let norm = T::one() / T::of_usize(k * (k + 1)).sqrt();
        for r in 0..k {
            basis[(r, k)] = norm;
        }
        basis[(k, k)] = -T::of_usize(k) * norm;
    }
    let mut eigenvalues = vec![T::of_usize(g); g];
    eigenvalues[0] = T::zero();
    Ok(FactorSpectrum {
        g,
        eigenvalues,
        basis,
    })
}

/// Spectrum of `K_g` from a numeric symmetric eigendecomposition.
pub fn numeric_factor_spectrum<T: Real>(g: usize) -> Result<FactorSpectrum<T>> {
    let lap = complete_graph_laplacian::<T>(g)?;
    let (eigenvalues, basis) = sym_eigen(&lap);
    Ok(FactorSpectrum {
        g,
        eigenvalues,
        basis,
    })
}

/// Per-factor spectra plus the distinct eigenvalue classes of the product.
#[derive(Debug, Clone)]
pub struct ProductSpectrum<T: Real> {
    pub factors: Vec<FactorSpectrum<T>>,
    /// Distinct sums `Σ_{i∈S} g_i`, ascending.
    pub classes: Vec<usize>,
}

pub fn product_spectrum<T: Real>(space: &SearchSpace) -> ProductSpectrum<T> {
    let factors = space
        .cardinalities()
        .iter()
        .map(|&g| factor_spectrum(g).expect("validated space"))
        .collect();
    ProductSpectrum {
        factors,
        classes: eigen_classes(space),
    }
}

/// Distinct product Laplacian eigenvalues (subset sums of the `g_i`).
pub fn eigen_classes(space: &SearchSpace) -> Vec<usize> {
    let total = space.one_hot_width();
    let mut reach = vec![false; total + 1];
    reach[0] = true;
    for &g in space.cardinalities() {
        for s in (g..=total).rev() {
            if reach[s - g] {
                reach[s] = true;
            }
        }
    }
    reach
        .iter()
        .enumerate()
        .filter_map(|(s, &r)| r.then_some(s))
        .collect()
}

fn expand_betas<T: Real>(space: &SearchSpace, betas: &[T]) -> Result<Vec<T>> {
    let n = space.dims();
    let betas = match betas.len() {
        1 => vec![betas[0]; n],
        l if l == n => betas.to_vec(),
        l => {
            return Err(Error::invalid(format!(
                "expected 1 or {n} betas, got {l}"
            )))
        }
    };
    if let Some(b) = betas.iter().find(|b| !(**b > T::zero())) {
        return Err(Error::Constraint {
            name: "beta",
            value: b.as_f64(),
            constraint: "> 0".into(),
        });
    }
    Ok(betas)
}

/// COMBO Gram `Π_i Σ_j e^{−β_i λ_j} f_j(x_i) f_j(y_i)` evaluated through a
/// numeric eigendecomposition of every factor Laplacian. Unnormalized.
pub fn combo_gram_numeric<T: Real>(
    space: &SearchSpace,
    betas: &[T],
    points: &[Point],
) -> Result<DMatrix<T>> {
    let betas = expand_betas(space, betas)?;
    for p in points {
        space.check(p)?;
    }
    let mut memo: BTreeMap<usize, FactorSpectrum<T>> = BTreeMap::new();
    for &g in space.cardinalities() {
        if let std::collections::btree_map::Entry::Vacant(e) = memo.entry(g) {
            e.insert(numeric_factor_spectrum(g)?);
        }
    }
    let factors: Vec<&FactorSpectrum<T>> =
        space.cardinalities().iter().map(|g| &memo[g]).collect();
    let m = points.len();
    let mut gram = DMatrix::zeros(m, m);
    for r in 0..m {
        for c in r..m {
            let (x, y) = (&points[r].0, &points[c].0);
            let mut v = T::one();
            for (i, f) in factors.iter().enumerate() {
                let b = betas[i];
                v *= f.spectral_sum(x[i], y[i], |lam| (-b * lam).exp());
            }
            gram[(r, c)] = v;
            gram[(c, r)] = v;
        }
    }
    Ok(gram)
}

/// Product Laplacian of the full Hamming graph, optionally with per-dimension
/// weights (`Σ_i w_i · I ⊗ … ⊗ Δ_i ⊗ … ⊗ I`). Test-scale only (`|X| <= 4096`).
pub fn product_laplacian<T: Real>(space: &SearchSpace, weights: &[T]) -> Result<DMatrix<T>> {
    let size = space
        .num_points()
        .filter(|&s| s <= 4096)
        .ok_or_else(|| Error::invalid("full Laplacian limited to 4096 points"))?;
    let w = match weights.len() {
        0 => vec![T::one(); space.dims()],
        1 => vec![weights[0]; space.dims()],
        l if l == space.dims() => weights.to_vec(),
        l => return Err(Error::invalid(format!("bad weight count {l}"))),
    };
    let pts: Vec<Point> = space.enumerate().collect();
    let mut lap = DMatrix::zeros(size, size);
    for r in 0..size {
        let mut diag = T::zero();
        for (i, &g) in space.cardinalities().iter().enumerate() {
            diag += w[i] * T::of_usize(g - 1);
        }
        lap[(r, r)] = diag;
        for c in 0..size {
            let (x, y) = (&pts[r].0, &pts[c].0);
            if mismatches(x, y) == 1 {
                let i = (0..x.len()).find(|&i| x[i] != y[i]).expect("one mismatch");
                lap[(r, c)] = -w[i];
            }
        }
    }
    Ok(lap)
}

/// Heat kernel `exp(−Σ β_i Δ_i)` over all of `X` from a numeric
/// eigendecomposition of the full product Laplacian. Cross-check only.
pub fn full_heat_gram<T: Real>(space: &SearchSpace, betas: &[T]) -> Result<DMatrix<T>> {
    let betas = expand_betas(space, betas)?;
    let lap = product_laplacian(space, &betas)?;
    let (vals, vecs) = sym_eigen(&lap);
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| (-l).exp()),
    ));
    Ok(&vecs * d * vecs.transpose())
}

/// A regularization `Φ` tabulated on integer Laplacian eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiSpec<T: Real> {
    values: BTreeMap<usize, T>,
}

impl<T: Real> PhiSpec<T> {
    pub fn new(values: BTreeMap<usize, T>) -> Result<Self> {
        if let Some((lam, v)) = values.iter().find(|(_, v)| !(**v >= T::zero())) {
            return Err(Error::Constraint {
                name: "phi",
                value: v.as_f64(),
                constraint: format!(">= 0 (at eigenvalue {lam})"),
            });
        }
        Ok(Self { values })
    }

    /// Tabulates `f` on every eigenvalue class of `space`.
    pub fn from_fn(space: &SearchSpace, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(
            eigen_classes(space)
                .into_iter()
                .map(|lam| (lam, f(T::of_usize(lam))))
                .collect(),
        )
    }

    pub fn get(&self, lambda: usize) -> Option<T> {
        self.values.get(&lambda).copied()
    }

    pub fn values(&self) -> &BTreeMap<usize, T> {
        &self.values
    }
}

/// Per-dimension projector weights `(P0, P1(equal), P1(different))` read off
/// the Helmert eigenbasis.
fn projector_table<T: Real>(space: &SearchSpace) -> Vec<(T, T, T)> {
    space
        .cardinalities()
        .iter()
        .map(|&g| {
            let f = factor_spectrum::<T>(g).expect("validated space");
            let p0 = f.basis[(0, 0)] * f.basis[(1, 0)];
            let same = f.spectral_sum(0, 0, |l| if l > T::zero() { T::one() } else { T::zero() });
            let diff = f.spectral_sum(0, 1, |l| if l > T::zero() { T::one() } else { T::zero() });
            (p0, same, diff)
        })
        .collect()
}

/// For one mismatch pattern, the weight each eigenvalue class contributes:
/// `Σ_{S: Σ_{i∈S} g_i = λ} Π_{i∈S} P1_i Π_{i∉S} P0_i`.
fn class_weights<T: Real>(
    cards: &[usize],
    table: &[(T, T, T)],
    differ: impl Fn(usize) -> bool,
    total: usize,
) -> Vec<T> {
    let mut acc = vec![T::zero(); total + 1];
    acc[0] = T::one();
    let mut top = 0;
    for (i, &g) in cards.iter().enumerate() {
        let (p0, same, diff) = table[i];
        let p1 = if differ(i) { diff } else { same };
        for s in (0..=top).rev() {
            let w = acc[s];
            if w != T::zero() {
                acc[s + g] += w * p1;
                acc[s] = w * p0;
            }
        }
        top += g;
    }
    acc
}

/// Φ-kernel Gram `Σ_j Φ(λ_j) f_j(x) f_j(y)` over the product eigenbasis.
pub fn phi_gram<T: Real>(
    space: &SearchSpace,
    phi: &PhiSpec<T>,
    points: &[Point],
) -> Result<DMatrix<T>> {
    for lam in eigen_classes(space) {
        if phi.get(lam).is_none() {
            return Err(Error::invalid(format!("phi is missing eigenvalue {lam}")));
        }
    }
    for p in points {
        space.check(p)?;
    }
    let table = projector_table::<T>(space);
    let cards = space.cardinalities();
    let total = space.one_hot_width();
    let m = points.len();
    let mut gram = DMatrix::zeros(m, m);
    for r in 0..m {
        for c in r..m {
            let (x, y) = (&points[r].0, &points[c].0);
            let w = class_weights(cards, &table, |i| x[i] != y[i], total);
            let v = w
                .iter()
                .enumerate()
                .filter(|(_, w)| **w != T::zero())
                .fold(T::zero(), |acc, (lam, &w)| {
                    acc + w * phi.get(lam).unwrap_or_else(T::zero)
                });
            gram[(r, c)] = v;
            gram[(c, r)] = v;
        }
    }
    Ok(gram)
}

/// Outcome of converting a Hamming kernel into a Φ-kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiConversion<T: Real> {
    Exact(PhiSpec<T>),
    /// No non-negative Φ reproduces the kernel; `residual` is the relative
    /// least-squares residual (zero when the failure is a negative Φ).
    NotRepresentable { residual: f64, reason: String },
}

impl<T: Real> PhiConversion<T> {
    pub fn exact(self) -> Option<PhiSpec<T>> {
        match self {
            PhiConversion::Exact(p) => Some(p),
            PhiConversion::NotRepresentable { .. } => None,
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Limit on `n` for the mismatch-pattern system used with unequal sizes.
const MAX_PATTERN_DIMS: usize = 16;

/// Relative residual above which a conversion is declared impossible.
const CONVERSION_TOL: f64 = 1e-8;

/// Finds `Φ` such that the Φ-kernel equals the Hamming kernel with
/// `kernel_values[h]` at distance `h = 0..=n`.
///
/// Equal-sized spaces solve the square `(n+1)×(n+1)` system relating the
/// eigenvalue classes `k·g` to distances (Krawtchouk weights). Unequal sizes
/// fit one equation per mismatch pattern in least squares and report
/// [`PhiConversion::NotRepresentable`] when the residual is not negligible.
pub fn hamming_to_phi<T: Real>(
    space: &SearchSpace,
    kernel_values: &[T],
) -> Result<PhiConversion<T>> {
    let n = space.dims();
    if kernel_values.len() != n + 1 {
        return Err(Error::invalid(format!(
            "need {} kernel values (distances 0..={n}), got {}",
            n + 1,
            kernel_values.len()
        )));
    }
    let phi: BTreeMap<usize, T> = if space.equal_sized() {
        let g = space.cardinality(0);
        let gf = g as f64;
        let (p0, same, diff) = (1.0 / gf, (gf - 1.0) / gf, -1.0 / gf);
        // M[h][k] = Σ_a C(h,a) C(n−h,k−a) diff^a same^(k−a) p0^(n−k)
        let m = DMatrix::from_fn(n + 1, n + 1, |h, k| {
            let mut s = 0.0;
            for a in 0..=k.min(h) {
                s += binomial(h, a)
                    * binomial(n - h, k - a)
                    * diff.powi(a as i32)
                    * same.powi((k - a) as i32);
            }
            T::of(s * p0.powi((n - k) as i32))
        });
        let b = DVector::from_column_slice(kernel_values);
        let z = solve_square(&m, &b)?;
        (0..=n).map(|k| (k * g, z[k])).collect()
    } else {
        if n > MAX_PATTERN_DIMS {
            return Err(Error::invalid(format!(
                "unequal-size conversion limited to {MAX_PATTERN_DIMS} dimensions"
            )));
        }
        let classes = eigen_classes(space);
        let col_of: BTreeMap<usize, usize> =
            classes.iter().enumerate().map(|(j, &l)| (l, j)).collect();
        let table = projector_table::<T>(space);
        let total = space.one_hot_width();
        let rows = 1usize << n;
        let mut a = DMatrix::zeros(rows, classes.len());
        let mut b = DVector::zeros(rows);
        for pattern in 0..rows {
            let w = class_weights(space.cardinalities(), &table, |i| pattern >> i & 1 == 1, total);
            for (lam, &wv) in w.iter().enumerate() {
                if let Some(&j) = col_of.get(&lam) {
                    a[(pattern, j)] = wv;
                }
            }
            b[pattern] = kernel_values[pattern.count_ones() as usize];
        }
        let (z, resid) = least_squares(&a, &b)?;
        let rel = resid.as_f64() / b.norm().as_f64().max(f64::MIN_POSITIVE);
        if rel > CONVERSION_TOL {
            return Ok(PhiConversion::NotRepresentable {
                residual: rel,
                reason: format!("least-squares residual {rel:.3e} over mismatch patterns"),
            });
        }
        classes.iter().enumerate().map(|(j, &l)| (l, z[j])).collect()
    };
    let scale = phi
        .values()
        .fold(0.0f64, |m, v| m.max(v.as_f64().abs()))
        .max(f64::MIN_POSITIVE);
    if let Some((lam, v)) = phi.iter().find(|(_, v)| v.as_f64() < -CONVERSION_TOL * scale) {
        return Ok(PhiConversion::NotRepresentable {
            residual: 0.0,
            reason: format!("negative phi {} at eigenvalue {lam}", v.as_f64()),
        });
    }
    let phi = phi
        .into_iter()
        .map(|(l, v)| (l, v.max(T::zero())))
        .collect();
    Ok(PhiConversion::Exact(PhiSpec::new(phi)?))
}

/// A distinct eigenvalue and its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenClass {
    pub value: f64,
    pub multiplicity: usize,
}

/// The Hamming kernel on `{0,1} × {0,1} × {0,1,2,3}` taking values
/// `10, 6, 4, 3` at distances `0..=3`, over inputs in lexicographic order.
pub fn counterexample_matrix() -> DMatrix<f64> {
    let space = counterexample_space();
    let pts: Vec<Point> = space.enumerate().collect();
    let vals = [10.0, 6.0, 4.0, 3.0];
    DMatrix::from_fn(pts.len(), pts.len(), |r, c| vals[mismatches(&pts[r].0, &pts[c].0)])
}

pub fn counterexample_space() -> SearchSpace {
    SearchSpace::new(vec![2, 2, 4]).expect("valid")
}

/// Distinct eigenvalues of [`counterexample_matrix`], descending.
pub fn counterexample_eigenvalues() -> Vec<EigenClass> {
    let asc = sym_eigenvalues(&counterexample_matrix());
    let mut groups: Vec<EigenClass> = group_distinct(&asc, DISTINCT_TOL)
        .into_iter()
        .map(|(value, multiplicity)| EigenClass {
            value,
            multiplicity,
        })
        .collect();
    groups.reverse();
    groups
}

/// Evidence that the HED embedding distance is not a function of `√h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodiReport {
    pub sqrt_h_a: f64,
    pub embedding_a: f64,
    pub sqrt_h_b: f64,
    pub embedding_b: f64,
}

impl BodiReport {
    pub fn reproduced(&self) -> bool {
        self.sqrt_h_a == 1.0
            && self.sqrt_h_b == 1.0
            && self.embedding_a == 1.0
            && self.embedding_b == 0.0
    }
}

fn hed_embedding_distance(x: &[usize], y: &[usize], anchors: &[&[usize]]) -> f64 {
    anchors
        .iter()
        .map(|a| {
            let d = mismatches(a, x) as f64 - mismatches(a, y) as f64;
            d * d
        })
        .sum()
}

/// Evaluates the two single-anchor scenarios.
pub fn bodi_report() -> BodiReport {
    let anchor: &[usize] = &[1, 1, 1];
    let (xa, ya) = ([1, 1, 1], [1, 1, 2]);
    let (xb, yb) = ([1, 1, 2], [1, 1, 3]);
    BodiReport {
        sqrt_h_a: (mismatches(&xa, &ya) as f64).sqrt(),
        embedding_a: hed_embedding_distance(&xa, &ya, &[anchor]),
        sqrt_h_b: (mismatches(&xb, &yb) as f64).sqrt(),
        embedding_b: hed_embedding_distance(&xb, &yb, &[anchor]),
    }
}

/// `true` when both scenarios share `√h = 1` but embed at distances 1 and 0.
pub fn bodi_not_hamming_check() -> bool {
    bodi_report().reproduced()
}
