//! The theorem suite behind `heatbo selftest`.
//!
//! Each check prints one line, `<detail> — PASS` or `<detail> — FAIL`.

use std::fmt;

use heatbo::kernels::{gram, Family, KernelSpec};
use heatbo::linalg::sym_eigenvalues;
use heatbo::rng::seeded;
use heatbo::space::{sample_automorphism, sample_relocation};
use heatbo::spectral::{
    bodi_report, combo_gram_numeric, counterexample_eigenvalues, counterexample_space,
    hamming_to_phi, phi_gram, PhiConversion,
};
use heatbo::{Gram, Point, SearchSpace};
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub detail: String,
    pub passed: bool,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{}: {} — {verdict}", self.name, self.detail)
    }
}

fn result(name: &'static str, detail: String, passed: bool) -> CheckResult {
    CheckResult { name, detail, passed }
}

/// Random space with `n ≤ max_n` and `g_i ≤ max_g`.
pub fn random_space(rng: &mut impl Rng, max_n: usize, max_g: usize) -> SearchSpace {
    let n = rng.random_range(1..=max_n);
    SearchSpace::new((0..n).map(|_| rng.random_range(2..=max_g)).collect()).expect("g >= 2")
}

pub fn random_points(space: &SearchSpace, m: usize, rng: &mut heatbo::rng::SeededRng) -> Vec<Point> {
    (0..m).map(|_| space.random_point(rng)).collect()
}

/// Divides by `√(K_ii K_jj)`.
pub fn normalize(k: &Gram) -> Gram {
    Gram::from_fn(k.nrows(), k.ncols(), |r, c| k[(r, c)] / (k[(r, r)] * k[(c, c)]).sqrt())
}

pub fn max_abs_diff(a: &Gram, b: &Gram) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Largest normalized-Gram discrepancy among heat, CASMOPOLITAN with
/// `ℓ_i = n γ_i` and numeric COMBO over `spaces` random spaces.
pub fn heat_equivalence_error(spaces: usize, seed: u64) -> heatbo::Result<f64> {
    let mut rng = seeded(seed);
    let mut worst = 0.0f64;
    for _ in 0..spaces {
        let space = random_space(&mut rng, 6, 6);
        let n = space.dims();
        let betas: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..2.0)).collect();
        let ls: Vec<f64> = betas
            .iter()
            .zip(space.cardinalities())
            .map(|(&b, &g)| Ok(n as f64 * heatbo::kernels::beta_to_gamma(b, g)?))
            .collect::<heatbo::Result<_>>()?;
        let pts = random_points(&space, 12, &mut rng);
        let heat = normalize(&gram(&space, &KernelSpec::heat(&space, betas.clone(), 1.7)?, &pts)?);
        let casmo = normalize(&gram(&space, &KernelSpec::casmopolitan(&space, ls, 0.4)?, &pts)?);
        let combo = normalize(&combo_gram_numeric(&space, &betas, &pts)?);
        worst = worst.max(max_abs_diff(&heat, &casmo)).max(max_abs_diff(&heat, &combo));
    }
    Ok(worst)
}

/// `min eigenvalue / max eigenvalue` over the worst of `grams` random Grams
/// per Hamming profile family.
pub fn psd_sweep(grams: usize, seed: u64) -> heatbo::Result<Vec<(&'static str, f64)>> {
    let mut rng = seeded(seed);
    let mut out = Vec::new();
    for family in [Family::HammingRbf, Family::HammingMatern52, Family::HammingRq] {
        let mut worst = f64::INFINITY;
        for _ in 0..grams {
            let space = random_space(&mut rng, 8, 6);
            let ls = rng.random_range(0.1..5.0);
            let alpha = matches!(family, Family::HammingRq).then(|| rng.random_range(0.1..5.0));
            let spec = KernelSpec::hamming(&space, family.clone(), ls, alpha, 1.0)?;
            let m = rng.random_range(2..=64);
            let pts = random_points(&space, m, &mut rng);
            let eig = sym_eigenvalues(&gram(&space, &spec, &pts)?);
            let (lo, hi) = (eig[0], eig[eig.len() - 1]);
            worst = worst.min(lo / hi);
        }
        out.push((family.name(), worst));
    }
    Ok(out)
}

/// Worst relative residual `‖K_Φ − K‖ / ‖K‖` over `kernels` random
/// Hamming kernels on equal-sized spaces; `None` when a conversion failed.
pub fn equal_sized_conversion_residual(kernels: usize, seed: u64) -> heatbo::Result<Option<f64>> {
    let mut rng = seeded(seed);
    let mut worst = 0.0f64;
    for _ in 0..kernels {
        let n = rng.random_range(1..=5);
        let g = rng.random_range(2..=5);
        let space = SearchSpace::uniform(n, g)?;
        let ls = rng.random_range(0.3..3.0);
        let spec = KernelSpec::hamming(&space, Family::HammingRbf, ls, None, 1.0)?;
        let values: Vec<f64> = (0..=n).map(|h| spec.profile(h).expect("hamming profile")).collect();
        let phi = match hamming_to_phi(&space, &values)? {
            PhiConversion::Exact(phi) => phi,
            PhiConversion::NotRepresentable { .. } => return Ok(None),
        };
        let pts = random_points(&space, 16, &mut rng);
        let k = gram(&space, &spec, &pts)?;
        let kp = phi_gram(&space, &phi, &pts)?;
        worst = worst.max((kp - &k).norm() / k.norm());
    }
    Ok(Some(worst))
}

/// Worst absolute Gram change under sampled automorphisms and relocations.
pub fn isotropy_error(transforms: usize, seed: u64) -> heatbo::Result<f64> {
    let mut rng = seeded(seed);
    let mut worst = 0.0f64;
    for s in 0..3 {
        let space = if s == 0 {
            SearchSpace::uniform(4, 3)?
        } else {
            random_space(&mut rng, 5, 5)
        };
        let n = space.dims();
        let mut specs = vec![
            KernelSpec::heat(&space, vec![0.4], 1.0)?,
            KernelSpec::hamming(&space, Family::HammingRbf, 1.3, None, 1.0)?,
            KernelSpec::hamming(&space, Family::HammingMatern52, 1.3, None, 1.0)?,
            KernelSpec::hamming(&space, Family::HammingRq, 1.3, Some(0.7), 1.0)?,
        ];
        if n > 1 {
            let betas = (0..n).map(|i| 0.2 + 0.3 * i as f64).collect();
            specs.push(KernelSpec::heat(&space, betas, 1.0)?);
        }
        let pts = random_points(&space, 10, &mut rng);
        for spec in &specs {
            let k = gram(&space, spec, &pts)?;
            for t in 0..transforms as u64 {
                let reloc = sample_relocation(&space, rng.random::<u64>() ^ t);
                let moved: Vec<Point> = pts.iter().map(|p| reloc.apply(p)).collect();
                worst = worst.max(max_abs_diff(&k, &gram(&space, spec, &moved)?));
                if !spec.ard() && space.equal_sized() {
                    let auto = sample_automorphism(&space, rng.random::<u64>() ^ t);
                    let moved: Vec<Point> = pts.iter().map(|p| auto.apply(p)).collect();
                    worst = worst.max(max_abs_diff(&k, &gram(&space, spec, &moved)?));
                }
            }
        }
    }
    Ok(worst)
}

fn check_heat() -> CheckResult {
    const NAME: &str = "heat equivalence";
    match heat_equivalence_error(20, 11) {
        Ok(e) => result(
            NAME,
            format!("heat = casmopolitan = numeric COMBO on 20 spaces, max diff {e:.1e}"),
            e <= 1e-8,
        ),
        Err(e) => result(NAME, e.to_string(), false),
    }
}

fn check_psd() -> CheckResult {
    const NAME: &str = "psd sweep";
    match psd_sweep(50, 12) {
        Ok(rows) => {
            let ok = rows.iter().all(|(_, r)| *r >= -1e-8);
            let detail = rows
                .iter()
                .map(|(f, r)| format!("{f} {r:.1e}"))
                .collect::<Vec<_>>()
                .join(", ");
            result(NAME, format!("min/max eigenvalue over 50 Grams: {detail}"), ok)
        }
        Err(e) => result(NAME, e.to_string(), false),
    }
}

fn check_counterexample() -> CheckResult {
    let classes = counterexample_eigenvalues();
    let values: Vec<String> = classes.iter().map(|c| format!("{}", c.value.round())).collect();
    let expected = [(77.0, 1), (15.0, 2), (9.0, 3), (5.0, 1), (3.0, 6), (1.0, 3)];
    let ok = classes.len() == expected.len()
        && classes
            .iter()
            .zip(expected)
            .all(|(c, (v, m))| (c.value - v).abs() < 1e-6 && c.multiplicity == m);
    result("counterexample", format!("distinct eigenvalues: {}", values.join(" ")), ok)
}

fn check_conversion() -> CheckResult {
    const NAME: &str = "phi conversion";
    let fails = matches!(
        hamming_to_phi(&counterexample_space(), &[10.0, 6.0, 4.0, 3.0]),
        Ok(PhiConversion::NotRepresentable { .. })
    );
    match equal_sized_conversion_residual(20, 13) {
        Ok(Some(r)) => result(
            NAME,
            format!(
                "counterexample {}, 20 equal-sized kernels residual {r:.1e}",
                if fails { "rejected" } else { "accepted" }
            ),
            fails && r < 1e-8,
        ),
        Ok(None) => result(NAME, "an equal-sized conversion failed".into(), false),
        Err(e) => result(NAME, e.to_string(), false),
    }
}

fn check_bodi() -> CheckResult {
    let r = bodi_report();
    result(
        "bodi",
        format!(
            "embedding distances {} and {} at sqrt(h) {} and {}",
            r.embedding_a, r.embedding_b, r.sqrt_h_a, r.sqrt_h_b
        ),
        r.reproduced(),
    )
}

fn check_padded() -> CheckResult {
    let x = [0, 0, 0, 1, 1, 2, 3, 3, 4, 4];
    let y = [4, 4, 0, 1, 1, 2, 3, 3, 4, 4];
    let padded = heatbo::kernels::padded_distance(&x, &y, 5);
    let (mut sx, mut sy) = (x, y);
    sx.sort_unstable();
    sy.sort_unstable();
    let sorted = sx.iter().zip(&sy).filter(|(a, b)| a != b).count();
    result(
        "padded sort",
        format!("padded distance {padded} vs sorted {sorted}"),
        padded == 4 && sorted == 7,
    )
}

fn check_isotropy() -> CheckResult {
    const NAME: &str = "isotropy";
    match isotropy_error(20, 14) {
        Ok(e) => result(
            NAME,
            format!("Gram change under automorphisms and relocations {e:.1e}"),
            e <= 1e-12,
        ),
        Err(e) => result(NAME, e.to_string(), false),
    }
}

/// Runs every check in order.
pub fn selftest() -> Vec<CheckResult> {
    vec![
        check_heat(),
        check_psd(),
        check_counterexample(),
        check_conversion(),
        check_bodi(),
        check_padded(),
        check_isotropy(),
    ]
}
