//! Gram construction timing: closed-form heat against numeric COMBO.

use std::path::Path;
use std::time::Instant;

use heatbo::kernels::{gram, KernelSpec};
use heatbo::rng::seeded;
use heatbo::spectral::combo_gram_numeric;
use heatbo::SearchSpace;
use serde::Serialize;

use crate::checks::{max_abs_diff, normalize, random_points};
use crate::RunnerError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedRow {
    pub kernel: &'static str,
    pub dims: usize,
    pub categories: usize,
    pub points: usize,
    /// Fastest of the repeats.
    pub seconds: f64,
    /// Normalized-Gram discrepancy against the other path.
    pub max_diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedOptions {
    pub dims: usize,
    pub categories: Vec<usize>,
    pub points: usize,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for SpeedOptions {
    fn default() -> Self {
        Self {
            dims: 10,
            categories: vec![2, 4, 8, 16, 32],
            points: 200,
            repeats: 3,
            seed: 0,
        }
    }
}

fn best_of<R>(repeats: usize, mut f: impl FnMut() -> heatbo::Result<R>) -> heatbo::Result<(f64, R)> {
    let mut best = f64::INFINITY;
    let mut out = None;
    for _ in 0..repeats.max(1) {
        let t = Instant::now();
        let r = f()?;
        best = best.min(t.elapsed().as_secs_f64());
        out = Some(r);
    }
    Ok((best, out.expect("at least one repeat")))
}

/// Two rows (`heat-closed`, `combo-numeric`) per category count.
pub fn compare_speed(opts: &SpeedOptions) -> Result<Vec<SpeedRow>, RunnerError> {
    let rt = |e: heatbo::Error| RunnerError::Runtime(e.to_string());
    let mut rng = seeded(opts.seed);
    let mut rows = Vec::new();
    for &g in &opts.categories {
        let space = SearchSpace::uniform(opts.dims, g).map_err(rt)?;
        let betas = vec![0.3; opts.dims];
        let pts = random_points(&space, opts.points, &mut rng);
        let spec = KernelSpec::heat(&space, betas.clone(), 1.0).map_err(rt)?;
        let (t_heat, k_heat) = best_of(opts.repeats, || gram(&space, &spec, &pts)).map_err(rt)?;
        let (t_combo, k_combo) =
            best_of(opts.repeats, || combo_gram_numeric(&space, &betas, &pts)).map_err(rt)?;
        let diff = max_abs_diff(&normalize(&k_heat), &normalize(&k_combo));
        for (kernel, seconds) in [("heat-closed", t_heat), ("combo-numeric", t_combo)] {
            rows.push(SpeedRow {
                kernel,
                dims: opts.dims,
                categories: g,
                points: opts.points,
                seconds,
                max_diff: diff,
            });
        }
    }
    Ok(rows)
}

pub fn write_speed_csv(path: &Path, rows: &[SpeedRow]) -> Result<(), RunnerError> {
    let rt = |e: csv::Error| RunnerError::Runtime(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(rt)?;
    for r in rows {
        w.serialize(r).map_err(rt)?;
    }
    w.flush().map_err(|e| RunnerError::Runtime(e.to_string()))
}

/// Category counts `≥ 8` where the closed form was not strictly faster.
pub fn ordering_violations(rows: &[SpeedRow]) -> Vec<usize> {
    rows.chunks(2)
        .filter(|pair| pair[0].categories >= 8 && pair[0].seconds >= pair[1].seconds)
        .map(|pair| pair[0].categories)
        .collect()
}
