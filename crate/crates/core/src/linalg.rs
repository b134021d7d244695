//! Thin helpers over `nalgebra` shared by the spectral and GP modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues<T: Real>(m: &DMatrix<T>) -> Vec<T> {
    let mut ev: Vec<T> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    ev
}

/// Eigenpairs of a symmetric matrix, ascending eigenvalues, eigenvectors as
/// columns in the same order.
pub fn sym_eigen<T: Real>(m: &DMatrix<T>) -> (Vec<T>, DMatrix<T>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `min eig >= -tol * max eig` for a symmetric matrix.
pub fn is_psd<T: Real>(m: &DMatrix<T>, rel_tol: T) -> bool {
    let ev = sym_eigenvalues(m);
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    lo >= -rel_tol * hi.max(T::zero())
}

/// Groups sorted values whose relative gap is below `rel_tol`; returns
/// `(representative, multiplicity)` pairs in input order.
pub fn group_distinct(sorted: &[f64], rel_tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &v in sorted {
        match out.last_mut() {
            Some((rep, count)) if (v - *rep).abs() <= rel_tol * rep.abs().max(v.abs()).max(1.0) => {
                *count += 1
            }
            _ => out.push((v, 1)),
        }
    }
    out
}

/// Lower Cholesky factor of `a`, adding `jitter * I` to the diagonal.
pub fn cholesky_lower<T: Real>(a: &DMatrix<T>, jitter: T) -> Option<DMatrix<T>> {
    let mut m = a.clone();
    for i in 0..m.nrows() {
        m[(i, i)] += jitter;
    }
    m.cholesky().map(|c| c.l())
}

/// Solves `L z = b` for lower-triangular `L`.
pub fn solve_lower<T: Real>(l: &DMatrix<T>, b: &DVector<T>) -> DVector<T> {
    l.solve_lower_triangular(b)
        .expect("Cholesky factor has a positive diagonal")
}

/// Solves `Lᵀ z = b` for lower-triangular `L`.
pub fn solve_upper_t<T: Real>(l: &DMatrix<T>, b: &DVector<T>) -> DVector<T> {
    l.tr_solve_lower_triangular(b)
        .expect("Cholesky factor has a positive diagonal")
}

/// Dense square solve via LU; singular systems are a numeric failure.
pub fn solve_square<T: Real>(a: &DMatrix<T>, b: &DVector<T>) -> Result<DVector<T>> {
    let lu = a.clone().lu();
    // reject near-singular systems explicitly; LU::solve only catches exact zeros
    let u = lu.u();
    let scale = a.amax().max(T::min_positive());
    let tiny = T::of(1e-12) * scale;
    if (0..u.nrows()).any(|i| u[(i, i)].abs() <= tiny) {
        return Err(Error::NumericFailure("singular linear system".into()));
    }
    lu.solve(b)
        .ok_or_else(|| Error::NumericFailure("singular linear system".into()))
}

/// Least-squares solve of an overdetermined system via SVD; returns the
/// solution and the residual norm `‖A z − b‖`.
pub fn least_squares<T: Real>(a: &DMatrix<T>, b: &DVector<T>) -> Result<(DVector<T>, T)> {
    let svd = a.clone().svd(true, true);
    let z = svd
        .solve(b, T::of(1e-12))
        .map_err(|e| Error::NumericFailure(e.to_string()))?;
    let r = (a * &z - b).norm();
    Ok((z, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouping() {
        let g = group_distinct(&[1.0, 1.0 + 1e-9, 3.0, 5.0, 5.0], 1e-6);
        assert_eq!(g.len(), 3);
        assert_eq!(g[0].1, 2);
        assert_eq!(g[2], (5.0, 2));
    }

    #[test]
    fn singular_detection() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let b = DVector::from_vec(vec![1.0, 1.0]);
        assert!(matches!(solve_square(&a, &b), Err(Error::NumericFailure(_))));
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let z: DVector<f64> = solve_square(&a, &b).unwrap();
        assert!((z[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sorted_eigenpairs() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0f64, 1.0, 1.0, 2.0]);
        let (vals, vecs) = sym_eigen(&a);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        let v = vecs.column(1);
        assert!((v[0].abs() - v[1].abs()).abs() < 1e-12);
    }
}
