//! Thin wrappers over `faer` for the dense complex kernels used across the crate.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = Mat<Complex64>;

/// Solves `a x = b` for a single right-hand side by partial-pivot LU and
/// returns `x` together with the relative residual `|a x - b| / |b|`.
pub fn solve(a: &CMat, b: &[Complex64]) -> (Vec<Complex64>, f64) {
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = a.partial_piv_lu().solve(&rhs);
    let r = a * &x - &rhs;
    let scale = rhs.norm_l2().max(f64::MIN_POSITIVE);
    let residual = r.norm_l2() / scale;
    ((0..b.len()).map(|i| x[(i, 0)]).collect(), residual)
}

/// General complex eigendecomposition: eigenvalues and right eigenvectors
/// (columns).
pub fn eig(a: &CMat) -> Result<(Vec<Complex64>, CMat)> {
    let evd = a.eigen().map_err(|e| Error::EigenSolver(format!("{e:?}")))?;
    let s = evd.S();
    let values = s.column_vector().iter().copied().collect();
    Ok((values, evd.U().to_owned()))
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending.
pub fn hermitian_eig(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::EigenSolver(format!("{e:?}")))?;
    let values = evd.S().column_vector().iter().map(|z| z.re).collect();
    Ok((values, evd.U().to_owned()))
}

pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    a.singular_values().map_err(|e| Error::EigenSolver(format!("{e:?}")))
}

/// Ratio of extreme singular values; infinite for a numerically singular matrix.
pub fn condition_number(a: &CMat) -> Result<f64> {
    let sv = singular_values(a)?;
    let max = sv.first().copied().unwrap_or(0.0);
    let min = sv.last().copied().unwrap_or(0.0);
    Ok(if min > 0.0 { max / min } else { f64::INFINITY })
}

pub fn matvec(a: &CMat, x: &[Complex64]) -> Vec<Complex64> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum())
        .collect()
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
