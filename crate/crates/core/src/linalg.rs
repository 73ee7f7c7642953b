//! Dense complex least squares with column equilibration.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;

/// Solution of `min ‖A x − b‖` with diagnostics.
#[derive(Debug, Clone)]
pub struct LstsqFit {
    pub x: Vec<C>,
    pub condition: f64,
    /// Largest absolute residual over the rows.
    pub max_residual: f64,
}

/// Least squares via SVD; returns `Err(condition)` when the equilibrated
/// matrix is worse conditioned than `cap`.
pub fn lstsq(rows: &[Vec<C>], rhs: &[C], cap: f64) -> Result<LstsqFit, f64> {
    let m = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    let mut a = DMatrix::<C>::from_fn(m, n, |i, j| rows[i][j]);
    let mut scale = vec![1.0; n];
    for j in 0..n {
        let s = a.column(j).norm();
        if s > 0.0 {
            scale[j] = 1.0 / s;
            a.column_mut(j).scale_mut(1.0 / s);
        }
    }
    let b = DVector::<C>::from_column_slice(rhs);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= cap) {
        return Err(condition);
    }
    let y = svd.solve(&b, 0.0).map_err(|_| f64::INFINITY)?;
    let r = &a * &y - &b;
    let max_residual = r.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let x = y.iter().zip(&scale).map(|(v, s)| v * *s).collect();
    Ok(LstsqFit { x, condition, max_residual })
}

/// Singular values of a dense complex matrix, sorted descending.
pub fn singular_values(rows: &[Vec<C>]) -> Vec<f64> {
    let m = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    let a = DMatrix::<C>::from_fn(m, n, |i, j| rows[i][j]);
    let mut s: Vec<f64> = a.svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}
