//! Compact surfaces: the Riemann sphere and complex tori.
//!
//! Green's functions with two logarithmic poles, the Schiffer kernel
//! coefficient, the compact Bergman kernel and Jacobi's `θ₁`.
//!
//! Conventions used across the crate:
//! - `g(w; z, q)` has a `−log` singularity at `w = z` and `+log` at `w = q`.
//! - Area integrals of a `dw ∧ dw̄` product use `dw ∧ dw̄ = −2i dA`.
//! - The Schiffer coefficient is `ℓ = SIGMA_T · (−∂_z∂_w g / πi)`.

use num_complex::Complex64 as C;
use std::f64::consts::PI;
use thiserror::Error;

/// Global sign of the Schiffer kernel coefficient.
pub const SIGMA_T: f64 = 1.0;

/// Distance below which two points are treated as colliding.
pub const SINGULAR_TOL: f64 = 1e-12;

const THETA_REL_TOL: f64 = 1e-16;
const THETA_MAX_TERMS: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("theta series does not converge: Im(tau) = {0} must be positive")]
    NonConvergent(f64),
    #[error("derivative order {0} outside 0..=3")]
    InvalidOrder(usize),
    #[error("singular evaluation: {0}")]
    SingularEvaluation(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Sphere,
    Torus,
}

/// The ambient compact surface. `tau` is only meaningful for tori.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceModel {
    pub kind: SurfaceKind,
    pub tau: C,
}

impl SurfaceModel {
    pub fn sphere() -> Self {
        SurfaceModel { kind: SurfaceKind::Sphere, tau: C::new(0.0, 0.0) }
    }

    pub fn torus(tau: C) -> Result<Self, SurfaceError> {
        if tau.im <= 0.0 {
            return Err(SurfaceError::NonConvergent(tau.im));
        }
        Ok(SurfaceModel { kind: SurfaceKind::Torus, tau })
    }

    pub fn genus(&self) -> usize {
        match self.kind {
            SurfaceKind::Sphere => 0,
            SurfaceKind::Torus => 1,
        }
    }

    pub fn is_torus(&self) -> bool {
        self.kind == SurfaceKind::Torus
    }

    /// Representative of `u` modulo the lattice, centred on the origin.
    /// Returns `(u0, m, n)` with `u = u0 + m + nτ`.
    pub fn reduce(&self, u: C) -> (C, i64, i64) {
        match self.kind {
            SurfaceKind::Sphere => (u, 0, 0),
            SurfaceKind::Torus => lattice_reduce(u, self.tau),
        }
    }
}

pub fn lattice_reduce(u: C, tau: C) -> (C, i64, i64) {
    let n = (u.im / tau.im).round();
    let u1 = u - tau * n;
    let m = u1.re.round();
    (u1 - m, m as i64, n as i64)
}

fn nome_power(tau: C, n: usize) -> C {
    let e = (n as f64 + 0.5) * (n as f64 + 0.5);
    (C::i() * PI * tau * e).exp()
}

fn sin_shift(x: C, k: usize) -> C {
    match k % 4 {
        0 => x.sin(),
        1 => x.cos(),
        2 => -x.sin(),
        _ => -x.cos(),
    }
}

/// `θ₁^{(k)}(u|τ)` for `k = 0..=kmax`, straight from the series.
pub fn theta1_derivs(u: C, tau: C, kmax: usize) -> Result<Vec<C>, SurfaceError> {
    if tau.im <= 0.0 {
        return Err(SurfaceError::NonConvergent(tau.im));
    }
    let mut out = vec![C::new(0.0, 0.0); kmax + 1];
    let mut running_max = vec![0.0f64; kmax + 1];
    let mut quiet = 0;
    for n in 0..THETA_MAX_TERMS {
        let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
        let freq = (2 * n + 1) as f64 * PI;
        let qn = nome_power(tau, n) * sign;
        let x = u * freq;
        let mut fk = 1.0;
        let mut settled = true;
        for k in 0..=kmax {
            let term = qn * fk * sin_shift(x, k);
            let mag = term.norm();
            running_max[k] = running_max[k].max(out[k].norm()).max(mag);
            out[k] += term;
            if mag >= THETA_REL_TOL * running_max[k] || n == 0 {
                settled = false;
            }
            fk *= freq;
        }
        quiet = if settled { quiet + 1 } else { 0 };
        if quiet >= 2 {
            return Ok(out);
        }
    }
    Ok(out)
}

/// Jacobi `θ₁(u|τ)` or one of its first three `u`-derivatives.
pub fn theta1(u: C, tau: C, deriv_order: usize) -> Result<C, SurfaceError> {
    if deriv_order > 3 {
        return Err(SurfaceError::InvalidOrder(deriv_order));
    }
    Ok(theta1_derivs(u, tau, deriv_order)?[deriv_order])
}

/// `log|θ₁(u|τ)|`, evaluated through the lattice-reduced argument.
pub fn log_abs_theta1(u: C, tau: C) -> Result<f64, SurfaceError> {
    let (u0, _m, n) = lattice_reduce(u, tau);
    let th = theta1(u0, tau, 0)?;
    let n = n as f64;
    Ok(th.norm().ln() + PI * n * n * tau.im + 2.0 * PI * n * u0.im)
}

/// Derivatives `(log θ₁)^{(k)}(u)` for `k = 1..=kmax`, returned with index `k-1`.
pub fn log_theta1_derivs(u: C, tau: C, kmax: usize) -> Result<Vec<C>, SurfaceError> {
    let (u0, _m, n) = lattice_reduce(u, tau);
    let th = theta1_derivs(u0, tau, kmax)?;
    if th[0].norm() < SINGULAR_TOL {
        return Err(SurfaceError::SingularEvaluation("theta1 vanishes"));
    }
    // Leibniz recurrence for L = log θ: θ^{(k+1)} = Σ_j C(k,j) θ^{(k-j)} L^{(j+1)}.
    let mut l = vec![C::new(0.0, 0.0); kmax];
    for k in 0..kmax {
        let mut acc = th[k + 1];
        let mut binom = 1.0;
        for j in 0..k {
            acc -= th[k - j] * l[j] * binom;
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        l[k] = acc / th[0];
    }
    if kmax >= 1 {
        l[0] -= C::new(0.0, 2.0 * PI * n as f64);
    }
    Ok(l)
}

/// Value of a Green's function sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenValue {
    pub value: f64,
    pub is_singular: bool,
}

impl GreenValue {
    pub fn finite(&self) -> Result<f64, SurfaceError> {
        if self.is_singular {
            Err(SurfaceError::SingularEvaluation("w collides with a pole"))
        } else {
            Ok(self.value)
        }
    }
}

fn collides(s: &SurfaceModel, a: C, b: C) -> bool {
    s.reduce(a - b).0.norm() < SINGULAR_TOL
}

/// `g(w; z, q)`, harmonic in `w` off `{z, q}`.
pub fn green_function(s: &SurfaceModel, w: C, z: C, q: C) -> Result<GreenValue, SurfaceError> {
    if collides(s, z, q) {
        return Err(SurfaceError::SingularEvaluation("z coincides with q"));
    }
    if collides(s, w, z) {
        return Ok(GreenValue { value: f64::INFINITY, is_singular: true });
    }
    if collides(s, w, q) {
        return Ok(GreenValue { value: f64::NEG_INFINITY, is_singular: true });
    }
    let value = match s.kind {
        SurfaceKind::Sphere => ((w - q) / (w - z)).norm().ln(),
        SurfaceKind::Torus => {
            let t = s.tau;
            log_abs_theta1(w - q, t)? - log_abs_theta1(w - z, t)?
                - 2.0 * PI / t.im * w.im * (z - q).im
                + PI / t.im * (z.im * z.im - q.im * q.im)
        }
    };
    Ok(GreenValue { value, is_singular: false })
}

/// Coefficient of `dw` in `∂_w g(w; z, q)`.
pub fn dw_green(s: &SurfaceModel, w: C, z: C, q: C) -> Result<C, SurfaceError> {
    match s.kind {
        SurfaceKind::Sphere => Ok(0.5 / (w - q) - 0.5 / (w - z)),
        SurfaceKind::Torus => {
            let t = s.tau;
            let lq = log_theta1_derivs(w - q, t, 1)?[0];
            let lz = log_theta1_derivs(w - z, t, 1)?[0];
            Ok(0.5 * (lq - lz) + C::new(0.0, PI / t.im * (z - q).im))
        }
    }
}

/// Coefficient of `dz dw` in `∂_z ∂_w g(w; z, q)`.
pub fn dz_dw_green(s: &SurfaceModel, w: C, z: C) -> Result<C, SurfaceError> {
    match s.kind {
        SurfaceKind::Sphere => Ok(-0.5 / ((w - z) * (w - z))),
        SurfaceKind::Torus => {
            let l2 = log_theta1_derivs(w - z, s.tau, 2)?[1];
            Ok(0.5 * l2 + PI / (2.0 * s.tau.im))
        }
    }
}

/// Coefficient of `dz̄ dw` in `∂̄_z ∂_w g(w; z, q)`; independent of both points.
pub fn dzbar_dw_green(s: &SurfaceModel) -> C {
    match s.kind {
        SurfaceKind::Sphere => C::new(0.0, 0.0),
        SurfaceKind::Torus => C::new(-PI / (2.0 * s.tau.im), 0.0),
    }
}

/// Schiffer kernel coefficient `ℓ(z, w)` with `L_R = ℓ dz dw`.
pub fn schiffer_kernel(s: &SurfaceModel, z: C, w: C, _q: C) -> Result<C, SurfaceError> {
    if collides(s, z, w) {
        return Err(SurfaceError::SingularEvaluation("z = w"));
    }
    let d = dz_dw_green(s, w, z)?;
    Ok(-d / C::new(0.0, PI) * SIGMA_T)
}

/// Compact Bergman kernel coefficient `κ(z, w)` with `K_R = κ dz dw̄`.
pub fn bergman_kernel_compact(s: &SurfaceModel, _z: C, _w: C) -> C {
    match s.kind {
        SurfaceKind::Sphere => C::new(0.0, 0.0),
        SurfaceKind::Torus => C::new(0.0, -1.0 / (2.0 * s.tau.im)),
    }
}

/// A holomorphic one-form `coefficient · dz` on the compact surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompactForm {
    pub coefficient: C,
    pub norm_sq: f64,
}

/// Basis of `A(R)`: empty for the sphere, `[dz]` for a torus.
pub fn compact_holomorphic_basis(s: &SurfaceModel) -> Vec<CompactForm> {
    match s.kind {
        SurfaceKind::Sphere => vec![],
        SurfaceKind::Torus => vec![CompactForm { coefficient: C::new(1.0, 0.0), norm_sq: s.tau.im }],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn theta_is_odd() {
        let i = c(0.0, 1.0);
        assert!(theta1(c(0.0, 0.0), i, 0).unwrap().norm() < 1e-15);
        let a = theta1(c(0.3, 0.0), i, 0).unwrap();
        let b = theta1(c(-0.3, 0.0), i, 0).unwrap();
        assert!((a + b).norm() < 1e-15);
    }

    #[test]
    fn theta_quasi_periodicity() {
        let i = c(0.0, 1.0);
        let u = c(0.2, 0.1);
        let a = theta1(u + 1.0, i, 0).unwrap();
        let b = theta1(u, i, 0).unwrap();
        assert!((a + b).norm() < 1e-14);
        // θ₁(u+τ) = −exp(−iπτ − 2πiu) θ₁(u)
        let lhs = theta1(u + i, i, 0).unwrap();
        let rhs = -(C::i() * (-PI) * i - C::i() * 2.0 * PI * u).exp() * b;
        assert!((lhs - rhs).norm() < 1e-13 * rhs.norm());
    }

    #[test]
    fn theta_rejects_lower_half_plane() {
        assert!(matches!(theta1(c(0.1, 0.0), c(0.0, -1.0), 0), Err(SurfaceError::NonConvergent(_))));
        assert!(matches!(theta1(c(0.1, 0.0), c(0.0, 1.0), 4), Err(SurfaceError::InvalidOrder(4))));
    }

    #[test]
    fn theta_derivatives_match_differences() {
        let tau = c(0.3, 1.1);
        let u = c(0.17, 0.21);
        let h = 1e-4;
        for k in 0..3 {
            let fd = (theta1(u + h, tau, k).unwrap() - theta1(u - h, tau, k).unwrap()) / (2.0 * h);
            let d = theta1(u, tau, k + 1).unwrap();
            assert!((fd - d).norm() < 1e-6 * d.norm().max(1.0), "order {k}");
        }
    }

    #[test]
    fn high_log_derivatives_match_lattice_sums() {
        // (log θ₁)^{(m)}(u) = (−1)^{m−1}(m−1)! Σ_ω (u−ω)^{−m} for m ≥ 3.
        let tau = c(0.0, 1.0);
        let u = c(0.1, 0.05);
        let l = log_theta1_derivs(u, tau, 14).unwrap();
        let mut fact = 1.0;
        for m in 2..=14usize {
            fact *= (m - 1) as f64;
            if m < 5 {
                continue;
            }
            let mut sum = C::new(0.0, 0.0);
            for a in -60i32..=60 {
                for b in -60i32..=60 {
                    sum += (u - tau * b as f64 - a as f64).powi(-(m as i32));
                }
            }
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            let expect = sum * sign * fact;
            assert!((l[m - 1] - expect).norm() < 1e-8 * expect.norm(), "m = {m}");
        }
    }

    #[test]
    fn log_derivative_shift_rules() {
        let tau = c(0.2, 0.9);
        let u = c(0.31, 0.22);
        let a = log_theta1_derivs(u + tau, tau, 3).unwrap();
        let b = log_theta1_derivs(u, tau, 3).unwrap();
        assert!((a[0] - b[0] + C::new(0.0, 2.0 * PI)).norm() < 1e-11);
        assert!((a[1] - b[1]).norm() < 1e-10);
        assert!((a[2] - b[2]).norm() < 1e-9);
    }

    #[test]
    fn sphere_green_examples() {
        let s = SurfaceModel::sphere();
        let g = green_function(&s, c(2.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)).unwrap();
        assert!(g.value.abs() < 1e-15);
        let z = c(0.4, -0.2);
        let q = c(2.0, 1.0);
        let w = z + c(1e-7, 1e-7);
        let g = green_function(&s, w, z, q).unwrap().value;
        assert!((g + (w - z).norm().ln() - (z - q).norm().ln()).abs() < 1e-6);
        assert!(green_function(&s, z, z, q).unwrap().is_singular);
        assert!(green_function(&s, z, z, q).unwrap().finite().is_err());
        assert!(green_function(&s, z, q, q).is_err());
    }

    #[test]
    fn torus_green_is_doubly_periodic() {
        let s = SurfaceModel::torus(c(0.0, 1.0)).unwrap();
        let (w, z, q) = (c(0.31, 0.27), c(0.1, 0.1), c(0.6, 0.4));
        let g0 = green_function(&s, w, z, q).unwrap().value;
        let g1 = green_function(&s, w + 1.0, z, q).unwrap().value;
        let g2 = green_function(&s, w + s.tau, z, q).unwrap().value;
        assert!((g1 - g0).abs() < 1e-10);
        assert!((g2 - g0).abs() < 1e-10);
    }

    #[test]
    fn schiffer_kernel_examples() {
        let s = SurfaceModel::sphere();
        let (z, w) = (c(2.0, 0.0), c(0.3, 0.0));
        let l = schiffer_kernel(&s, z, w, c(3.0, 0.0)).unwrap();
        assert!((l.norm() - 1.0 / (2.0 * PI * 2.89)).abs() < 1e-12);
        let l2 = schiffer_kernel(&s, z, w, c(5.0, 1.0)).unwrap();
        assert!((l - l2).norm() < 1e-15);
        let l3 = schiffer_kernel(&s, w, z, c(3.0, 0.0)).unwrap();
        assert!((l - l3).norm() < 1e-15);
        assert!(schiffer_kernel(&s, z, z, c(3.0, 0.0)).is_err());
    }

    /// Second mixed derivative of `g` by central differences, as a `dz dw` coefficient.
    fn fd_dz_dw(s: &SurfaceModel, w: C, z: C, q: C) -> C {
        let h = 1e-4;
        let g = |w: C, z: C| green_function(s, w, z, q).unwrap().value;
        // ∂_w = (∂_x − i∂_y)/2 on each variable.
        let dw = |z: C| {
            let gx = (g(w + h, z) - g(w - h, z)) / (2.0 * h);
            let gy = (g(w + C::new(0.0, h), z) - g(w - C::new(0.0, h), z)) / (2.0 * h);
            C::new(gx, -gy) * 0.5
        };
        let dx = (dw(z + h) - dw(z - h)) / (2.0 * h);
        let dy = (dw(z + C::new(0.0, h)) - dw(z - C::new(0.0, h))) / (2.0 * h);
        (dx - C::i() * dy) * 0.5
    }

    fn fd_dzbar_dw(s: &SurfaceModel, w: C, z: C, q: C) -> C {
        let h = 1e-4;
        let g = |w: C, z: C| green_function(s, w, z, q).unwrap().value;
        let dwbar = |z: C| {
            let gx = (g(w + h, z) - g(w - h, z)) / (2.0 * h);
            let gy = (g(w + C::new(0.0, h), z) - g(w - C::new(0.0, h), z)) / (2.0 * h);
            C::new(gx, gy) * 0.5
        };
        let dx = (dwbar(z + h) - dwbar(z - h)) / (2.0 * h);
        let dy = (dwbar(z + C::new(0.0, h)) - dwbar(z - C::new(0.0, h))) / (2.0 * h);
        (dx - C::i() * dy) * 0.5
    }

    #[test]
    fn kernels_match_finite_differences() {
        for s in [SurfaceModel::sphere(), SurfaceModel::torus(c(0.1, 1.2)).unwrap()] {
            let q = c(0.55, 0.9);
            for (z, w) in [(c(0.1, 0.2), c(0.45, 0.5)), (c(0.8, 0.3), c(0.2, 0.7)), (c(0.3, 0.1), c(0.35, 0.6))] {
                let l = schiffer_kernel(&s, z, w, q).unwrap();
                let fd = -fd_dz_dw(&s, w, z, q) / C::new(0.0, PI) * SIGMA_T;
                assert!((l - fd).norm() < 1e-6 * l.norm().max(1.0), "{:?}", s.kind);
                let k = bergman_kernel_compact(&s, z, w);
                let fdk = -fd_dzbar_dw(&s, w, z, q) / C::new(0.0, PI);
                assert!((k - fdk).norm() < 1e-6, "{:?}", s.kind);
            }
        }
    }

    #[test]
    fn compact_basis() {
        assert!(compact_holomorphic_basis(&SurfaceModel::sphere()).is_empty());
        let b = compact_holomorphic_basis(&SurfaceModel::torus(c(0.0, 1.0)).unwrap());
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].norm_sq, 1.0);
    }

    fn arb_point() -> impl Strategy<Value = C> {
        (0.0f64..1.0, 0.0f64..1.0).prop_map(|(x, y)| C::new(x, y))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn green_periodic_over_neighbouring_cells(w in arb_point(), z in arb_point(), q in arb_point(),
                                                  m in -1i64..=1, n in -1i64..=1) {
            let s = SurfaceModel::torus(C::new(0.15, 0.95)).unwrap();
            prop_assume!(s.reduce(w - z).0.norm() > 1e-3 && s.reduce(w - q).0.norm() > 1e-3
                         && s.reduce(z - q).0.norm() > 1e-3);
            let g0 = green_function(&s, w, z, q).unwrap().value;
            let g1 = green_function(&s, w + s.tau * n as f64 + m as f64, z, q).unwrap().value;
            prop_assert!((g1 - g0).abs() < 1e-10);
            let shift = s.tau * n as f64 + m as f64;
            let g2 = green_function(&s, w, z + shift, q).unwrap().value;
            let g3 = green_function(&s, w, z, q + shift).unwrap().value;
            prop_assert!((g2 - g0).abs() < 1e-10 && (g3 - g0).abs() < 1e-10);
        }

        #[test]
        fn green_is_harmonic(w in arb_point(), z in arb_point(), q in arb_point()) {
            let h = 1e-3;
            for s in [SurfaceModel::sphere(), SurfaceModel::torus(C::new(0.0, 1.0)).unwrap()] {
                let d = s.reduce(w - z).0.norm().min(s.reduce(w - q).0.norm());
                prop_assume!(d > 0.05 && s.reduce(z - q).0.norm() > 1e-3);
                let g = |w: C| green_function(&s, w, z, q).unwrap().value;
                let lap = (g(w + h) + g(w - h) + g(w + C::new(0.0, h)) + g(w - C::new(0.0, h)) - 4.0 * g(w)) / (h * h);
                prop_assert!(lap.abs() < 4.0 * h * h / d.powi(4) + 1e-6);
            }
        }

        #[test]
        fn singularities_have_the_right_sign(dir in 0usize..8) {
            let th = dir as f64 * PI / 4.0;
            let e = C::from_polar(1.0, th);
            for s in [SurfaceModel::sphere(), SurfaceModel::torus(C::new(0.0, 1.0)).unwrap()] {
                let (z, q) = (C::new(0.2, 0.3), C::new(0.7, 0.6));
                let a = green_function(&s, z + e * 1e-6, z, q).unwrap().value + 1e-6f64.ln();
                let b = green_function(&s, z + e * 1e-9, z, q).unwrap().value + 1e-9f64.ln();
                prop_assert!((a - b).abs() < 1e-5);
                let a = green_function(&s, q + e * 1e-6, z, q).unwrap().value - 1e-6f64.ln();
                let b = green_function(&s, q + e * 1e-9, z, q).unwrap().value - 1e-9f64.ln();
                prop_assert!((a - b).abs() < 1e-5);
            }
        }

        #[test]
        fn schiffer_kernel_ignores_q(z in arb_point(), w in arb_point()) {
            let s = SurfaceModel::torus(C::new(0.0, 1.0)).unwrap();
            prop_assume!(s.reduce(z - w).0.norm() > 1e-2);
            let a = schiffer_kernel(&s, z, w, C::new(0.5, 0.5)).unwrap();
            let b = schiffer_kernel(&s, z, w, C::new(0.1, 0.9)).unwrap();
            prop_assert!((a - b).norm() < 1e-12);
        }
    }
}
