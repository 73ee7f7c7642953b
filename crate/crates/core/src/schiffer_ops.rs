//! Schiffer comparison operators `T`, Bergman-type operators `S`, restriction,
//! and finite matrix sections of these operators.
//!
//! `T(𝒪, ·)ᾱ(z) = −2i Σ_k ∬_{Ω_k} ℓ(z, w) ā_k(w) dA_w` with `ℓ` from
//! [`schiffer_kernel`]. In disk coordinates `ā dA_w = b(ζ̄) f′(ζ) dA_ζ`.

use crate::boundary_transmission::{transmit_exact_forms, TransmissionError};
use crate::domains::{
    chart_circle, chart_point, deformation_radius, ConformalDomain, DomainError, Location, OpenRegion, QuadratureRule, SurfaceConfig,
    Workspace,
};
use crate::linalg::{lstsq, singular_values};
use crate::spaces::{
    eval_sigma_element, project_v, sigma_holomorphic_basis, v_defect, BasisKind, BasisSpec, Chirality, FormExpansion,
    Region, SigmaElement, SigmaExtra, SigmaForm, SigmaFunction, SpaceError,
};
use crate::surface_models::{log_theta1_derivs, schiffer_kernel, theta1_derivs, SurfaceError};
use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpsError {
    #[error("point {0} is not in the target region")]
    TargetMembership(C),
    #[error("point is {distance:.3e} from a boundary curve, inside the quadrature exclusion zone")]
    QuadratureOverflow { distance: f64 },
    #[error("closure of the inner region is not contained in the outer region")]
    NestingViolation,
    #[error("Gram matrix is degenerate")]
    DegenerateGram,
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Transmission(#[from] TransmissionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Sigma,
    Omega(usize),
}

fn check_abar(cfg: &SurfaceConfig, abar: &[FormExpansion]) -> Result<(), OpsError> {
    if abar.len() != cfg.n() {
        return Err(SpaceError::DomainMismatch.into());
    }
    for (k, a) in abar.iter().enumerate() {
        if a.region != Region::Omega(k) || a.chirality != Chirality::AntiHolo || a.basis.powers.iter().any(|&p| p < 0) {
            return Err(SpaceError::DomainMismatch.into());
        }
    }
    Ok(())
}

/// `∬ (−2i) ℓ(z, f_k(ζ)) ζ̄^p f_k′(ζ) dA_ζ` for `p < nmax`.
pub fn t_area_row(ws: &Workspace, k: usize, z: C, nmax: usize) -> Result<Vec<C>, OpsError> {
    let rule = &ws.area[k];
    let dom = ws.domain(k);
    let s = ws.surface();
    let q = ws.cfg.q;
    let mut row = vec![C::new(0.0, 0.0); nmax];
    for ((&zeta, &wt), &w) in rule.ref_nodes.iter().zip(&rule.ref_weights).zip(&rule.nodes) {
        let kern = schiffer_kernel(s, z, w, q)? * C::new(0.0, -2.0) * dom.deriv(zeta) * wt;
        let zb = zeta.conj();
        let mut pw = C::new(1.0, 0.0);
        for r in row.iter_mut() {
            *r += kern * pw;
            pw *= zb;
        }
    }
    Ok(row)
}

fn dot(row: &[C], a: &FormExpansion) -> C {
    a.basis.powers.iter().zip(&a.coeffs).map(|(&p, c)| row[p as usize] * c).sum()
}

fn max_power(a: &FormExpansion) -> usize {
    a.basis.powers.iter().map(|&p| p as usize + 1).max().unwrap_or(0)
}

/// `R(u) = (log θ₁)″(u) + 1/u²`, the regular part of the torus kernel.
fn theta_regular(u: C, tau: C) -> Result<C, SurfaceError> {
    if u.norm() < 1e-4 {
        let t = theta1_derivs(C::new(0.0, 0.0), tau, 3)?;
        return Ok(t[3] / (3.0 * t[1]));
    }
    Ok(log_theta1_derivs(u, tau, 2)?[1] + 1.0 / (u * u))
}

/// Principal-value self-term `T(Ω_j, Ω_j)ᾱ_j` at `z ∈ Ω_j`.
///
/// The planar part is `−(1/2πi)∮_{Γ_j} H̃(w)/(w − z)² dw` with `H̃` the continuation of
/// the anti-holomorphic primitive of `ᾱ_j`; on a torus the regular part of the
/// kernel is added by area quadrature.
pub fn self_term(ws: &Workspace, j: usize, abar: &FormExpansion, z: C) -> Result<C, OpsError> {
    let dom = ws.domain(j);
    let zc = chart_point(&ws.cfg, j, z);
    let zeta_z = dom.inverse(zc)?;
    let m = ws.disc.m;
    let r = if zeta_z.norm() > (-0.4f64).exp() { deformation_radius(dom, &[0.25f64.exp(), 0.12f64.exp()], &[zc], &[], m) } else { 1.0 };
    let mut acc = C::new(0.0, 0.0);
    for i in 0..m {
        let zeta = C::from_polar(r, 2.0 * PI * i as f64 / m as f64);
        let w = dom.eval(zeta);
        let dw = C::i() * zeta * dom.deriv(zeta);
        let h: C = abar
            .basis
            .powers
            .iter()
            .zip(&abar.coeffs)
            .map(|(&p, b)| b * zeta.powi(-(p + 1)) / (p as f64 + 1.0))
            .sum();
        acc += h / ((w - zc) * (w - zc)) * dw;
    }
    let mut v = -acc * (2.0 * PI / m as f64) / C::new(0.0, 2.0 * PI);
    if ws.surface().is_torus() {
        let tau = ws.surface().tau;
        let cl = C::new(0.0, 1.0 / (2.0 * tau.im));
        let rule = &ws.area[j];
        for ((&zeta, &wt), &w) in rule.ref_nodes.iter().zip(&rule.ref_weights).zip(&rule.nodes) {
            let kern = -theta_regular(w - zc, tau)? / C::new(0.0, 2.0 * PI) + cl;
            v += C::new(0.0, -2.0) * kern * abar.eval_chart(zeta) * dom.deriv(zeta) * wt;
        }
    }
    Ok(v)
}

/// Pointwise `T(𝒪, Σ)ᾱ(z)` or `T(𝒪, Ω_j)ᾱ(z)` (coefficient of `dz`).
pub fn apply_t(ws: &Workspace, abar: &[FormExpansion], target: Target, z: C) -> Result<C, OpsError> {
    check_abar(&ws.cfg, abar)?;
    match (target, ws.locate(z)) {
        (Target::Sigma, Location::Sigma) => {}
        (Target::Omega(j), Location::Omega { k, .. }) if j == k => {}
        _ => return Err(OpsError::TargetMembership(z)),
    }
    let mut v = C::new(0.0, 0.0);
    for (k, a) in abar.iter().enumerate() {
        if target == Target::Omega(k) {
            v += self_term(ws, k, a, z)?;
            continue;
        }
        let d = ws.separation(k, z);
        if d < ws.exclusion() {
            return Err(OpsError::QuadratureOverflow { distance: d });
        }
        v += dot(&t_area_row(ws, k, z, max_power(a))?, a);
    }
    Ok(v)
}

fn poly_mul(a: &[C], b: &[C]) -> Vec<C> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![C::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `μ_m = ∬_{Ω} (w − c)^m ā(w) dA_w` for `m = 0..=mmax`, exact for polynomial maps.
pub fn area_moments(dom: &ConformalDomain, abar: &FormExpansion, mmax: usize) -> Vec<C> {
    let fp: Vec<C> = dom.coeffs.iter().enumerate().skip(1).map(|(j, c)| c * j as f64).collect();
    let mut fc = dom.coeffs.clone();
    if let Some(c0) = fc.first_mut() {
        *c0 = C::new(0.0, 0.0);
    }
    let mut pow = vec![C::new(1.0, 0.0)];
    let mut out = Vec::with_capacity(mmax + 1);
    for _ in 0..=mmax {
        let prod = poly_mul(&pow, &fp);
        let mu = abar
            .basis
            .powers
            .iter()
            .zip(&abar.coeffs)
            .map(|(&p, b)| b * prod.get(p as usize).copied().unwrap_or_default() * PI / (p as f64 + 1.0))
            .sum();
        out.push(mu);
        pow = poly_mul(&pow, &fc);
    }
    out
}

fn fact(n: usize) -> f64 {
    (1..=n).map(|j| j as f64).product()
}

/// Normalization `s_m` with `∂ Pole{k, m} = s_m · (log θ₁)^{(m+1)}(z − c_k)`.
fn pole_scale(rho: f64, m: usize) -> f64 {
    let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
    sign * rho.powi(m as i32) / fact(m - 1)
}

/// `T(𝒪, Σ)ᾱ` as a holomorphic form on `Σ`, in closed form.
///
/// Expanding the kernel about `c_k` gives
/// `T(Ω_k,Σ)ᾱ = (1/π) Σ_m (−1)^m μ_m/m! · L_{m+2}(z − c_k) + (μ_0/Im τ) dz`,
/// with `L_j = (log θ₁)^{(j)}` (planar `log` on the sphere). The sum is finite.
pub fn t_sigma_form(cfg: &SurfaceConfig, abar: &[FormExpansion]) -> Result<SigmaForm, OpsError> {
    check_abar(cfg, abar)?;
    let torus = cfg.surface.is_torus();
    let mut terms = Vec::new();
    let mut double = C::new(0.0, 0.0);
    let mut dz = C::new(0.0, 0.0);
    for (k, a) in abar.iter().enumerate() {
        let dom = &cfg.domains[k];
        let rho = dom.radius();
        let nmax = max_power(a);
        let mu = area_moments(dom, a, nmax);
        for (m, &mu_m) in mu.iter().enumerate() {
            let coef = mu_m * (if m % 2 == 0 { 1.0 } else { -1.0 }) / (fact(m) * PI);
            if m >= 1 {
                terms.push((SigmaElement::Pole { k, m: m + 1 }, coef / pole_scale(rho, m + 1)));
            } else if !torus {
                terms.push((SigmaElement::Pole { k, m: 1 }, coef / rho));
            } else {
                if k > 0 {
                    terms.push((SigmaElement::PoleDifference { k }, coef / rho));
                }
                double += coef;
            }
        }
        if torus {
            dz += mu[0] / cfg.surface.tau.im;
        }
    }
    let mut extras = Vec::new();
    if torus {
        extras.push((SigmaExtra::Dz, dz));
        extras.push((SigmaExtra::DoublePole, double));
    }
    Ok(SigmaForm { primitive: SigmaFunction::new(terms), extras })
}

/// `S(𝒪, R)α` as coefficients over the compact basis (empty on the sphere).
pub fn apply_s_compact(ws: &Workspace, alpha: &[FormExpansion]) -> Result<Vec<C>, OpsError> {
    if ws.cfg.surface.genus() == 0 {
        return Ok(vec![]);
    }
    let mut s = C::new(0.0, 0.0);
    for (k, a) in alpha.iter().enumerate() {
        if a.region != Region::Omega(k) || a.chirality != Chirality::Holo {
            return Err(SpaceError::DomainMismatch.into());
        }
        let dom = ws.domain(k);
        s += ws.area[k].integrate_ref(|z| a.eval_chart(z) * dom.deriv(z).conj());
    }
    Ok(vec![s / ws.cfg.surface.tau.im])
}

/// `S̄(𝒪, R)ᾱ` as coefficients of `dz̄` (empty on the sphere).
pub fn apply_s_bar_compact(ws: &Workspace, abar: &[FormExpansion]) -> Result<Vec<C>, OpsError> {
    check_abar(&ws.cfg, abar)?;
    if ws.cfg.surface.genus() == 0 {
        return Ok(vec![]);
    }
    let mut s = C::new(0.0, 0.0);
    for (k, a) in abar.iter().enumerate() {
        let dom = ws.domain(k);
        s += ws.area[k].integrate_ref(|z| a.eval_chart(z) * dom.deriv(z));
    }
    Ok(vec![s / ws.cfg.surface.tau.im])
}

/// A region with an explicitly known Bergman kernel.
#[derive(Debug, Clone, Copy)]
pub enum KernelRegion<'a> {
    Open(OpenRegion),
    Domain(&'a ConformalDomain),
}

/// Coefficients `κ_n` of `K(z, w) = Σ κ_n z^n w̄^n` for a disk or annulus.
fn laurent_kernel_coeff(region: OpenRegion, n: i32) -> f64 {
    match region {
        OpenRegion::Disk { r } => {
            if n < 0 {
                0.0
            } else {
                (n as f64 + 1.0) / (PI * r.powi(2 * n + 2))
            }
        }
        OpenRegion::Annulus { r1, r2 } => {
            if n == -1 {
                1.0 / (2.0 * PI * (r2 / r1).ln())
            } else {
                (n as f64 + 1.0) / (PI * (r2.powi(2 * n + 2) - r1.powi(2 * n + 2)))
            }
        }
    }
}

const KERNEL_SERIES_MAX: i32 = 4000;

/// Bergman kernel coefficient `K(z, w)` with `K = K(z, w) dz dw̄`.
pub fn bergman_kernel_open(region: KernelRegion<'_>, z: C, w: C) -> Result<C, OpsError> {
    match region {
        KernelRegion::Open(OpenRegion::Disk { r }) => {
            let t = 1.0 - z * w.conj() / (r * r);
            Ok(1.0 / (PI * r * r * t * t))
        }
        KernelRegion::Open(reg @ OpenRegion::Annulus { .. }) => {
            let x = z * w.conj();
            let mut s = C::new(laurent_kernel_coeff(reg, -1), 0.0) / x;
            let mut pos = C::new(1.0, 0.0);
            let mut neg = C::new(1.0, 0.0) / x;
            for n in 0..KERNEL_SERIES_MAX {
                let a = pos * laurent_kernel_coeff(reg, n);
                neg /= x;
                let b = neg * laurent_kernel_coeff(reg, -n - 2);
                s += a + b;
                pos *= x;
                if n > 8 && a.norm() + b.norm() < 1e-18 * s.norm() {
                    break;
                }
            }
            Ok(s)
        }
        KernelRegion::Domain(d) => {
            let a = d.inverse(z)?;
            let b = d.inverse(w)?;
            let t = 1.0 - a * b.conj();
            Ok(1.0 / (d.deriv(a) * d.deriv(b).conj() * PI * t * t))
        }
    }
}

fn check_nesting(sigma: &OpenRegion, sigma_p: &OpenRegion) -> Result<(), OpsError> {
    if sigma == sigma_p || sigma.closure_inside(sigma_p) {
        Ok(())
    } else {
        Err(OpsError::NestingViolation)
    }
}

fn open_form(alpha: &FormExpansion, region: OpenRegion) -> Result<(), OpsError> {
    if alpha.region != Region::Open(region) || alpha.chirality != Chirality::Holo {
        return Err(SpaceError::DomainMismatch.into());
    }
    Ok(())
}

/// `S(Σ, Σ′)α(z) = ∬_Σ K_{Σ′}(z, w) a(w) dA_w` by direct area quadrature over `Σ`.
pub fn apply_s_open(
    sigma: OpenRegion,
    sigma_p: OpenRegion,
    alpha: &FormExpansion,
    z: C,
    quad: &QuadratureRule,
) -> Result<C, OpsError> {
    check_nesting(&sigma, &sigma_p)?;
    open_form(alpha, sigma)?;
    let mut s = C::new(0.0, 0.0);
    for (&w, &wt) in quad.nodes.iter().zip(&quad.weights) {
        s += bergman_kernel_open(KernelRegion::Open(sigma_p), z, w)? * alpha.eval_chart(w) * wt;
    }
    Ok(s)
}

/// `S(Σ, Σ′)α` at many points, summing the same quadrature through the
/// separable form `K = Σ κ_n z^n w̄^n`.
pub fn apply_s_open_many(
    sigma: OpenRegion,
    sigma_p: OpenRegion,
    alpha: &FormExpansion,
    zs: &[C],
    quad: &QuadratureRule,
    nmax: i32,
) -> Result<Vec<C>, OpsError> {
    check_nesting(&sigma, &sigma_p)?;
    open_form(alpha, sigma)?;
    let lo = if matches!(sigma_p, OpenRegion::Disk { .. }) { 0 } else { -nmax };
    let vals: Vec<C> = quad.nodes.iter().map(|&w| alpha.eval_chart(w)).collect();
    let moments: Vec<(i32, C)> = (lo..=nmax)
        .map(|n| {
            let m: C = quad.nodes.iter().zip(&quad.weights).zip(&vals).map(|((w, wt), a)| w.conj().powi(n) * a * *wt).sum();
            (n, m * laurent_kernel_coeff(sigma_p, n))
        })
        .collect();
    Ok(zs.iter().map(|&z| moments.iter().map(|&(n, m)| z.powi(n) * m).sum()).collect())
}

fn form_ip(a: &FormExpansion, b: &FormExpansion, quad: &QuadratureRule) -> C {
    quad.nodes.iter().zip(&quad.weights).map(|(&z, &w)| a.eval_chart(z) * b.eval_chart(z).conj() * w).sum()
}

/// `R(Σ′, Σ)β`: re-expansion of `β|_Σ` over `powers` by Gram least squares.
/// Returns the expansion and the residual norm `‖β|_Σ − Rβ‖_Σ`.
pub fn restriction(
    sigma_p: OpenRegion,
    sigma: OpenRegion,
    beta: &FormExpansion,
    powers: &[i32],
    quad: &QuadratureRule,
) -> Result<(FormExpansion, f64), OpsError> {
    check_nesting(&sigma, &sigma_p)?;
    open_form(beta, sigma_p)?;
    let onto = |p: i32| FormExpansion::laurent(Region::Open(sigma), Chirality::Holo, vec![p], vec![C::new(1.0, 0.0)]);
    let basis: Vec<FormExpansion> = powers.iter().map(|&p| onto(p)).collect();
    let beta_s = FormExpansion { region: Region::Open(sigma), ..beta.clone() };
    let gram: Vec<Vec<C>> = basis.iter().map(|ei| basis.iter().map(|ej| form_ip(ej, ei, quad)).collect()).collect();
    let rhs: Vec<C> = basis.iter().map(|ei| form_ip(&beta_s, ei, quad)).collect();
    let fit = lstsq(&gram, &rhs, 1e14).map_err(|_| OpsError::DegenerateGram)?;
    let out = FormExpansion::laurent(Region::Open(sigma), Chirality::Holo, powers.to_vec(), fit.x);
    let diff = beta_s.add(&out.scale(C::new(-1.0, 0.0)))?;
    let res = form_ip(&diff, &diff, quad).re.max(0.0).sqrt();
    Ok((out, res))
}

/// `|⟨Sα, β⟩_{Σ′} − ⟨α, Rβ⟩_Σ| / (‖α‖ ‖β‖)`.
pub fn adjoint_check(
    sigma: OpenRegion,
    sigma_p: OpenRegion,
    alpha: &FormExpansion,
    beta: &FormExpansion,
    quad_s: &QuadratureRule,
    quad_sp: &QuadratureRule,
) -> Result<f64, OpsError> {
    let s_alpha = apply_s_open_many(sigma, sigma_p, alpha, &quad_sp.nodes, quad_s, 80)?;
    let lhs: C = s_alpha
        .iter()
        .zip(&quad_sp.nodes)
        .zip(&quad_sp.weights)
        .map(|((s, &z), &w)| s * beta.eval_chart(z).conj() * w)
        .sum();
    let (rb, _) = restriction(sigma_p, sigma, beta, &beta.basis.powers, quad_s)?;
    let rhs = form_ip(alpha, &rb, quad_s);
    let na = form_ip(alpha, alpha, quad_s).re.sqrt();
    let nb = form_ip(beta, beta, quad_sp).re.sqrt();
    Ok((lhs - rhs).norm() / (na * nb))
}

/// Exact `‖z^n dz‖²` on a disk or annulus.
pub fn laurent_norm_sq(region: OpenRegion, n: i32) -> f64 {
    1.0 / laurent_kernel_coeff(region, n)
}

/// Finite matrix section of an operator between orthonormalized truncated bases.
#[derive(Debug, Clone)]
pub struct OperatorSection {
    pub rows_basis: String,
    pub cols_basis: String,
    /// `matrix[i][j]`: row `i`, column `j`.
    pub matrix: Vec<Vec<C>>,
    pub singular_values: Vec<f64>,
}

impl OperatorSection {
    fn new(rows_basis: String, cols_basis: String, matrix: Vec<Vec<C>>) -> Self {
        let singular_values = singular_values(&matrix);
        OperatorSection { rows_basis, cols_basis, matrix, singular_values }
    }

    /// Largest entry of `matrix − I`.
    pub fn identity_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let e = if i == j { 1.0 } else { 0.0 };
                d = d.max((v - e).norm());
            }
        }
        d
    }

    /// Largest off-diagonal entry.
    pub fn off_diagonal(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if i != j {
                    d = d.max(v.norm());
                }
            }
        }
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SectionOp {
    /// `T(𝒪, Σ)` restricted to `V`, into exact forms on `Σ`.
    TSigma,
    /// `P̄_A(𝒪) 𝔒_e(Σ, 𝒪) T(𝒪, Σ)` on `V`.
    LeftInverse,
    /// `S(Σ, Σ′)` between orthonormal Laurent bases.
    SOpen { sigma: OpenRegion, sigma_prime: OpenRegion },
}

/// Orthonormal basis of `V` inside the span of `ζ̄^p dζ̄`, `p < n`, on each `Ω_k`.
pub fn v_basis(cfg: &SurfaceConfig, n: usize) -> Result<Vec<Vec<FormExpansion>>, OpsError> {
    let nd = cfg.n();
    let w: Vec<f64> = (0..n).map(|p| (PI / (p as f64 + 1.0)).sqrt()).collect();
    let to_forms = |x: &[C]| -> Vec<FormExpansion> {
        (0..nd)
            .map(|k| FormExpansion::disk(k, Chirality::AntiHolo, (0..n).map(|p| x[k * n + p] / w[p]).collect()))
            .collect()
    };
    let to_coords = |f: &[FormExpansion]| -> Vec<C> {
        let mut x = vec![C::new(0.0, 0.0); nd * n];
        for (k, a) in f.iter().enumerate() {
            for (&p, c) in a.basis.powers.iter().zip(&a.coeffs) {
                x[k * n + p as usize] = c * w[p as usize];
            }
        }
        x
    };
    let mut out: Vec<Vec<C>> = Vec::new();
    for idx in 0..nd * n {
        let mut e = vec![C::new(0.0, 0.0); nd * n];
        e[idx] = C::new(1.0, 0.0);
        let mut x = to_coords(&project_v(cfg, &to_forms(&e))?);
        for _ in 0..2 {
            for b in &out {
                let proj: C = b.iter().zip(&x).map(|(u, v)| u.conj() * v).sum();
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi -= proj * bi;
                }
            }
        }
        let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            out.push(x.iter().map(|v| v / norm).collect());
        }
    }
    Ok(out.iter().map(|x| to_forms(x)).collect())
}

/// Weighted coordinates `b_{k,p} √(π/(p+1))`, orthonormal for the pairing.
fn abar_coords(f: &[FormExpansion], n: usize) -> Vec<C> {
    let mut x = vec![C::new(0.0, 0.0); f.len() * n];
    for (k, a) in f.iter().enumerate() {
        for (&p, c) in a.basis.powers.iter().zip(&a.coeffs) {
            if (p as usize) < n {
                x[k * n + p as usize] += c * (PI / (p as f64 + 1.0)).sqrt();
            }
        }
    }
    x
}

/// `P̄_A(𝒪) 𝔒_e(Σ, 𝒪) T(𝒪, Σ)ᾱ`, truncated at `n` anti-holomorphic modes per domain.
pub fn left_inverse_image(cfg: &SurfaceConfig, abar: &[FormExpansion], n: usize, m: usize) -> Result<Vec<FormExpansion>, OpsError> {
    let beta = t_sigma_form(cfg, abar)?;
    (0..cfg.n())
        .map(|j| {
            let (_, anti) = transmit_exact_forms(cfg, &beta, j, n, m)?;
            Ok(anti)
        })
        .collect()
}

/// Relative residual `‖P̄ 𝔒_e T ᾱ − ᾱ‖ / ‖ᾱ‖`.
pub fn left_inverse_residual(cfg: &SurfaceConfig, abar: &[FormExpansion], n: usize, m: usize) -> Result<f64, OpsError> {
    let img = left_inverse_image(cfg, abar, n, m)?;
    let a = abar_coords(abar, n);
    let b = abar_coords(&img, n);
    let num = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    Ok(num / den)
}

/// Constructive preimage `ᾱ_k = ∂̄ 𝔒(Σ, Ω_k) H` of `dH`.
pub fn surjectivity_preimage(cfg: &SurfaceConfig, h: &SigmaFunction, n: usize, m: usize) -> Result<Vec<FormExpansion>, OpsError> {
    let beta = SigmaForm::exact(h.clone());
    (0..cfg.n())
        .map(|j| {
            let (_, anti) = transmit_exact_forms(cfg, &beta, j, n, m)?;
            Ok(anti)
        })
        .collect()
}

/// Orthonormal coordinates on exact holomorphic forms `dH`, `H` in the holomorphic `Σ` family.
struct ExactFormCoords {
    basis: Vec<SigmaElement>,
    /// Upper factor `L*` of `G = L L*`.
    lstar: DMatrix<C>,
}

impl ExactFormCoords {
    fn new(cfg: &SurfaceConfig, n: usize, m: usize) -> Result<Self, OpsError> {
        let basis = sigma_holomorphic_basis(cfg, n);
        let nb = basis.len();
        let dt = 2.0 * PI / m as f64;
        let mut g = DMatrix::<C>::zeros(nb, nb);
        // the boundary form of `sigma_dirichlet_inner` with basis values cached per sample
        for k in 0..cfg.n() {
            let curve = chart_circle(&cfg.domains[k], 0.0, m);
            let rows: Vec<Vec<(C, C)>> = curve
                .samples
                .par_iter()
                .zip(&curve.tangents)
                .map(|(&z, &t)| {
                    basis
                        .iter()
                        .map(|&e| {
                            let [v, d, db] = eval_sigma_element(cfg, e, z)?;
                            Ok((v, C::new(0.0, -1.0) * d * t + C::new(0.0, 1.0) * db * t.conj()))
                        })
                        .collect::<Result<Vec<_>, SpaceError>>()
                })
                .collect::<Result<_, _>>()?;
            for row in &rows {
                for i in 0..nb {
                    let vi = row[i].0.conj();
                    for j in 0..nb {
                        g[(i, j)] -= 0.5 * vi * row[j].1 * dt;
                    }
                }
            }
        }
        let g = (&g + g.adjoint()) * C::new(0.5, 0.0);
        let chol = g.cholesky().ok_or(OpsError::DegenerateGram)?;
        Ok(ExactFormCoords { basis, lstar: chol.l().adjoint() })
    }

    fn coords(&self, h: &SigmaFunction) -> Vec<C> {
        let x = nalgebra::DVector::<C>::from_iterator(
            self.basis.len(),
            self.basis.iter().map(|e| h.terms.iter().filter(|(f, _)| f == e).map(|(_, c)| *c).sum::<C>()),
        );
        (&self.lstar * x).iter().copied().collect()
    }
}

/// Matrix section of `op` at truncation `n`.
pub fn assemble_section(op: SectionOp, ws: &Workspace, n: usize) -> Result<OperatorSection, OpsError> {
    let cfg = &ws.cfg;
    let m = ws.disc.m;
    match op {
        SectionOp::TSigma => {
            let cols = v_basis(cfg, n)?;
            let coords = ExactFormCoords::new(cfg, n + 1, m)?;
            let images: Vec<Vec<C>> = cols
                .par_iter()
                .map(|a| {
                    let f = t_sigma_form(cfg, a)?;
                    Ok(coords.coords(&f.primitive))
                })
                .collect::<Result<_, OpsError>>()?;
            let rows = images.first().map_or(0, |v| v.len());
            let matrix = (0..rows).map(|i| images.iter().map(|col| col[i]).collect()).collect();
            Ok(OperatorSection::new("orthonormal exact forms dH on Σ".into(), "orthonormal basis of V".into(), matrix))
        }
        SectionOp::LeftInverse => {
            let cols = v_basis(cfg, n)?;
            let vc: Vec<Vec<C>> = cols.iter().map(|a| abar_coords(a, n)).collect();
            let images: Vec<Vec<C>> = cols
                .par_iter()
                .map(|a| {
                    let img = abar_coords(&left_inverse_image(cfg, a, n, m)?, n);
                    Ok(vc.iter().map(|v| v.iter().zip(&img).map(|(x, y)| x.conj() * y).sum()).collect())
                })
                .collect::<Result<_, OpsError>>()?;
            let matrix = (0..vc.len()).map(|i| images.iter().map(|col| col[i]).collect()).collect();
            Ok(OperatorSection::new("orthonormal basis of V".into(), "orthonormal basis of V".into(), matrix))
        }
        SectionOp::SOpen { sigma, sigma_prime } => {
            check_nesting(&sigma, &sigma_prime)?;
            let powers = |r: OpenRegion| -> Vec<i32> {
                match r {
                    OpenRegion::Disk { .. } => (0..n as i32).collect(),
                    OpenRegion::Annulus { .. } => (-(n as i32) / 2..(n as i32 + 1) / 2).collect(),
                }
            };
            let e = |r: OpenRegion, p: i32| {
                FormExpansion::laurent(Region::Open(r), Chirality::Holo, vec![p], vec![C::new(1.0 / laurent_norm_sq(r, p).sqrt(), 0.0)])
            };
            let qs = sigma.quadrature(32, 128)?;
            let qp = sigma_prime.quadrature(32, 128)?;
            let pc = powers(sigma);
            let pr = powers(sigma_prime);
            let images: Vec<Vec<C>> = pc
                .par_iter()
                .map(|&p| {
                    let vals = apply_s_open_many(sigma, sigma_prime, &e(sigma, p), &qp.nodes, &qs, 80)?;
                    Ok(pr
                        .iter()
                        .map(|&r| {
                            let er = e(sigma_prime, r);
                            vals.iter().zip(&qp.nodes).zip(&qp.weights).map(|((v, &z), &w)| v * er.eval_chart(z).conj() * w).sum()
                        })
                        .collect())
                })
                .collect::<Result<_, OpsError>>()?;
            let matrix = (0..pr.len()).map(|i| images.iter().map(|col| col[i]).collect()).collect();
            Ok(OperatorSection::new(format!("orthonormal Laurent basis on {sigma_prime:?}"), format!("orthonormal Laurent basis on {sigma:?}"), matrix))
        }
    }
}

/// `v_defect` of a preimage, re-exported for audits.
pub fn preimage_v_defect(cfg: &SurfaceConfig, abar: &[FormExpansion]) -> Result<f64, OpsError> {
    Ok(v_defect(cfg, abar)?.iter().map(|v| v.norm()).fold(0.0, f64::max))
}

/// Basis description used in reports.
pub fn describe_basis(spec: &BasisSpec) -> String {
    match spec.kind {
        BasisKind::DiskMonomial => format!("disk monomials, N = {}", spec.truncation()),
        BasisKind::Laurent => format!("Laurent monomials {:?}", spec.powers),
        BasisKind::TorusRational => "theta-function rational family".into(),
    }
}
