//! The Cauchy-type jump operator `J_q(Γ)`, its collar variant `J′`, and the
//! jump solver.
//!
//! `J_q(Γ)h(z) = −(1/πi) Σ_k lim_{s→0} ∮_{Γ_k^s} ∂_w g(w; z, q) h_k(w)`.
//! For expansion data the limit equals the integral over `Γ_k` of the trace,
//! whose holomorphic continuation [`HarmonicExpansion::continuation`] lets the
//! contour be moved off `Γ_k` when `z` is close to it.

use crate::boundary_transmission::{bounce, fit_sigma, transmit_to_omega, trace_to_disk, BoundaryTrace, TransmissionError};
use crate::domains::{chart_circle, chart_point, deformation_radius, DomainError, Location, SurfaceConfig, Workspace};
use crate::schiffer_ops::OpsError;
use crate::spaces::{
    project_v, sigma_holomorphic_basis, split_harmonic, w_defect, FormExpansion, HarmonicExpansion, Region, SigmaElement,
    SigmaFunction, SpaceError,
};
use crate::surface_models::{dw_green, dz_dw_green, dzbar_dw_green, SurfaceError};
use num_complex::Complex64 as C;
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

/// Relative distance to `Γ` below which `z` counts as lying on the curve.
pub const ON_CURVE_TOL: f64 = 1e-9;
/// Relative distance to `Γ` below which the contour is deformed away from `z`.
const DEFORM_BELOW: f64 = 0.35;
/// Largest accepted fit residual in [`jump_solve`].
pub const JUMP_FIT_TOL: f64 = 1e-6;
/// Largest accepted `w_defect` in [`jump_solve`].
pub const W_MEMBERSHIP_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JumpError {
    #[error("point {0} lies on a contour")]
    PointOnCurve(C),
    #[error("level-curve limit not settled (spread {0:.3e})")]
    LimitNotSettled(f64),
    #[error("data not in W (defect {0:.3e})")]
    NotInW(f64),
    #[error("fit residual {0:.3e} exceeds tolerance")]
    FitResidualExceeded(f64),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Transmission(#[from] TransmissionError),
    #[error(transparent)]
    Ops(#[from] OpsError),
}

/// Which `z`-derivative of the Cauchy-type integral to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    Value,
    Dz,
    Dzbar,
}

fn kernel(cfg: &SurfaceConfig, kind: Kernel, w: C, z: C) -> Result<C, SurfaceError> {
    match kind {
        Kernel::Value => dw_green(&cfg.surface, w, z, cfg.q),
        Kernel::Dz => dz_dw_green(&cfg.surface, w, z),
        Kernel::Dzbar => Ok(dzbar_dw_green(&cfg.surface)),
    }
}

fn region_index(h: &HarmonicExpansion) -> Option<usize> {
    match h.region {
        Region::Omega(k) | Region::Collar(k) => Some(k),
        _ => None,
    }
}

fn check_tuple(cfg: &SurfaceConfig, h: &[HarmonicExpansion]) -> Result<(), JumpError> {
    if h.len() != cfg.n() || h.iter().enumerate().any(|(k, x)| region_index(x) != Some(k)) {
        return Err(SpaceError::DomainMismatch.into());
    }
    Ok(())
}

/// `−(1/πi) ∮ K(w, z) H̃(w) dw` over `f_k(r e^{iθ})`.
fn contour_term(cfg: &SurfaceConfig, hk: &HarmonicExpansion, k: usize, zc: C, r: f64, kind: Kernel, m: usize) -> Result<C, JumpError> {
    let dom = &cfg.domains[k];
    let qc = chart_point(cfg, k, cfg.q);
    let mut acc = C::new(0.0, 0.0);
    for i in 0..m {
        let zeta = C::from_polar(r, 2.0 * PI * i as f64 / m as f64);
        let w = dom.eval(zeta);
        let dw = C::i() * zeta * dom.deriv(zeta);
        let kz = match kind {
            Kernel::Value => dw_green(&cfg.surface, w, zc, qc)?,
            _ => kernel(cfg, kind, w, zc)?,
        };
        acc += kz * hk.continuation(zeta) * dw;
    }
    Ok(-acc * (2.0 * PI / m as f64) / C::new(0.0, PI))
}

fn relative_distance(cfg: &SurfaceConfig, k: usize, x: C, m: usize) -> f64 {
    let curve = chart_circle(&cfg.domains[k], 0.0, m);
    curve.samples.iter().map(|s| (s - x).norm()).fold(f64::INFINITY, f64::min) / cfg.domains[k].radius()
}

/// `J` (or a derivative) at `z`, treating `z` as inside `Ω_k` exactly when
/// `inside[k]`. Points on `Γ_k` give the one-sided limit selected by `inside[k]`.
pub fn apply_j_sided(cfg: &SurfaceConfig, h: &[HarmonicExpansion], z: C, inside: &[bool], kind: Kernel, m: usize) -> Result<C, JumpError> {
    check_tuple(cfg, h)?;
    let mut total = C::new(0.0, 0.0);
    for (k, hk) in h.iter().enumerate() {
        let dom = &cfg.domains[k];
        let zc = chart_point(cfg, k, z);
        let qc = chart_point(cfg, k, cfg.q);
        let near_z = relative_distance(cfg, k, zc, m) < DEFORM_BELOW;
        let near_q = relative_distance(cfg, k, qc, m) < DEFORM_BELOW;
        let r = if near_z || near_q {
            let (ins, outs): (Vec<C>, Vec<C>) = if inside[k] { (vec![zc], vec![qc]) } else { (vec![], vec![zc, qc]) };
            let cands: &[f64] = match (near_z, inside[k]) {
                (true, true) => &[0.25f64, 0.12],
                (true, false) => &[-0.25f64, -0.12],
                _ => &[-0.25f64, -0.12, 0.25, 0.12],
            };
            let cands: Vec<f64> = cands.iter().map(|s| s.exp()).collect();
            let r = deformation_radius(dom, &cands, &ins, &outs, m);
            if r == 1.0 && near_z && relative_distance(cfg, k, zc, m) < 0.05 {
                return Err(JumpError::PointOnCurve(z));
            }
            r
        } else {
            1.0
        };
        total += contour_term(cfg, hk, k, zc, r, kind, m)?;
    }
    Ok(total)
}

fn inside_flags(ws: &Workspace, z: C) -> Result<Vec<bool>, JumpError> {
    if ws.min_separation(z) < ON_CURVE_TOL {
        return Err(JumpError::PointOnCurve(z));
    }
    let loc = ws.locate(z);
    Ok((0..ws.n()).map(|k| matches!(loc, Location::Omega { k: j, .. } if j == k)).collect())
}

/// `J_q(Γ)h(z)` for `z ∉ Γ`.
pub fn apply_j(ws: &Workspace, h: &[HarmonicExpansion], z: C) -> Result<C, JumpError> {
    apply_j_sided(&ws.cfg, h, z, &inside_flags(ws, z)?, Kernel::Value, ws.disc.m)
}

/// `∂_z J_q(Γ)h(z)` (coefficient of `dz`).
pub fn apply_dj(ws: &Workspace, h: &[HarmonicExpansion], z: C) -> Result<C, JumpError> {
    apply_j_sided(&ws.cfg, h, z, &inside_flags(ws, z)?, Kernel::Dz, ws.disc.m)
}

/// `∂̄_z J_q(Γ)h(z)` (coefficient of `dz̄`).
pub fn apply_dbar_j(ws: &Workspace, h: &[HarmonicExpansion], z: C) -> Result<C, JumpError> {
    apply_j_sided(&ws.cfg, h, z, &inside_flags(ws, z)?, Kernel::Dzbar, ws.disc.m)
}

/// `J` at many points in parallel.
pub fn apply_j_many(ws: &Workspace, h: &[HarmonicExpansion], zs: &[C]) -> Result<Vec<C>, JumpError> {
    zs.par_iter().map(|&z| apply_j(ws, h, z)).collect()
}

/// Level-curve values at `s`, `s/2`, `s/4` and their Richardson limit.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelEstimate {
    pub values: [C; 3],
    pub limit: C,
    /// `|limit − (2 v(s/4) − v(s/2))|`.
    pub spread: f64,
}

/// `J_q(Γ)h(z)` from the defining level-curve integrals of the data itself,
/// extrapolated to `s = 0`. Fails with `LimitNotSettled` if the spread exceeds `tol`.
pub fn apply_j_level(cfg: &SurfaceConfig, h: &[HarmonicExpansion], z: C, s: f64, m: usize, tol: f64) -> Result<LevelEstimate, JumpError> {
    check_tuple(cfg, h)?;
    if !(s > 0.0) {
        return Err(DomainError::InvalidEps(s).into());
    }
    for k in 0..cfg.n() {
        let zc = chart_point(cfg, k, z);
        if crate::domains::inside_polygon(&cfg.domains[k].circle_image(1.0, m), zc) {
            let zeta = cfg.domains[k].inverse(zc)?;
            if zeta.norm() >= (-s).exp() {
                return Err(JumpError::PointOnCurve(z));
            }
        }
    }
    let at = |t: f64| -> Result<C, JumpError> {
        let mut total = C::new(0.0, 0.0);
        for (k, hk) in h.iter().enumerate() {
            let curve = chart_circle(&cfg.domains[k], t, m);
            let zc = chart_point(cfg, k, z);
            let qc = chart_point(cfg, k, cfg.q);
            let mut acc = C::new(0.0, 0.0);
            for (zeta, (w, dw)) in curve.zetas.iter().zip(curve.samples.iter().zip(&curve.tangents)) {
                acc += dw_green(&cfg.surface, *w, zc, qc)? * hk.eval_chart(*zeta) * dw;
            }
            total += -acc * (2.0 * PI / m as f64) / C::new(0.0, PI);
        }
        Ok(total)
    };
    let v = [at(s)?, at(s / 2.0)?, at(s / 4.0)?];
    let r1 = 2.0 * v[1] - v[0];
    let r2 = 2.0 * v[2] - v[1];
    let limit = (4.0 * r2 - r1) / 3.0;
    let spread = (limit - r2).norm();
    if spread > tol {
        return Err(JumpError::LimitNotSettled(spread));
    }
    Ok(LevelEstimate { values: v, limit, spread })
}

/// `J` with the level curves of `g_{Ω_k}(·, p_k)` for base points `p_k = f_k(a_k)`,
/// parametrized by `ζ ↦ f_k((ζ + a_k)/(1 + ā_k ζ))` at height `s`.
pub fn apply_j_base_points(cfg: &SurfaceConfig, h: &[HarmonicExpansion], z: C, a: &[C], s: f64, m: usize) -> Result<C, JumpError> {
    check_tuple(cfg, h)?;
    if a.len() != cfg.n() || a.iter().any(|x| x.norm() >= 1.0) {
        return Err(SpaceError::DomainMismatch.into());
    }
    let r = (-s).exp();
    let mut total = C::new(0.0, 0.0);
    for (k, hk) in h.iter().enumerate() {
        let dom = &cfg.domains[k];
        let zc = chart_point(cfg, k, z);
        let qc = chart_point(cfg, k, cfg.q);
        let ak = a[k];
        let mut acc = C::new(0.0, 0.0);
        for i in 0..m {
            let t = C::from_polar(r, 2.0 * PI * i as f64 / m as f64);
            let den = 1.0 + ak.conj() * t;
            let zeta = (t + ak) / den;
            let dzeta = (1.0 - ak.norm_sqr()) / (den * den) * C::i() * t;
            let w = dom.eval(zeta);
            acc += dw_green(&cfg.surface, w, zc, qc)? * hk.continuation(zeta) * dom.deriv(zeta) * dzeta;
        }
        total += -acc * (2.0 * PI / m as f64) / C::new(0.0, PI);
    }
    Ok(total)
}

/// `J′` on collar data `u_k` (expansions on `Ω_{k,ε}`).
pub fn apply_j_prime(ws: &Workspace, u: &[HarmonicExpansion], z: C) -> Result<C, JumpError> {
    if u.iter().any(|x| !matches!(x.region, Region::Collar(_))) {
        return Err(SpaceError::DomainMismatch.into());
    }
    apply_j(ws, u, z)
}

/// `J(𝔊u)`: bounce each collar datum to its domain, then apply `J`.
pub fn apply_j_bounced(ws: &Workspace, u: &[HarmonicExpansion], z: C, n: usize) -> Result<C, JumpError> {
    let g: Vec<HarmonicExpansion> = u.iter().map(|x| bounce(x, n, ws.disc.m).map(|t| t.value)).collect::<Result<_, _>>()?;
    apply_j(ws, &g, z)
}

/// The `Σ`-side output of `J′u` continued into the collars, tested for holomorphy.
///
/// The term of `Γ_k` is integrated over `|ζ| = e^{−0.95ε}` inside the collar, so it is
/// defined on `{|ζ| > e^{−0.95ε}}`. Samples on `|ζ| = e^{−0.1ε}` and `e^{−0.4ε}` must be
/// Laurent-consistent (`c_n(r₂)/c_n(r₁) = (r₂/r₁)^n`). Returns the largest relative
/// mismatch over all domains.
pub fn extension_collar_check(ws: &Workspace, u: &[HarmonicExpansion], eps: f64) -> Result<f64, JumpError> {
    let cfg = &ws.cfg;
    check_tuple(cfg, u)?;
    let m = ws.disc.m;
    let r0 = (-0.95 * eps).exp();
    let radii = [(-0.1 * eps).exp(), (-0.4 * eps).exp()];
    let mut worst: f64 = 0.0;
    for k in 0..cfg.n() {
        let dom = &cfg.domains[k];
        let mut coeffs = Vec::new();
        for &rr in &radii {
            let samples: Vec<C> = (0..m)
                .into_par_iter()
                .map(|i| {
                    let z = dom.eval(C::from_polar(rr, 2.0 * PI * i as f64 / m as f64));
                    let mut v = C::new(0.0, 0.0);
                    for (j, uj) in u.iter().enumerate() {
                        let zc = chart_point(cfg, j, z);
                        if j == k {
                            let dj = &cfg.domains[j];
                            let qc = chart_point(cfg, j, cfg.q);
                            let mut acc = C::new(0.0, 0.0);
                            for t in 0..m {
                                let zeta = C::from_polar(r0, 2.0 * PI * t as f64 / m as f64);
                                let w = dj.eval(zeta);
                                acc += dw_green(&cfg.surface, w, zc, qc)? * uj.eval_chart(zeta) * C::i() * zeta * dj.deriv(zeta);
                            }
                            v += -acc * (2.0 * PI / m as f64) / C::new(0.0, PI);
                        } else {
                            v += contour_term(cfg, uj, j, zc, 1.0, Kernel::Value, m)?;
                        }
                    }
                    Ok(v)
                })
                .collect::<Result<_, JumpError>>()?;
            let curve = chart_circle(dom, 0.0, m);
            coeffs.push(BoundaryTrace::from_samples(k, curve, samples).fourier);
        }
        let scale = coeffs[0].iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
        let ratio = radii[1] / radii[0];
        for i in 0..m {
            let n = if i <= m / 2 { i as i32 } else { i as i32 - m as i32 };
            if n.abs() > (m / 4) as i32 {
                continue;
            }
            let pred = coeffs[0][i] * ratio.powi(n);
            worst = worst.max((coeffs[1][i] - pred).norm() / scale);
        }
    }
    Ok(worst)
}

/// Output of the jump solver.
#[derive(Debug, Clone)]
pub struct JumpSolution {
    pub h_omega: Vec<HarmonicExpansion>,
    pub h_sigma: SigmaFunction,
    /// `max |H + H_Σ − H_k|` over the boundary samples.
    pub residual: f64,
    /// Largest re-expansion residual.
    pub fit_residual: f64,
    /// Largest anti-holomorphic coefficient dropped from the `Ω_k` outputs.
    pub holomorphy_defect: f64,
}

/// One-sided boundary values `(J_in, J_out)` of `J h` on `Γ_k`.
pub fn boundary_limits(cfg: &SurfaceConfig, h: &[HarmonicExpansion], k: usize, m: usize) -> Result<(Vec<C>, Vec<C>), JumpError> {
    let curve = chart_circle(&cfg.domains[k], 0.0, m);
    let mut inside = vec![false; cfg.n()];
    let out: Vec<C> = curve.samples.par_iter().map(|&z| apply_j_sided(cfg, h, z, &inside, Kernel::Value, m)).collect::<Result<_, _>>()?;
    inside[k] = true;
    let inn: Vec<C> = curve.samples.par_iter().map(|&z| apply_j_sided(cfg, h, z, &inside, Kernel::Value, m)).collect::<Result<_, _>>()?;
    Ok((inn, out))
}

fn max_w_defect(cfg: &SurfaceConfig, h: &[HarmonicExpansion]) -> Result<f64, JumpError> {
    let disk: Vec<HarmonicExpansion> = h.iter().map(|x| HarmonicExpansion { region: Region::Omega(region_index(x).unwrap_or(0)), ..x.clone() }).collect();
    if disk.iter().any(|x| x.powers.iter().any(|&p| p < 1)) {
        return Err(SpaceError::UnsupportedBasis.into());
    }
    Ok(w_defect(cfg, &disk)?.iter().map(|v| v.norm()).fold(0.0, f64::max))
}

/// Solve the jump problem: `h_k = (J h)|_{Ω_k}`, `h_Σ = (J h)|_Σ`, with `H = −H_Σ + H_k`
/// on every `Γ_k`. Outputs are truncated at `n` modes per domain.
pub fn jump_solve(ws: &Workspace, h: &[HarmonicExpansion], n: usize) -> Result<JumpSolution, JumpError> {
    let cfg = &ws.cfg;
    check_tuple(cfg, h)?;
    let defect = max_w_defect(cfg, h)?;
    if defect > W_MEMBERSHIP_TOL {
        return Err(JumpError::NotInW(defect));
    }
    let m = ws.disc.m;
    let mut h_omega = Vec::with_capacity(cfg.n());
    let mut out_data = Vec::with_capacity(cfg.n());
    let mut fit_residual: f64 = 0.0;
    let mut holomorphy_defect: f64 = 0.0;
    for k in 0..cfg.n() {
        let (inn, out) = boundary_limits(cfg, h, k, m)?;
        let curve = chart_circle(&cfg.domains[k], 0.0, m);
        let tr = BoundaryTrace::from_samples(k, curve, inn.clone());
        let full = trace_to_disk(&tr, n);
        holomorphy_defect = holomorphy_defect.max(full.antiholo_coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max));
        let hk = HarmonicExpansion::disk(k, full.holo_coeffs.clone(), vec![], full.constant);
        for (zeta, v) in tr.curve.zetas.iter().zip(&inn) {
            fit_residual = fit_residual.max((hk.eval_chart(*zeta) - v).norm());
        }
        h_omega.push(hk);
        out_data.push(out);
    }
    let mut basis = vec![SigmaElement::Const];
    basis.extend(sigma_holomorphic_basis(cfg, n));
    let fit = fit_sigma(cfg, &basis, &out_data)?;
    fit_residual = fit_residual.max(fit.residual);
    let h_sigma = fit.value.anchored(cfg)?;
    let mut residual: f64 = 0.0;
    for k in 0..cfg.n() {
        let curve = chart_circle(&cfg.domains[k], 0.0, m);
        for (zeta, z) in curve.zetas.iter().zip(&curve.samples) {
            let big_h = h[k].eval_chart(*zeta);
            let hs = h_sigma.value(cfg, *z)?;
            let hk = h_omega[k].eval_chart(*zeta);
            residual = residual.max((big_h + hs - hk).norm());
        }
    }
    if fit_residual > JUMP_FIT_TOL {
        return Err(JumpError::FitResidualExceeded(fit_residual));
    }
    Ok(JumpSolution { h_omega, h_sigma, residual, fit_residual, holomorphy_defect })
}

fn coeff_distance(a: &HarmonicExpansion, b: &HarmonicExpansion) -> Result<f64, JumpError> {
    let d = a.add(&b.scale(C::new(-1.0, 0.0)))?;
    Ok(d.holo_coeffs
        .iter()
        .chain(&d.antiholo_coeffs)
        .map(|c| c.norm())
        .fold(d.constant.norm().max(d.log_coeff.norm()), f64::max))
}

fn sigma_distance(a: &SigmaFunction, b: &SigmaFunction) -> f64 {
    a.add(&b.scale(C::new(-1.0, 0.0))).terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
}

/// Solve from `h = −𝔒(Σ, 𝒪)u_Σ + u_𝒪` and return the largest coefficient distance
/// of the solution to `(u_𝒪, u_Σ)`.
pub fn jump_inverse_check(ws: &Workspace, u_omega: &[HarmonicExpansion], u_sigma: &SigmaFunction, n: usize) -> Result<f64, JumpError> {
    let cfg = &ws.cfg;
    check_tuple(cfg, u_omega)?;
    let u_sigma = u_sigma.anchored(cfg)?;
    let mut h = Vec::with_capacity(cfg.n());
    for (k, uk) in u_omega.iter().enumerate() {
        let t = transmit_to_omega(cfg, &u_sigma, k, n, ws.disc.m)?;
        h.push(uk.add(&t.value.scale(C::new(-1.0, 0.0)))?);
    }
    let sol = jump_solve(ws, &h, n)?;
    let mut d: f64 = sigma_distance(&sol.h_sigma, &u_sigma);
    for (a, b) in sol.h_omega.iter().zip(u_omega) {
        d = d.max(coeff_distance(a, b)?);
    }
    Ok(d)
}

/// The nearest element of `W` in the span of `h`'s modes: `project_v` applied to `∂̄h`.
pub fn project_w(cfg: &SurfaceConfig, h: &[HarmonicExpansion]) -> Result<Vec<HarmonicExpansion>, JumpError> {
    check_tuple(cfg, h)?;
    let abar: Vec<FormExpansion> = h.iter().map(|x| split_harmonic(x).1).collect();
    let p = project_v(cfg, &abar)?;
    let mut out = Vec::with_capacity(h.len());
    for (x, a) in h.iter().zip(&p) {
        let mut y = x.clone();
        for (i, &pw) in y.powers.iter().enumerate() {
            let idx = a.basis.powers.iter().position(|&q| q == pw - 1);
            y.antiholo_coeffs[i] = idx.map_or(C::new(0.0, 0.0), |j| a.coeffs[j] / pw as f64);
        }
        out.push(y);
    }
    Ok(out)
}

/// Dirichlet distance from `h ∈ W` to `W` restricted to modes `≤ n` (bounced
/// collar data of degree `n`), for each `n` in `ns`.
pub fn xeps_density_residuals(cfg: &SurfaceConfig, h: &[HarmonicExpansion], ns: &[usize]) -> Result<Vec<f64>, JumpError> {
    check_tuple(cfg, h)?;
    let norm2 = |x: &[HarmonicExpansion]| -> f64 {
        x.iter()
            .map(|e| {
                e.powers
                    .iter()
                    .zip(e.holo_coeffs.iter().zip(&e.antiholo_coeffs))
                    .map(|(&p, (a, b))| PI * p as f64 * (a.norm_sqr() + b.norm_sqr()))
                    .sum::<f64>()
            })
            .sum()
    };
    let mut out = Vec::with_capacity(ns.len());
    for &n in ns {
        let trunc: Vec<HarmonicExpansion> = h
            .iter()
            .map(|e| {
                let keep = |v: &[C]| e.powers.iter().zip(v).map(|(&p, c)| if p as usize <= n { *c } else { C::new(0.0, 0.0) }).collect();
                HarmonicExpansion { holo_coeffs: keep(&e.holo_coeffs), antiholo_coeffs: keep(&e.antiholo_coeffs), ..e.clone() }
            })
            .collect();
        let g = project_w(cfg, &trunc)?;
        let diff: Vec<HarmonicExpansion> = h.iter().zip(&g).map(|(a, b)| a.add(&b.scale(C::new(-1.0, 0.0)))).collect::<Result<_, _>>()?;
        out.push(norm2(&diff).sqrt());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary_transmission::transmit_to_sigma;
    use crate::domains::{ConformalDomain, Discretization};
    use crate::surface_models::SurfaceModel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn ws_of(cfg: SurfaceConfig) -> Workspace {
        Workspace::new(cfg, Discretization::default()).unwrap()
    }

    fn disk_ws() -> Workspace {
        ws_of(SurfaceConfig {
            surface: SurfaceModel::sphere(),
            domains: vec![ConformalDomain::disk("D", c(0.0, 0.0), 1.0)],
            q: c(2.0, 0.0),
            epsilon: 0.2,
        })
    }

    fn two_ws() -> Workspace {
        ws_of(SurfaceConfig {
            surface: SurfaceModel::sphere(),
            domains: vec![
                ConformalDomain::new("A", vec![c(-1.5, 0.0), c(0.6, 0.0), c(0.05, 0.0)]),
                ConformalDomain::disk("B", c(1.5, 0.0), 0.6),
            ],
            q: c(0.0, 0.0),
            epsilon: 0.2,
        })
    }

    fn torus_ws() -> Workspace {
        ws_of(SurfaceConfig {
            surface: SurfaceModel::torus(c(0.0, 1.0)).unwrap(),
            domains: vec![
                ConformalDomain::disk("A", c(0.25, 0.25), 0.12),
                ConformalDomain::disk("B", c(0.7, 0.6), 0.12),
            ],
            q: c(0.5, 0.85),
            epsilon: 0.2,
        })
    }

    fn rc(rng: &mut ChaCha8Rng) -> C {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    fn random_h_decay(ws: &Workspace, rng: &mut ChaCha8Rng, n: usize, decay: f64) -> Vec<HarmonicExpansion> {
        let h: Vec<HarmonicExpansion> = (0..ws.n())
            .map(|k| {
                let holo = (1..=n).map(|p| rc(rng) * decay.powi(p as i32)).collect();
                let anti = (1..=n).map(|p| rc(rng) * decay.powi(p as i32)).collect();
                HarmonicExpansion::disk(k, holo, anti, rc(rng))
            })
            .collect();
        project_w(&ws.cfg, &h).unwrap()
    }

    fn random_h(ws: &Workspace, rng: &mut ChaCha8Rng, n: usize) -> Vec<HarmonicExpansion> {
        random_h_decay(ws, rng, n, 0.6)
    }

    fn zbar() -> Vec<HarmonicExpansion> {
        vec![HarmonicExpansion::disk(0, vec![], vec![c(1.0, 0.0)], c(0.0, 0.0))]
    }

    #[test]
    fn disk_closed_forms() {
        let ws = disk_ws();
        let q = 2.0;
        for n in 1..=5usize {
            let mut a = vec![c(0.0, 0.0); n];
            a[n - 1] = c(1.0, 0.0);
            let h = vec![HarmonicExpansion::disk(0, a, vec![], c(0.0, 0.0))];
            for z in [c(0.3, 0.2), c(0.95, 0.1), c(-0.2, -0.95)] {
                assert!((apply_j(&ws, &h, z).unwrap() - z.powi(n as i32)).norm() < 1e-10);
            }
            for z in [c(1.02, 0.0), c(3.0, 1.0), c(0.0, -1.3)] {
                assert!(apply_j(&ws, &h, z).unwrap().norm() < 1e-10);
            }
        }
        let h = zbar();
        for z in [c(0.3, 0.2), c(0.0, 0.98)] {
            assert!((apply_j(&ws, &h, z).unwrap() - 1.0 / q).norm() < 1e-10);
        }
        for z in [c(1.5, 0.2), c(0.0, 1.01), c(-4.0, 2.0)] {
            // residues of (1/w)(1/(w − z) − 1/(w − q)) inside |w| = 1
            let expect = -1.0 / z + 1.0 / q;
            assert!((apply_j(&ws, &h, z).unwrap() - expect).norm() < 1e-10);
        }
        assert!(apply_j(&ws, &h, c(q, 0.0)).unwrap().norm() < 1e-12);
        assert!(matches!(apply_j(&ws, &h, c(1.0, 0.0)), Err(JumpError::PointOnCurve(_))));
    }

    #[test]
    fn level_route_agrees() {
        let ws = disk_ws();
        let h = vec![HarmonicExpansion::disk(0, vec![c(0.2, 0.0), c(0.0, 0.3)], vec![c(1.0, 0.0), c(0.5, -0.5)], c(0.1, 0.0))];
        for z in [c(0.3, 0.1), c(1.6, -0.4)] {
            let est = apply_j_level(&ws.cfg, &h, z, 0.02, 256, 1e-3).unwrap();
            let exact = apply_j(&ws, &h, z).unwrap();
            let errs: Vec<f64> = est.values.iter().map(|v| (v - exact).norm()).collect();
            assert!(errs[2] < errs[1] && errs[1] < errs[0]);
            assert!((est.limit - exact).norm() < 1e-5, "{} {}", est.limit, exact);
        }
        assert!(matches!(apply_j_level(&ws.cfg, &h, c(0.99, 0.0), 0.05, 256, 1.0), Err(JumpError::PointOnCurve(_))));
        assert!(matches!(apply_j_level(&ws.cfg, &h, c(0.3, 0.1), 0.4, 256, 1e-12), Err(JumpError::LimitNotSettled(_))));
    }

    #[test]
    fn deformation_near_curve_is_continuous() {
        let ws = two_ws();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_h(&ws, &mut rng, 6);
        let dom = ws.domain(0).clone();
        // values just inside and just outside approach the one-sided boundary limits
        let zeta = C::from_polar(1.0, 0.7);
        let z0 = dom.eval(zeta);
        let (inn, out) = {
            let cfg = &ws.cfg;
            (
                apply_j_sided(cfg, &h, z0, &[true, false], Kernel::Value, 256).unwrap(),
                apply_j_sided(cfg, &h, z0, &[false, false], Kernel::Value, 256).unwrap(),
            )
        };
        for d in [1e-3, 1e-4] {
            let zi = dom.eval(zeta * (1.0 - d));
            let zo = dom.eval(zeta * (1.0 + d));
            assert!((apply_j(&ws, &h, zi).unwrap() - inn).norm() < 50.0 * d);
            assert!((apply_j(&ws, &h, zo).unwrap() - out).norm() < 50.0 * d);
        }
        // the jump across the curve is the datum
        assert!((inn - out - h[0].eval_chart(zeta)).norm() < 1e-10);
    }

    #[test]
    fn solve_zbar_example() {
        let ws = disk_ws();
        let sol = jump_solve(&ws, &zbar(), 16).unwrap();
        assert!(sol.residual < 1e-9);
        assert!((sol.h_omega[0].constant - 0.5).norm() < 1e-12);
        assert!(sol.h_omega[0].holo_coeffs.iter().all(|c| c.norm() < 1e-12));
        for z in [c(1.5, 0.0), c(0.0, -3.0)] {
            assert!((sol.h_sigma.value(&ws.cfg, z).unwrap() - (-1.0 / z + 0.5)).norm() < 1e-10);
        }
        assert!(sol.h_sigma.value(&ws.cfg, c(2.0, 0.0)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn solve_holomorphic_data() {
        let ws = disk_ws();
        let h = vec![HarmonicExpansion::disk(0, vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], vec![], c(0.0, 0.0))];
        let sol = jump_solve(&ws, &h, 8).unwrap();
        assert!(coeff_distance(&sol.h_omega[0], &h[0]).unwrap() < 1e-12);
        assert!(sol.h_sigma.terms.iter().all(|(_, c)| c.norm() < 1e-12));
    }

    #[test]
    fn torus_solve_and_uniqueness() {
        let ws = torus_ws();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_h(&ws, &mut rng, 6);
        let sol = jump_solve(&ws, &h, 16).unwrap();
        assert!(sol.residual < 1e-6, "{}", sol.residual);
        assert!(sol.holomorphy_defect < 1e-10);
        let pert: Vec<HarmonicExpansion> = h
            .iter()
            .enumerate()
            .map(|(k, x)| x.add(&HarmonicExpansion::disk(k, vec![rc(&mut rng), rc(&mut rng)], vec![], rc(&mut rng))).unwrap())
            .collect();
        let sol2 = jump_solve(&ws, &pert, 16).unwrap();
        for z in [c(0.5, 0.2), c(0.05, 0.7)] {
            let a = sol.h_sigma.value(&ws.cfg, z).unwrap();
            let b = sol2.h_sigma.value(&ws.cfg, z).unwrap();
            assert!((a - b).norm() < 1e-8);
        }
        let bad = vec![HarmonicExpansion::disk(0, vec![], vec![c(1.0, 0.0)], c(0.0, 0.0)), HarmonicExpansion::disk(1, vec![], vec![], c(0.0, 0.0))];
        assert!(matches!(jump_solve(&ws, &bad, 8), Err(JumpError::NotInW(_))));
    }

    #[test]
    fn inverse_checks() {
        let ws = disk_ws();
        let u = vec![HarmonicExpansion::disk(0, vec![c(0.0, 0.0), c(1.0, 0.0)], vec![], c(0.0, 0.0))];
        assert!(jump_inverse_check(&ws, &u, &SigmaFunction::default(), 8).unwrap() < 1e-10);
        let zero = vec![HarmonicExpansion::disk(0, vec![], vec![], c(0.0, 0.0))];
        let us = SigmaFunction::new(vec![(SigmaElement::Pole { k: 0, m: 1 }, c(-1.0, 0.0))]);
        assert!(jump_inverse_check(&ws, &zero, &us, 8).unwrap() < 1e-8);
        let ws = two_ws();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u: Vec<HarmonicExpansion> = (0..2)
            .map(|k| HarmonicExpansion::disk(k, (1..=12).map(|p| rc(&mut rng) * 0.5f64.powi(p)).collect(), vec![], rc(&mut rng)))
            .collect();
        let terms = sigma_holomorphic_basis(&ws.cfg, 12).into_iter().map(|e| (e, rc(&mut rng) * 0.1)).collect();
        let d = jump_inverse_check(&ws, &u, &SigmaFunction::new(terms), 40).unwrap();
        assert!(d < 1e-6, "{d}");
    }

    #[test]
    fn derivative_identities_sphere_disk() {
        let ws = disk_ws();
        let h = zbar();
        for z in [c(1.5, 0.5), c(-2.0, 0.1)] {
            assert!((apply_dj(&ws, &h, z).unwrap() - 1.0 / (z * z)).norm() < 1e-10);
        }
        assert!(apply_dbar_j(&ws, &h, c(1.5, 0.5)).unwrap().norm() < 1e-14);
    }

    #[test]
    fn torus_dbar_is_s_bar() {
        let ws = torus_ws();
        let h = vec![HarmonicExpansion::disk(0, vec![], vec![c(1.0, 0.0)], c(0.0, 0.0)), HarmonicExpansion::disk(1, vec![], vec![], c(0.0, 0.0))];
        // ∂̄J = (1/(2i Im τ)) Σ∮ h dw and ∮ ζ̄ ρ dζ = 2πiρ on the unit circle
        let expect = PI * 0.12;
        for z in [c(0.5, 0.2), c(0.25, 0.3)] {
            assert!((apply_dbar_j(&ws, &h, z).unwrap() - expect).norm() < 1e-10);
        }
        let hw = random_h(&ws, &mut ChaCha8Rng::seed_from_u64(9), 5);
        assert!(apply_dbar_j(&ws, &hw, c(0.5, 0.2)).unwrap().norm() < 1e-10);
    }

    #[test]
    fn base_point_independence() {
        for ws in [two_ws(), torus_ws()] {
            let h = random_h(&ws, &mut ChaCha8Rng::seed_from_u64(4), 6);
            let pts = if ws.surface().is_torus() { vec![c(0.5, 0.2), c(0.26, 0.24)] } else { vec![c(0.0, 1.0), c(1.4, 0.1)] };
            for z in pts {
                let base = apply_j(&ws, &h, z).unwrap();
                let moved = apply_j_base_points(&ws.cfg, &h, z, &[c(0.2, -0.1), c(-0.15, 0.3)], 0.05, 512).unwrap();
                assert!((base - moved).norm() < 1e-8, "{base} {moved}");
            }
        }
    }

    #[test]
    fn j_prime_matches_bounce() {
        let ws = torus_ws();
        let u: Vec<HarmonicExpansion> = (0..2)
            .map(|k| HarmonicExpansion::laurent(Region::Collar(k), vec![-2, -1, 1, 2], vec![c(0.1, 0.0), c(0.0, 0.0), c(0.3, 0.1), c(0.0, 0.2)], vec![c(0.0, 0.0); 4], c(0.5, 0.0), c(0.0, 0.0)))
            .collect();
        for z in [c(0.5, 0.2), c(0.25, 0.26)] {
            let a = apply_j_prime(&ws, &u, z).unwrap();
            let b = apply_j_bounced(&ws, &u, z, 16).unwrap();
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn collar_extension() {
        let ws = torus_ws();
        let mk = |a: C, b: C| {
            vec![
                HarmonicExpansion::laurent(Region::Collar(0), vec![-2, -1, 1], vec![c(0.1, 0.0), a, c(0.3, 0.0)], vec![c(0.0, 0.0); 3], c(0.0, 0.0), c(0.0, 0.0)),
                HarmonicExpansion::laurent(Region::Collar(1), vec![-1, 2], vec![b, c(0.2, 0.1)], vec![c(0.0, 0.0); 2], c(0.0, 0.0), c(0.0, 0.0)),
            ]
        };
        // Σ_k ∮ u_k dw = 2πi Σ_k ρ_k a_{k,−1}
        let good = extension_collar_check(&ws, &mk(c(0.4, 0.0), c(-0.4, 0.0)), 0.2).unwrap();
        let bad = extension_collar_check(&ws, &mk(c(0.4, 0.0), c(0.4, 0.0)), 0.2).unwrap();
        assert!(good < 1e-9, "{good}");
        assert!(bad > 1e-4, "{bad}");
    }

    #[test]
    fn nbv_and_transmitted_jump() {
        let ws = two_ws();
        let cfg = &ws.cfg;
        let hs = SigmaFunction::new(vec![(SigmaElement::Pole { k: 0, m: 2 }, c(0.3, 0.1)), (SigmaElement::Pole { k: 1, m: 1 }, c(-0.2, 0.4))]);
        let ho: Vec<HarmonicExpansion> = (0..2).map(|k| transmit_to_omega(cfg, &hs, k, 40, 256).unwrap().value).collect();
        let hq = hs.value(cfg, cfg.q).unwrap();
        for z in [c(0.0, 1.0), c(0.3, -0.5), c(3.0, 0.0)] {
            let j = apply_j(&ws, &ho, z).unwrap();
            assert!((j + hs.value(cfg, z).unwrap() - hq).norm() < 1e-9);
        }
        // h̄ ∈ W′: anti-holomorphic data; −𝔒(Σ,Ω_j)(J h̄)|_Σ − h̄_j + (J h̄)|_{Ω_j} = 0
        let hb: Vec<HarmonicExpansion> = (0..2).map(|k| HarmonicExpansion::disk(k, vec![], vec![c(0.5, 0.1), c(-0.2, 0.3)], c(0.0, 0.0))).collect();
        let sol = jump_solve(&ws, &hb, 40).unwrap();
        for j in 0..2 {
            let t = transmit_to_omega(cfg, &sol.h_sigma, j, 40, 256).unwrap().value;
            for zeta in [c(0.0, 0.0), c(0.5, 0.2), c(-0.3, -0.6)] {
                let z = ws.domain(j).eval(zeta);
                let r = -t.eval_chart(zeta) - hb[j].eval_chart(zeta) + apply_j(&ws, &hb, z).unwrap();
                assert!(r.norm() < 1e-6, "{r}");
            }
        }
        let _ = transmit_to_sigma;
    }

    #[test]
    fn density_surrogate() {
        let ws = torus_ws();
        let h = random_h_decay(&ws, &mut ChaCha8Rng::seed_from_u64(21), 24, 0.4);
        let r = xeps_density_residuals(&ws.cfg, &h, &[4, 8, 12, 16]).unwrap();
        assert!(r.windows(2).all(|w| w[1] < w[0]));
        assert!(r[3] < 1e-3);
    }
}
