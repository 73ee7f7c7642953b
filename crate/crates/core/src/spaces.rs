//! Finite expansions of Bergman one-forms and harmonic Dirichlet functions,
//! the pairing `(ω₁, ω₂) = ½∬ ω₁ ∧ ∗ω̄₂`, and the constraint spaces `V` and `W`.
//!
//! On `Ω_k` expansions live in the disk coordinate `ζ = f_k⁻¹(z)`: a holomorphic
//! form is `Σ a_p ζ^p dζ`, an anti-holomorphic one `Σ b_p ζ̄^p dζ̄`. The pairing is
//! conformally invariant, so all integrals over `Ω_k` are done in `ζ`.
//! On `Σ` functions are combinations of [`SigmaElement`]s with poles at the
//! base points `c_k = f_k(0)`.

use crate::domains::{chart_point, level_curve, ConformalDomain, DomainError, OpenRegion, QuadratureRule, SurfaceConfig};
use crate::surface_models::{compact_holomorphic_basis, log_abs_theta1, log_theta1_derivs, SurfaceError, SurfaceKind};
use num_complex::Complex64 as C;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("expansions live on different regions")]
    DomainMismatch,
    #[error("Gram matrix is degenerate")]
    DegenerateGram,
    #[error("basis does not support this operation")]
    UnsupportedBasis,
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Where an expansion lives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Omega(usize),
    Collar(usize),
    Sigma,
    Surface,
    Open(OpenRegion),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    Holo,
    AntiHolo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    DiskMonomial,
    Laurent,
    TorusRational,
}

/// Basis family and the list of exponents it carries.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    pub kind: BasisKind,
    pub powers: Vec<i32>,
}

impl BasisSpec {
    pub fn disk(n: usize) -> Self {
        BasisSpec { kind: BasisKind::DiskMonomial, powers: (0..n as i32).collect() }
    }

    pub fn laurent(powers: Vec<i32>) -> Self {
        BasisSpec { kind: BasisKind::Laurent, powers }
    }

    pub fn truncation(&self) -> usize {
        self.powers.len()
    }
}

fn cpow(z: C, p: i32) -> C {
    if p >= 0 {
        z.powu(p as u32)
    } else {
        z.inv().powu((-p) as u32)
    }
}

/// A one-form `Σ c_i ζ^{p_i} dζ` (or its conjugate-type counterpart).
#[derive(Debug, Clone, PartialEq)]
pub struct FormExpansion {
    pub region: Region,
    pub chirality: Chirality,
    pub basis: BasisSpec,
    pub coeffs: Vec<C>,
}

impl FormExpansion {
    pub fn disk(k: usize, chirality: Chirality, coeffs: Vec<C>) -> Self {
        FormExpansion { region: Region::Omega(k), chirality, basis: BasisSpec::disk(coeffs.len()), coeffs }
    }

    pub fn laurent(region: Region, chirality: Chirality, powers: Vec<i32>, coeffs: Vec<C>) -> Self {
        assert_eq!(powers.len(), coeffs.len());
        FormExpansion { region, chirality, basis: BasisSpec::laurent(powers), coeffs }
    }

    /// `c · dz` on a torus.
    pub fn compact_dz(c: C) -> Self {
        FormExpansion {
            region: Region::Surface,
            chirality: Chirality::Holo,
            basis: BasisSpec { kind: BasisKind::TorusRational, powers: vec![0] },
            coeffs: vec![c],
        }
    }

    pub fn zero_like(&self) -> Self {
        FormExpansion { coeffs: vec![C::new(0.0, 0.0); self.coeffs.len()], ..self.clone() }
    }

    /// Coefficient of `dζ` (or `dζ̄`) at the chart point `ζ`.
    pub fn eval_chart(&self, zeta: C) -> C {
        let x = match self.chirality {
            Chirality::Holo => zeta,
            Chirality::AntiHolo => zeta.conj(),
        };
        self.basis.powers.iter().zip(&self.coeffs).map(|(&p, &c)| c * cpow(x, p)).sum()
    }

    /// Coefficient of `dz` (or `dz̄`) at a surface point of `Ω_k`.
    pub fn eval_surface(&self, cfg: &SurfaceConfig, z: C) -> Result<C, SpaceError> {
        match self.region {
            Region::Omega(k) | Region::Collar(k) => {
                let d = &cfg.domains[k];
                let zeta = d.inverse(chart_point(cfg, k, z))?;
                let fp = d.deriv(zeta);
                Ok(match self.chirality {
                    Chirality::Holo => self.eval_chart(zeta) / fp,
                    Chirality::AntiHolo => self.eval_chart(zeta) / fp.conj(),
                })
            }
            _ => Ok(self.eval_chart(z)),
        }
    }

    pub fn scale(&self, a: C) -> Self {
        FormExpansion { coeffs: self.coeffs.iter().map(|c| c * a).collect(), ..self.clone() }
    }

    /// Sum of two expansions on the same region and chirality; exponents are merged.
    pub fn add(&self, other: &Self) -> Result<Self, SpaceError> {
        if self.region != other.region || self.chirality != other.chirality {
            return Err(SpaceError::DomainMismatch);
        }
        let mut map: BTreeMap<i32, C> = BTreeMap::new();
        for (p, c) in self.basis.powers.iter().zip(&self.coeffs).chain(other.basis.powers.iter().zip(&other.coeffs)) {
            *map.entry(*p).or_default() += c;
        }
        let kind = if self.basis.kind == other.basis.kind { self.basis.kind } else { BasisKind::Laurent };
        Ok(FormExpansion {
            region: self.region,
            chirality: self.chirality,
            basis: BasisSpec { kind, powers: map.keys().copied().collect() },
            coeffs: map.values().copied().collect(),
        })
    }

    /// Gram matrix of the basis under the pairing, by quadrature.
    pub fn gram(&self, quad: &QuadratureRule) -> Vec<Vec<C>> {
        let n = self.coeffs.len();
        let mut g = vec![vec![C::new(0.0, 0.0); n]; n];
        for (zeta, w) in quad.ref_nodes.iter().zip(&quad.ref_weights) {
            let x = match self.chirality {
                Chirality::Holo => *zeta,
                Chirality::AntiHolo => zeta.conj(),
            };
            let vals: Vec<C> = self.basis.powers.iter().map(|&p| cpow(x, p)).collect();
            for i in 0..n {
                for j in 0..n {
                    g[i][j] += vals[i] * vals[j].conj() * *w;
                }
            }
        }
        g
    }

    /// `‖·‖²` as the Hermitian form `Σ c̄ᵢ G_{ij} c_j` of the Gram matrix.
    pub fn norm_sq_gram(&self, quad: &QuadratureRule) -> f64 {
        let g = self.gram(quad);
        let mut s = C::new(0.0, 0.0);
        for i in 0..self.coeffs.len() {
            for j in 0..self.coeffs.len() {
                s += self.coeffs[i] * g[i][j] * self.coeffs[j].conj();
            }
        }
        s.re
    }

    /// Exact norm for disk monomials: `‖ζ^p dζ‖² = π/(p+1)`.
    pub fn disk_norm_sq(&self) -> f64 {
        self.basis.powers.iter().zip(&self.coeffs).map(|(&p, c)| c.norm_sqr() * PI / (p as f64 + 1.0)).sum()
    }
}

/// `(a, b) = ½∬ a ∧ ∗b̄`; pairs of opposite chirality are orthogonal.
pub fn inner_product_forms(a: &FormExpansion, b: &FormExpansion, quad: &QuadratureRule) -> Result<C, SpaceError> {
    if a.region != b.region {
        return Err(SpaceError::DomainMismatch);
    }
    if a.chirality != b.chirality {
        return Ok(C::new(0.0, 0.0));
    }
    Ok(quad
        .ref_nodes
        .iter()
        .zip(&quad.ref_weights)
        .map(|(&z, &w)| a.eval_chart(z) * b.eval_chart(z).conj() * w)
        .sum())
}

/// `h = constant + Σ a_p ζ^p + Σ b_p ζ̄^p + λ log|ζ|` with `p ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicExpansion {
    pub region: Region,
    pub powers: Vec<i32>,
    pub holo_coeffs: Vec<C>,
    pub antiholo_coeffs: Vec<C>,
    pub constant: C,
    pub log_coeff: C,
}

impl HarmonicExpansion {
    /// Disk expansion with powers `1..=N`.
    pub fn disk(k: usize, holo: Vec<C>, anti: Vec<C>, constant: C) -> Self {
        let n = holo.len().max(anti.len());
        let mut holo = holo;
        let mut anti = anti;
        holo.resize(n, C::new(0.0, 0.0));
        anti.resize(n, C::new(0.0, 0.0));
        HarmonicExpansion {
            region: Region::Omega(k),
            powers: (1..=n as i32).collect(),
            holo_coeffs: holo,
            antiholo_coeffs: anti,
            constant,
            log_coeff: C::new(0.0, 0.0),
        }
    }

    pub fn laurent(region: Region, powers: Vec<i32>, holo: Vec<C>, anti: Vec<C>, constant: C, log_coeff: C) -> Self {
        assert!(powers.len() == holo.len() && powers.len() == anti.len());
        HarmonicExpansion { region, powers, holo_coeffs: holo, antiholo_coeffs: anti, constant, log_coeff }
    }

    pub fn constant(region: Region, c: C) -> Self {
        HarmonicExpansion::laurent(region, vec![], vec![], vec![], c, C::new(0.0, 0.0))
    }

    pub fn eval_chart(&self, zeta: C) -> C {
        let mut v = self.constant;
        for ((&p, a), b) in self.powers.iter().zip(&self.holo_coeffs).zip(&self.antiholo_coeffs) {
            v += a * cpow(zeta, p) + b * cpow(zeta.conj(), p);
        }
        if self.log_coeff != C::new(0.0, 0.0) {
            v += self.log_coeff * zeta.norm().ln();
        }
        v
    }

    /// Holomorphic continuation `Σ a_p ζ^p + Σ b_p ζ^{−p} + c` of the trace on `|ζ| = 1`.
    pub fn continuation(&self, zeta: C) -> C {
        let mut v = self.constant;
        for ((&p, a), b) in self.powers.iter().zip(&self.holo_coeffs).zip(&self.antiholo_coeffs) {
            v += a * cpow(zeta, p) + b * cpow(zeta, -p);
        }
        v
    }

    /// Value at a surface point of `Ω_k`.
    pub fn eval_surface(&self, cfg: &SurfaceConfig, z: C) -> Result<C, SpaceError> {
        match self.region {
            Region::Omega(k) | Region::Collar(k) => {
                let zeta = cfg.domains[k].inverse(chart_point(cfg, k, z))?;
                Ok(self.eval_chart(zeta))
            }
            _ => Ok(self.eval_chart(z)),
        }
    }

    pub fn is_holomorphic(&self, tol: f64) -> bool {
        self.antiholo_coeffs.iter().all(|b| b.norm() <= tol) && self.log_coeff.norm() <= tol
    }

    pub fn scale(&self, a: C) -> Self {
        HarmonicExpansion {
            region: self.region,
            powers: self.powers.clone(),
            holo_coeffs: self.holo_coeffs.iter().map(|c| c * a).collect(),
            antiholo_coeffs: self.antiholo_coeffs.iter().map(|c| c * a).collect(),
            constant: self.constant * a,
            log_coeff: self.log_coeff * a,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SpaceError> {
        if self.region != other.region {
            return Err(SpaceError::DomainMismatch);
        }
        let mut map: BTreeMap<i32, (C, C)> = BTreeMap::new();
        for h in [self, other] {
            for ((&p, a), b) in h.powers.iter().zip(&h.holo_coeffs).zip(&h.antiholo_coeffs) {
                let e = map.entry(p).or_default();
                e.0 += a;
                e.1 += b;
            }
        }
        Ok(HarmonicExpansion {
            region: self.region,
            powers: map.keys().copied().collect(),
            holo_coeffs: map.values().map(|v| v.0).collect(),
            antiholo_coeffs: map.values().map(|v| v.1).collect(),
            constant: self.constant + other.constant,
            log_coeff: self.log_coeff + other.log_coeff,
        })
    }

    /// Holomorphic part `Σ a_p ζ^p` (no constant).
    pub fn holomorphic_part(&self) -> Self {
        HarmonicExpansion {
            antiholo_coeffs: vec![C::new(0.0, 0.0); self.powers.len()],
            constant: C::new(0.0, 0.0),
            log_coeff: C::new(0.0, 0.0),
            ..self.clone()
        }
    }

    /// Anti-holomorphic part `Σ b_p ζ̄^p` (no constant).
    pub fn antiholomorphic_part(&self) -> Self {
        HarmonicExpansion {
            holo_coeffs: vec![C::new(0.0, 0.0); self.powers.len()],
            constant: C::new(0.0, 0.0),
            log_coeff: C::new(0.0, 0.0),
            ..self.clone()
        }
    }
}

/// `(∂h, ∂̄h)` by term-by-term differentiation in the chart.
pub fn split_harmonic(h: &HarmonicExpansion) -> (FormExpansion, FormExpansion) {
    let mut holo: BTreeMap<i32, C> = BTreeMap::new();
    let mut anti: BTreeMap<i32, C> = BTreeMap::new();
    for ((&p, a), b) in h.powers.iter().zip(&h.holo_coeffs).zip(&h.antiholo_coeffs) {
        *holo.entry(p - 1).or_default() += a * p as f64;
        *anti.entry(p - 1).or_default() += b * p as f64;
    }
    if h.log_coeff != C::new(0.0, 0.0) {
        *holo.entry(-1).or_default() += h.log_coeff * 0.5;
        *anti.entry(-1).or_default() += h.log_coeff * 0.5;
    }
    let kind = if holo.keys().all(|&p| p >= 0) && matches!(h.region, Region::Omega(_)) {
        BasisKind::DiskMonomial
    } else {
        BasisKind::Laurent
    };
    let mk = |m: BTreeMap<i32, C>, chirality| FormExpansion {
        region: h.region,
        chirality,
        basis: BasisSpec { kind, powers: m.keys().copied().collect() },
        coeffs: m.values().copied().collect(),
    };
    (mk(holo, Chirality::Holo), mk(anti, Chirality::AntiHolo))
}

/// Dirichlet pairing `(dh₁, dh₂)`; constants contribute nothing.
pub fn dirichlet_inner(h1: &HarmonicExpansion, h2: &HarmonicExpansion, quad: &QuadratureRule) -> Result<C, SpaceError> {
    if h1.region != h2.region {
        return Err(SpaceError::DomainMismatch);
    }
    let (a1, b1) = split_harmonic(h1);
    let (a2, b2) = split_harmonic(h2);
    Ok(inner_product_forms(&a1, &a2, quad)? + inner_product_forms(&b1, &b2, quad)?)
}

/// Exact Dirichlet pairing on `Ω_k` for disk expansions: `‖ζ^p‖² = πp`.
pub fn dirichlet_inner_disk(h1: &HarmonicExpansion, h2: &HarmonicExpansion) -> Result<C, SpaceError> {
    if h1.region != h2.region {
        return Err(SpaceError::DomainMismatch);
    }
    let mut s = C::new(0.0, 0.0);
    for (i, &p) in h1.powers.iter().enumerate() {
        if p <= 0 {
            return Err(SpaceError::UnsupportedBasis);
        }
        if let Some(j) = h2.powers.iter().position(|&r| r == p) {
            s += (h1.holo_coeffs[i] * h2.holo_coeffs[j].conj() + h1.antiholo_coeffs[i] * h2.antiholo_coeffs[j].conj())
                * PI
                * p as f64;
        }
    }
    Ok(s)
}

fn check_tuple(cfg: &SurfaceConfig, regions: impl Iterator<Item = Region>) -> Result<(), SpaceError> {
    for (k, r) in regions.enumerate() {
        if r != Region::Omega(k) || k >= cfg.n() {
            return Err(SpaceError::DomainMismatch);
        }
    }
    Ok(())
}

/// Weights `a_{k,p}` with `∬_{Ω_k} dz ∧ (ζ̄^p dζ̄) = a_{k,p}`.
fn v_weights(d: &ConformalDomain, powers: &[i32]) -> Result<Vec<C>, SpaceError> {
    powers
        .iter()
        .map(|&p| {
            if p < 0 {
                return Err(SpaceError::UnsupportedBasis);
            }
            let c = d.coeffs.get(p as usize + 1).copied().unwrap_or_default();
            Ok(C::new(0.0, -2.0 * PI) * c)
        })
        .collect()
}

/// `Σ_k ∬_{Ω_k} β_j ∧ ᾱ_k` for each compact form `β_j`; empty on the sphere.
pub fn v_defect(cfg: &SurfaceConfig, abar: &[FormExpansion]) -> Result<Vec<C>, SpaceError> {
    check_tuple(cfg, abar.iter().map(|a| a.region))?;
    if abar.len() != cfg.n() || abar.iter().any(|a| a.chirality != Chirality::AntiHolo) {
        return Err(SpaceError::DomainMismatch);
    }
    let basis = compact_holomorphic_basis(&cfg.surface);
    let mut out = Vec::with_capacity(basis.len());
    for b in &basis {
        let mut s = C::new(0.0, 0.0);
        for (k, a) in abar.iter().enumerate() {
            let w = v_weights(&cfg.domains[k], &a.basis.powers)?;
            s += a.coeffs.iter().zip(&w).map(|(c, w)| c * w).sum::<C>();
        }
        out.push(s * b.coefficient);
    }
    Ok(out)
}

/// `v_defect` of `(∂̄h₁, …, ∂̄h_n)`.
pub fn w_defect(cfg: &SurfaceConfig, h: &[HarmonicExpansion]) -> Result<Vec<C>, SpaceError> {
    let abar: Vec<FormExpansion> = h.iter().map(|hk| split_harmonic(hk).1).collect();
    v_defect(cfg, &abar)
}

/// `w_defect` through `−Σ_k ∮ h_k dz` over the level curves at height `s`.
pub fn w_defect_level(cfg: &SurfaceConfig, h: &[HarmonicExpansion], s: f64, m: usize) -> Result<Vec<C>, SpaceError> {
    check_tuple(cfg, h.iter().map(|x| x.region))?;
    let basis = compact_holomorphic_basis(&cfg.surface);
    let mut total = C::new(0.0, 0.0);
    for (k, hk) in h.iter().enumerate() {
        let curve = level_curve(&cfg.domains[k], s, m)?;
        let vals: Vec<C> = curve.zetas.iter().map(|&z| hk.eval_chart(z)).collect();
        total -= crate::domains::contour_integral(&curve, &vals)?;
    }
    Ok(basis.iter().map(|b| total * b.coefficient).collect())
}

/// Orthogonal projection onto `V` inside the truncated anti-holomorphic space.
pub fn project_v(cfg: &SurfaceConfig, abar: &[FormExpansion]) -> Result<Vec<FormExpansion>, SpaceError> {
    let defect = v_defect(cfg, abar)?;
    if defect.is_empty() {
        return Ok(abar.to_vec());
    }
    // v(β) = Σ a_p β_p = ⟨β, g⟩ with g_p = conj(a_p)(p+1)/π under ‖ζ̄^p dζ̄‖² = π/(p+1)
    let weights: Vec<Vec<C>> = abar
        .iter()
        .enumerate()
        .map(|(k, a)| v_weights(&cfg.domains[k], &a.basis.powers))
        .collect::<Result<_, _>>()?;
    let mut gnorm = 0.0;
    for (a, w) in abar.iter().zip(&weights) {
        for (&p, wp) in a.basis.powers.iter().zip(w) {
            gnorm += wp.norm_sqr() * (p as f64 + 1.0) / PI;
        }
    }
    if gnorm < 1e-300 {
        return Err(SpaceError::DegenerateGram);
    }
    let t = defect[0] / gnorm;
    Ok(abar
        .iter()
        .zip(&weights)
        .map(|(a, w)| {
            let coeffs = a
                .coeffs
                .iter()
                .zip(&a.basis.powers)
                .zip(w)
                .map(|((c, &p), wp)| c - t * wp.conj() * (p as f64 + 1.0) / PI)
                .collect();
            FormExpansion { coeffs, ..a.clone() }
        })
        .collect())
}

/// Elements of the `Σ`-side function families, centred at `c_k` with scale `ρ_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SigmaElement {
    Const,
    Pole { k: usize, m: usize },
    ConjPole { k: usize, m: usize },
    PoleDifference { k: usize },
    LogDifference { k: usize },
}

/// Non-exact holomorphic forms on `Σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SigmaExtra {
    ResidueDifference { k: usize },
    Dz,
    /// `(log θ₁)″(z − c₀)`, a quasi-periodic primitive.
    DoublePole,
}

fn geometry(cfg: &SurfaceConfig, k: usize) -> (C, f64) {
    let d = &cfg.domains[k];
    (d.base_point(), d.radius())
}

/// `Z(u) = (log θ₁)′(u) + 2πi Im u / Im τ`: periodic, harmonic, simple pole at 0.
/// Returns `(Z, ∂Z, ∂̄Z)`.
fn torus_z(u: C, tau: C) -> Result<[C; 3], SurfaceError> {
    let l = log_theta1_derivs(u, tau, 2)?;
    let a = PI / tau.im;
    Ok([l[0] + C::new(0.0, 2.0 * a * u.im), l[1] + a, C::new(-a, 0.0)])
}

/// `G(u) = log|θ₁(u)| − π (Im u)² / Im τ`; returns `(G, ∂G)`.
fn torus_g(u: C, tau: C) -> Result<(f64, C), SurfaceError> {
    let l1 = log_theta1_derivs(u, tau, 1)?[0];
    let g = log_abs_theta1(u, tau)? - PI * u.im * u.im / tau.im;
    Ok((g, 0.5 * l1 + C::new(0.0, PI * u.im / tau.im)))
}

fn fact(n: usize) -> f64 {
    (1..=n).map(|j| j as f64).product()
}

/// `(value, ∂, ∂̄)` of a `Σ`-side basis element at `z`.
pub fn eval_sigma_element(cfg: &SurfaceConfig, el: SigmaElement, z: C) -> Result<[C; 3], SpaceError> {
    let zero = C::new(0.0, 0.0);
    let torus = cfg.surface.kind == SurfaceKind::Torus;
    let tau = cfg.surface.tau;
    Ok(match el {
        SigmaElement::Const => [C::new(1.0, 0.0), zero, zero],
        SigmaElement::Pole { k, m } => {
            let (c, rho) = geometry(cfg, k);
            let u = z - c;
            if !torus {
                let v = cpow(C::new(rho, 0.0) / u, m as i32);
                [v, -(m as f64) * v / u, zero]
            } else if m == 1 {
                let zz = torus_z(u, tau)?;
                [zz[0] * rho, zz[1] * rho, zz[2] * rho]
            } else {
                let l = log_theta1_derivs(u, tau, m + 1)?;
                let s = if m % 2 == 0 { -1.0 } else { 1.0 } * rho.powi(m as i32) / fact(m - 1);
                [l[m - 1] * s, l[m] * s, zero]
            }
        }
        SigmaElement::ConjPole { k, m } => {
            let [v, d, db] = eval_sigma_element(cfg, SigmaElement::Pole { k, m }, z)?;
            [v.conj(), db.conj(), d.conj()]
        }
        SigmaElement::PoleDifference { k } => {
            let (ck, rk) = geometry(cfg, k);
            let (c0, _) = geometry(cfg, 0);
            if !torus {
                let v = rk / (z - ck) - rk / (z - c0);
                [v, -rk / ((z - ck) * (z - ck)) + rk / ((z - c0) * (z - c0)), zero]
            } else {
                let a = torus_z(z - ck, tau)?;
                let b = torus_z(z - c0, tau)?;
                [(a[0] - b[0]) * rk, (a[1] - b[1]) * rk, zero]
            }
        }
        SigmaElement::LogDifference { k } => {
            let (ck, _) = geometry(cfg, k);
            let (c0, _) = geometry(cfg, 0);
            let (v, d) = if !torus {
                ((z - ck).norm().ln() - (z - c0).norm().ln(), 0.5 / (z - ck) - 0.5 / (z - c0))
            } else {
                let (ga, da) = torus_g(z - ck, tau)?;
                let (gb, db) = torus_g(z - c0, tau)?;
                (ga - gb, da - db)
            };
            [C::new(v, 0.0), d, d.conj()]
        }
    })
}

/// Holomorphic non-exact form coefficient.
pub fn eval_sigma_extra(cfg: &SurfaceConfig, e: SigmaExtra, z: C) -> Result<C, SpaceError> {
    Ok(match e {
        SigmaExtra::Dz => C::new(1.0, 0.0),
        SigmaExtra::DoublePole => {
            let (c0, _) = geometry(cfg, 0);
            log_theta1_derivs(z - c0, cfg.surface.tau, 2)?[1]
        }
        SigmaExtra::ResidueDifference { k } => {
            let (ck, _) = geometry(cfg, k);
            let (c0, _) = geometry(cfg, 0);
            if cfg.surface.is_torus() {
                let t = cfg.surface.tau;
                log_theta1_derivs(z - ck, t, 1)?[0] - log_theta1_derivs(z - c0, t, 1)?[0]
            } else {
                1.0 / (z - ck) - 1.0 / (z - c0)
            }
        }
    })
}

/// Harmonic family on `Σ`: constant, poles and conjugate poles of order `1..=N`, log differences.
pub fn sigma_harmonic_basis(cfg: &SurfaceConfig, n: usize) -> Vec<SigmaElement> {
    let mut v = vec![SigmaElement::Const];
    for k in 0..cfg.n() {
        for m in 1..=n {
            v.push(SigmaElement::Pole { k, m });
            v.push(SigmaElement::ConjPole { k, m });
        }
        if k > 0 {
            v.push(SigmaElement::LogDifference { k });
        }
    }
    v
}

/// Holomorphic family on `Σ` without the constant.
pub fn sigma_holomorphic_basis(cfg: &SurfaceConfig, n: usize) -> Vec<SigmaElement> {
    let mut v = Vec::new();
    let torus = cfg.surface.is_torus();
    for k in 0..cfg.n() {
        for m in (if torus { 2 } else { 1 })..=n {
            v.push(SigmaElement::Pole { k, m });
        }
        if torus && k > 0 {
            v.push(SigmaElement::PoleDifference { k });
        }
    }
    v
}

/// Holomorphic forms on `Σ` without a single-valued primitive.
pub fn sigma_form_extras(cfg: &SurfaceConfig) -> Vec<SigmaExtra> {
    let mut v: Vec<SigmaExtra> = (1..cfg.n()).map(|k| SigmaExtra::ResidueDifference { k }).collect();
    if cfg.surface.is_torus() {
        v.push(SigmaExtra::Dz);
        v.push(SigmaExtra::DoublePole);
    }
    v
}

/// A finite combination of [`SigmaElement`]s.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SigmaFunction {
    pub terms: Vec<(SigmaElement, C)>,
}

impl SigmaFunction {
    pub fn new(terms: Vec<(SigmaElement, C)>) -> Self {
        SigmaFunction { terms }
    }

    pub fn from_basis(basis: &[SigmaElement], coeffs: &[C]) -> Self {
        SigmaFunction { terms: basis.iter().copied().zip(coeffs.iter().copied()).collect() }
    }

    pub fn eval_full(&self, cfg: &SurfaceConfig, z: C) -> Result<[C; 3], SpaceError> {
        let mut out = [C::new(0.0, 0.0); 3];
        for &(el, c) in &self.terms {
            let v = eval_sigma_element(cfg, el, z)?;
            for i in 0..3 {
                out[i] += v[i] * c;
            }
        }
        Ok(out)
    }

    pub fn value(&self, cfg: &SurfaceConfig, z: C) -> Result<C, SpaceError> {
        Ok(self.eval_full(cfg, z)?[0])
    }

    pub fn scale(&self, a: C) -> Self {
        SigmaFunction { terms: self.terms.iter().map(|&(e, c)| (e, c * a)).collect() }
    }

    /// Concatenation of terms, i.e. the sum as functions.
    pub fn add(&self, other: &Self) -> Self {
        let mut map: BTreeMap<SigmaElement, C> = BTreeMap::new();
        for &(e, c) in self.terms.iter().chain(&other.terms) {
            *map.entry(e).or_default() += c;
        }
        SigmaFunction { terms: map.into_iter().collect() }
    }

    /// The same function shifted by a constant so that it vanishes at `q`.
    pub fn anchored(&self, cfg: &SurfaceConfig) -> Result<Self, SpaceError> {
        let v = self.value(cfg, cfg.q)?;
        Ok(self.add(&SigmaFunction::new(vec![(SigmaElement::Const, -v)])))
    }

    pub fn is_holomorphic(&self, cfg: &SurfaceConfig, tol: f64) -> bool {
        if cfg.surface.is_torus() {
            // Poles of order one are only holomorphic in residue-free combinations.
            let s: C = self
                .terms
                .iter()
                .filter(|(e, _)| matches!(e, SigmaElement::Pole { m: 1, .. }))
                .map(|&(e, c)| match e {
                    SigmaElement::Pole { k, .. } => c * geometry(cfg, k).1,
                    _ => C::new(0.0, 0.0),
                })
                .sum();
            if s.norm() > tol {
                return false;
            }
        }
        self.terms.iter().all(|&(e, c)| {
            !matches!(e, SigmaElement::ConjPole { .. } | SigmaElement::LogDifference { .. }) || c.norm() <= tol
        })
    }
}

/// A holomorphic form `dH + Σ e_j · extra_j` on `Σ`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SigmaForm {
    pub primitive: SigmaFunction,
    pub extras: Vec<(SigmaExtra, C)>,
}

impl SigmaForm {
    pub fn exact(primitive: SigmaFunction) -> Self {
        SigmaForm { primitive, extras: vec![] }
    }

    /// Coefficient of `dz`.
    pub fn eval(&self, cfg: &SurfaceConfig, z: C) -> Result<C, SpaceError> {
        let mut v = self.primitive.eval_full(cfg, z)?[1];
        for &(e, c) in &self.extras {
            v += eval_sigma_extra(cfg, e, z)? * c;
        }
        Ok(v)
    }

    /// Size of the non-exact part.
    pub fn non_exact_part(&self) -> f64 {
        self.extras.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    /// `∮_{Γ_k} β` for each boundary curve.
    pub fn periods(&self, cfg: &SurfaceConfig, m: usize) -> Result<Vec<C>, SpaceError> {
        (0..cfg.n())
            .map(|k| {
                let curve = level_curve(&cfg.domains[k], 0.0, m)?;
                let vals = curve.samples.iter().map(|&z| self.eval(cfg, z)).collect::<Result<Vec<_>, _>>()?;
                Ok(crate::domains::contour_integral(&curve, &vals)?)
            })
            .collect()
    }
}

/// `(dH₁, dH₂)_Σ = ½∮_{∂Σ} H̄₂ ∗dH₁` with `∂Σ` the reversed curves `Γ_k`.
pub fn sigma_dirichlet_inner(cfg: &SurfaceConfig, h1: &SigmaFunction, h2: &SigmaFunction, m: usize) -> Result<C, SpaceError> {
    let mut total = C::new(0.0, 0.0);
    for k in 0..cfg.n() {
        let curve = level_curve(&cfg.domains[k], 0.0, m)?;
        let dt = 2.0 * PI / m as f64;
        for (z, t) in curve.samples.iter().zip(&curve.tangents) {
            let a = h1.eval_full(cfg, *z)?;
            let b = h2.value(cfg, *z)?;
            let star = C::new(0.0, -1.0) * a[1] * t + C::new(0.0, 1.0) * a[2] * t.conj();
            total -= 0.5 * b.conj() * star * dt;
        }
    }
    Ok(total)
}

/// Forms on `Σ` given by point samples, paired through their primitives.
pub fn sigma_form_inner(cfg: &SurfaceConfig, b1: &SigmaForm, b2: &SigmaForm, m: usize) -> Result<C, SpaceError> {
    if b1.non_exact_part() > 0.0 || b2.non_exact_part() > 0.0 {
        return Err(SpaceError::UnsupportedBasis);
    }
    sigma_dirichlet_inner(cfg, &b1.primitive, &b2.primitive, m)
}
