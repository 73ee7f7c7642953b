//! Cut systems of simply connected domains given by injective polynomial disk
//! maps, their level curves and collars, and the quadrature rules used on them.

use crate::surface_models::{SurfaceKind, SurfaceModel};
use gauss_quad::GaussLegendre;
use num_complex::Complex64 as C;
use std::f64::consts::PI;
use std::fmt;
use thiserror::Error;

/// Minimum separation between distinct closures, and between `q` and any closure.
pub const SEPARATION_TOL: f64 = 1e-6;
const INJECTIVITY_SAMPLES: usize = 4096;
const DERIVATIVE_GRID: usize = 64;
const NEWTON_MAX_ITER: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("invalid quadrature order (n_r = {0}, n_t = {1})")]
    InvalidOrder(usize, usize),
    #[error("integrand has {got} samples, curve has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("collar depth must be positive, got {0}")]
    InvalidEps(f64),
    #[error("Newton inversion of the disk map did not converge at z = {0}")]
    InversionFailure(C),
    #[error("disk map needs a nonzero linear coefficient")]
    DegenerateMap,
}

/// `f(ζ) = Σ c_j ζ^j` on the closed unit disk; `f(0)` is the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalDomain {
    pub label: String,
    pub coeffs: Vec<C>,
}

impl ConformalDomain {
    pub fn new(label: impl Into<String>, coeffs: Vec<C>) -> Self {
        ConformalDomain { label: label.into(), coeffs }
    }

    /// Disk of radius `r` centred at `c`.
    pub fn disk(label: impl Into<String>, c: C, r: f64) -> Self {
        Self::new(label, vec![c, C::new(r, 0.0)])
    }

    pub fn eval(&self, zeta: C) -> C {
        self.coeffs.iter().rev().fold(C::new(0.0, 0.0), |acc, &c| acc * zeta + c)
    }

    pub fn deriv(&self, zeta: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        for (j, &c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * zeta + c * j as f64;
        }
        acc
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn base_point(&self) -> C {
        self.coeffs.first().copied().unwrap_or_default()
    }

    /// `|f′(0)|`, the natural length scale of the domain.
    pub fn radius(&self) -> f64 {
        self.coeffs.get(1).map(|c| c.norm()).unwrap_or(0.0)
    }

    pub fn is_affine(&self) -> bool {
        self.coeffs.iter().skip(2).all(|c| c.norm() == 0.0)
    }

    /// `f⁻¹(z)` by Newton's method started from the affine approximation.
    pub fn inverse(&self, z: C) -> Result<C, DomainError> {
        let c1 = *self.coeffs.get(1).ok_or(DomainError::DegenerateMap)?;
        if c1.norm() == 0.0 {
            return Err(DomainError::DegenerateMap);
        }
        let mut zeta = (z - self.base_point()) / c1;
        for _ in 0..NEWTON_MAX_ITER {
            let step = (self.eval(zeta) - z) / self.deriv(zeta);
            zeta -= step;
            if step.norm() < 1e-15 * (1.0 + zeta.norm()) {
                return Ok(zeta);
            }
        }
        let resid = (self.eval(zeta) - z).norm();
        if resid < 1e-13 * self.radius().max(1.0) {
            Ok(zeta)
        } else {
            Err(DomainError::InversionFailure(z))
        }
    }

    /// `f(r e^{2πij/m})` for `j = 0..m`.
    pub fn circle_image(&self, r: f64, m: usize) -> Vec<C> {
        (0..m).map(|j| self.eval(C::from_polar(r, 2.0 * PI * j as f64 / m as f64))).collect()
    }
}

/// A configuration `(R, 𝒪, Σ, q)` with collar depth `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceConfig {
    pub surface: SurfaceModel,
    pub domains: Vec<ConformalDomain>,
    pub q: C,
    pub epsilon: f64,
}

impl SurfaceConfig {
    pub fn n(&self) -> usize {
        self.domains.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoDomains,
    InvalidEpsilon(f64),
    ZeroDerivative { domain: String, at: C },
    InjectivityViolation { domain: String, at: C },
    DisjointnessViolation { a: String, b: String },
    AnchorViolation { domain: String },
    FundamentalDomainViolation { domain: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoDomains => write!(f, "no domains given"),
            Violation::InvalidEpsilon(e) => write!(f, "collar depth {e} is not positive"),
            Violation::ZeroDerivative { domain, at } => write!(f, "{domain}: f' vanishes near zeta = {at}"),
            Violation::InjectivityViolation { domain, at } => {
                write!(f, "{domain}: boundary curve self-intersects near {at}")
            }
            Violation::DisjointnessViolation { a, b } => write!(f, "closures of {a} and {b} meet"),
            Violation::AnchorViolation { domain } => write!(f, "q is not separated from {domain}"),
            Violation::FundamentalDomainViolation { domain } => {
                write!(f, "{domain} does not fit in one fundamental domain")
            }
        }
    }
}

fn orient(a: C, b: C, c: C) -> f64 {
    (b - a).re * (c - a).im - (b - a).im * (c - a).re
}

fn segments_cross(p1: C, p2: C, p3: C, p4: C) -> bool {
    let d1 = orient(p3, p4, p1);
    let d2 = orient(p3, p4, p2);
    let d3 = orient(p1, p2, p3);
    let d4 = orient(p1, p2, p4);
    ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0))
}

struct Segment {
    a: C,
    b: C,
    idx: usize,
    xmin: f64,
    xmax: f64,
}

fn segments(poly: &[C]) -> Vec<Segment> {
    let m = poly.len();
    let mut segs: Vec<Segment> = (0..m)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % m]);
            Segment { a, b, idx: i, xmin: a.re.min(b.re), xmax: a.re.max(b.re) }
        })
        .collect();
    segs.sort_by(|s, t| s.xmin.total_cmp(&t.xmin));
    segs
}

/// First crossing between two closed polylines (or within one when `same`).
fn first_crossing(p: &[C], q: &[C], same: bool) -> Option<C> {
    let m = p.len();
    let sp = segments(p);
    let sq = if same { Vec::new() } else { segments(q) };
    let other = if same { &sp } else { &sq };
    for s in &sp {
        // segments of `other` with xmin <= s.xmax and xmax >= s.xmin
        let end = other.partition_point(|t| t.xmin <= s.xmax);
        for t in &other[..end] {
            if t.xmax < s.xmin {
                continue;
            }
            if same {
                let d = (s.idx as i64 - t.idx as i64).rem_euclid(m as i64);
                if d == 0 || d == 1 || d == m as i64 - 1 {
                    continue;
                }
            }
            if segments_cross(s.a, s.b, t.a, t.b) {
                return Some(s.a);
            }
        }
    }
    None
}

/// Even-odd point-in-polygon test.
pub fn inside_polygon(poly: &[C], z: C) -> bool {
    let m = poly.len();
    let mut inside = false;
    for i in 0..m {
        let (a, b) = (poly[i], poly[(i + 1) % m]);
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) / (b.im - a.im) * (b.re - a.re);
            if z.re < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn min_distance(p: &[C], z: C) -> f64 {
    p.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min)
}

fn translates(s: &SurfaceModel) -> Vec<C> {
    match s.kind {
        SurfaceKind::Sphere => vec![C::new(0.0, 0.0)],
        SurfaceKind::Torus => {
            let mut v = Vec::new();
            for m in -1..=1 {
                for n in -1..=1 {
                    v.push(C::new(m as f64, 0.0) + s.tau * n as f64);
                }
            }
            v
        }
    }
}

fn closures_meet(p: &[C], q: &[C]) -> bool {
    if first_crossing(p, q, false).is_some() {
        return true;
    }
    if inside_polygon(p, q[0]) || inside_polygon(q, p[0]) {
        return true;
    }
    // coarse distance check on a subsample, refined near the closest pair
    let step = (p.len() / 512).max(1);
    p.iter().step_by(step).any(|&a| min_distance(q, a) <= SEPARATION_TOL)
}

/// All violated invariants of the configuration; empty means valid.
pub fn validate_config(cfg: &SurfaceConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    if cfg.domains.is_empty() {
        out.push(Violation::NoDomains);
    }
    if !(cfg.epsilon > 0.0) {
        out.push(Violation::InvalidEpsilon(cfg.epsilon));
    }
    let curves: Vec<Vec<C>> = cfg.domains.iter().map(|d| d.circle_image(1.0, INJECTIVITY_SAMPLES)).collect();
    for (d, curve) in cfg.domains.iter().zip(&curves) {
        let c1 = d.coeffs.get(1).copied().unwrap_or_default();
        if c1.norm() == 0.0 {
            out.push(Violation::ZeroDerivative { domain: d.label.clone(), at: C::new(0.0, 0.0) });
            continue;
        }
        if let Some(at) = first_crossing(curve, curve, true) {
            out.push(Violation::InjectivityViolation { domain: d.label.clone(), at });
        }
        let g = DERIVATIVE_GRID;
        let mut bad = None;
        'grid: for i in 0..=g {
            for j in 0..=g {
                let zeta = C::new(-1.0 + 2.0 * i as f64 / g as f64, -1.0 + 2.0 * j as f64 / g as f64);
                if zeta.norm() <= 1.0 && d.deriv(zeta).norm() < 1e-10 * c1.norm() {
                    bad = Some(zeta);
                    break 'grid;
                }
            }
        }
        if let Some(at) = bad {
            out.push(Violation::ZeroDerivative { domain: d.label.clone(), at });
        }
        if cfg.surface.is_torus() {
            let tau = cfg.surface.tau;
            let c = d.base_point();
            let fits = curve.iter().all(|&w| {
                let u = w - c;
                let b = u.im / tau.im;
                let a = u.re - b * tau.re;
                a.abs() < 0.5 && b.abs() < 0.5
            });
            if !fits {
                out.push(Violation::FundamentalDomainViolation { domain: d.label.clone() });
            }
        }
    }
    let shifts = translates(&cfg.surface);
    for i in 0..cfg.domains.len() {
        for j in (i + 1)..cfg.domains.len() {
            let meet = shifts.iter().any(|&t| {
                let moved: Vec<C> = curves[j].iter().map(|w| w + t).collect();
                closures_meet(&curves[i], &moved)
            });
            if meet {
                out.push(Violation::DisjointnessViolation {
                    a: cfg.domains[i].label.clone(),
                    b: cfg.domains[j].label.clone(),
                });
            }
        }
        let q_bad = shifts.iter().any(|&t| {
            let q = cfg.q + t;
            inside_polygon(&curves[i], q) || min_distance(&curves[i], q) <= SEPARATION_TOL
        });
        if q_bad {
            out.push(Violation::AnchorViolation { domain: cfg.domains[i].label.clone() });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadKind {
    Area,
    Contour,
}

/// Nodes on the surface, the reference nodes `ζ` they are pulled back from,
/// surface weights (with Jacobian) and reference weights.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<C>,
    pub weights: Vec<f64>,
    pub kind: QuadKind,
    pub ref_nodes: Vec<C>,
    pub ref_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn integrate(&self, mut f: impl FnMut(C) -> C) -> C {
        self.nodes.iter().zip(&self.weights).map(|(&z, &w)| f(z) * w).sum()
    }

    /// Integral in the reference variable `ζ`, without the Jacobian.
    pub fn integrate_ref(&self, mut f: impl FnMut(C) -> C) -> C {
        self.ref_nodes.iter().zip(&self.ref_weights).map(|(&z, &w)| f(z) * w).sum()
    }
}

fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(n).expect("order checked by caller");
    rule.into_node_weight_pairs()
        .into_iter()
        .map(|(x, w)| (0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w))
        .collect()
}

/// Gauss–Legendre × trapezoid rule on `r_in < |ζ| < r_out`, pushed through `f`.
pub fn annulus_quadrature(
    dom: &ConformalDomain,
    r_in: f64,
    r_out: f64,
    n_r: usize,
    n_t: usize,
) -> Result<QuadratureRule, DomainError> {
    if n_r < 2 || n_t < 4 || !(r_out > r_in) || r_in < 0.0 {
        return Err(DomainError::InvalidOrder(n_r, n_t));
    }
    let gl = gauss_legendre(n_r, r_in, r_out);
    let dt = 2.0 * PI / n_t as f64;
    let mut rule = QuadratureRule {
        nodes: Vec::with_capacity(n_r * n_t),
        weights: Vec::with_capacity(n_r * n_t),
        kind: QuadKind::Area,
        ref_nodes: Vec::with_capacity(n_r * n_t),
        ref_weights: Vec::with_capacity(n_r * n_t),
    };
    for &(r, wr) in &gl {
        for j in 0..n_t {
            let zeta = C::from_polar(r, (j as f64 + 0.5) * dt);
            let wref = wr * r * dt;
            rule.ref_nodes.push(zeta);
            rule.ref_weights.push(wref);
            rule.nodes.push(dom.eval(zeta));
            rule.weights.push(wref * dom.deriv(zeta).norm_sqr());
        }
    }
    Ok(rule)
}

/// Area rule on `Ω = f(𝔻)`.
pub fn area_quadrature(dom: &ConformalDomain, n_r: usize, n_t: usize) -> Result<QuadratureRule, DomainError> {
    annulus_quadrature(dom, 0.0, 1.0, n_r, n_t)
}

/// Samples of `f` on `|ζ| = e^{−s}` with tangents `dw/dθ`.
#[derive(Debug, Clone)]
pub struct LevelCurve {
    pub s: f64,
    pub samples: Vec<C>,
    pub tangents: Vec<C>,
    pub zetas: Vec<C>,
}

impl LevelCurve {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// The image of `|ζ| = e^{−s}`; negative `s` gives curves outside `Ω`.
pub fn chart_circle(dom: &ConformalDomain, s: f64, m: usize) -> LevelCurve {
    let r = (-s).exp();
    let zetas: Vec<C> = (0..m).map(|j| C::from_polar(r, 2.0 * PI * j as f64 / m as f64)).collect();
    let samples = zetas.iter().map(|&z| dom.eval(z)).collect();
    let tangents = zetas.iter().map(|&z| C::i() * z * dom.deriv(z)).collect();
    LevelCurve { s, samples, tangents, zetas }
}

/// Level curve `{g_Ω(·, p) = s}` sampled at `m` equispaced parameters.
pub fn level_curve(dom: &ConformalDomain, s: f64, m: usize) -> Result<LevelCurve, DomainError> {
    if s < 0.0 || m < 4 {
        return Err(DomainError::InvalidOrder(0, m));
    }
    Ok(chart_circle(dom, s, m))
}

/// Trapezoid rule for `∮ F(w) dw` over the curve.
pub fn contour_integral(curve: &LevelCurve, integrand: &[C]) -> Result<C, DomainError> {
    if integrand.len() != curve.len() {
        return Err(DomainError::LengthMismatch { expected: curve.len(), got: integrand.len() });
    }
    let dt = 2.0 * PI / curve.len() as f64;
    Ok(integrand.iter().zip(&curve.tangents).map(|(f, t)| f * t).sum::<C>() * dt)
}

/// The collar `f({e^{−ε} < |ζ| < 1})` inside `Ω`.
#[derive(Debug, Clone)]
pub struct Collar {
    pub domain: ConformalDomain,
    pub eps: f64,
}

pub fn collar(dom: &ConformalDomain, eps: f64) -> Result<Collar, DomainError> {
    if !(eps > 0.0) {
        return Err(DomainError::InvalidEps(eps));
    }
    Ok(Collar { domain: dom.clone(), eps })
}

impl Collar {
    pub fn inner_radius(&self) -> f64 {
        (-self.eps).exp()
    }

    pub fn outer_curve(&self, m: usize) -> LevelCurve {
        chart_circle(&self.domain, 0.0, m)
    }

    pub fn inner_curve(&self, m: usize) -> LevelCurve {
        chart_circle(&self.domain, self.eps, m)
    }

    pub fn area_quadrature(&self, n_r: usize, n_t: usize) -> Result<QuadratureRule, DomainError> {
        annulus_quadrature(&self.domain, self.inner_radius(), 1.0, n_r, n_t)
    }

    pub fn contains(&self, z: C) -> bool {
        match self.domain.inverse(z) {
            Ok(zeta) => zeta.norm() < 1.0 && zeta.norm() > self.inner_radius(),
            Err(_) => false,
        }
    }
}

/// The representative of `z` closest to the chart of domain `k`.
pub fn chart_point(cfg: &SurfaceConfig, k: usize, z: C) -> C {
    let c = cfg.domains[k].base_point();
    c + cfg.surface.reduce(z - c).0
}

/// Gauss–Legendre rule on the period parallelogram `{a + bτ : 0 ≤ a, b ≤ 1}`.
pub fn fundamental_domain_quadrature(tau: C, n: usize) -> Result<QuadratureRule, DomainError> {
    if n < 2 {
        return Err(DomainError::InvalidOrder(n, n));
    }
    let gl = gauss_legendre(n, 0.0, 1.0);
    let mut nodes = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for &(a, wa) in &gl {
        for &(b, wb) in &gl {
            nodes.push(C::new(a, 0.0) + tau * b);
            weights.push(wa * wb * tau.im);
        }
    }
    Ok(QuadratureRule { ref_nodes: nodes.clone(), ref_weights: weights.clone(), nodes, weights, kind: QuadKind::Area })
}

/// Concentric open regions centred at the origin, used for nested-region experiments.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OpenRegion {
    Disk { r: f64 },
    Annulus { r1: f64, r2: f64 },
}

impl OpenRegion {
    pub fn inner(&self) -> f64 {
        match *self {
            OpenRegion::Disk { .. } => 0.0,
            OpenRegion::Annulus { r1, .. } => r1,
        }
    }

    pub fn outer(&self) -> f64 {
        match *self {
            OpenRegion::Disk { r } => r,
            OpenRegion::Annulus { r2, .. } => r2,
        }
    }

    pub fn contains(&self, z: C) -> bool {
        let r = z.norm();
        r < self.outer() && (matches!(self, OpenRegion::Disk { .. }) || r > self.inner())
    }

    /// True when the closure of `self` lies inside `other`.
    pub fn closure_inside(&self, other: &OpenRegion) -> bool {
        let inner_ok = match (self, other) {
            (_, OpenRegion::Disk { .. }) => true,
            (OpenRegion::Disk { .. }, OpenRegion::Annulus { .. }) => false,
            (OpenRegion::Annulus { r1, .. }, OpenRegion::Annulus { r1: s1, .. }) => r1 > s1,
        };
        inner_ok && self.outer() < other.outer()
    }

    pub fn area(&self) -> f64 {
        PI * (self.outer().powi(2) - self.inner().powi(2))
    }

    pub fn quadrature(&self, n_r: usize, n_t: usize) -> Result<QuadratureRule, DomainError> {
        let id = ConformalDomain::disk("chart", C::new(0.0, 0.0), 1.0);
        annulus_quadrature(&id, self.inner(), self.outer(), n_r, n_t)
    }
}

/// Winding number of the closed polyline `curve` around `z`.
pub fn winding_number(curve: &[C], z: C) -> i64 {
    let m = curve.len();
    let mut total = 0.0;
    for i in 0..m {
        total += ((curve[(i + 1) % m] - z) / (curve[i] - z)).arg();
    }
    (total / (2.0 * PI)).round() as i64
}

/// Largest radius `r` among `candidates` for which the annulus between `|ζ| = 1`
/// and `|ζ| = r` keeps every point of `inside` and `outside` on its side, i.e.
/// `f(r·S¹)` winds once around each `inside` point and not around `outside` points.
/// Falls back to `1`.
pub fn deformation_radius(dom: &ConformalDomain, candidates: &[f64], inside: &[C], outside: &[C], m: usize) -> f64 {
    'cand: for &r in candidates {
        let curve = dom.circle_image(r, m);
        for &z in inside {
            if winding_number(&curve, z) != 1 || min_distance(&curve, z) < 1e-3 * dom.radius() {
                continue 'cand;
            }
        }
        for &z in outside {
            if winding_number(&curve, z) != 0 || min_distance(&curve, z) < 1e-3 * dom.radius() {
                continue 'cand;
            }
        }
        return r;
    }
    1.0
}

/// Quadrature orders shared by every operator on a configuration.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Discretization {
    pub n_r: usize,
    pub n_t: usize,
    #[serde(rename = "M")]
    pub m: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Discretization { n_r: 48, n_t: 256, m: 256 }
    }
}

/// Where a point of the surface lies relative to the cut system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Omega { k: usize, zeta: C },
    Sigma,
}

/// A configuration together with its quadrature rules.
#[derive(Debug, Clone)]
pub struct Workspace {
    pub cfg: SurfaceConfig,
    pub disc: Discretization,
    pub area: Vec<QuadratureRule>,
    pub boundary: Vec<LevelCurve>,
}

impl Workspace {
    pub fn new(cfg: SurfaceConfig, disc: Discretization) -> Result<Self, DomainError> {
        let area = cfg
            .domains
            .iter()
            .map(|d| area_quadrature(d, disc.n_r, disc.n_t))
            .collect::<Result<Vec<_>, _>>()?;
        let boundary = cfg.domains.iter().map(|d| chart_circle(d, 0.0, disc.m)).collect();
        Ok(Workspace { cfg, disc, area, boundary })
    }

    pub fn surface(&self) -> &SurfaceModel {
        &self.cfg.surface
    }

    pub fn domain(&self, k: usize) -> &ConformalDomain {
        &self.cfg.domains[k]
    }

    pub fn n(&self) -> usize {
        self.cfg.domains.len()
    }

    pub fn chart_point(&self, k: usize, z: C) -> C {
        chart_point(&self.cfg, k, z)
    }

    pub fn locate(&self, z: C) -> Location {
        for k in 0..self.n() {
            let zc = self.chart_point(k, z);
            if inside_polygon(&self.boundary[k].samples, zc) {
                if let Ok(zeta) = self.domain(k).inverse(zc) {
                    return Location::Omega { k, zeta };
                }
            }
        }
        Location::Sigma
    }

    /// Distance from `z` to `Γ_k` in units of the domain's radius.
    pub fn separation(&self, k: usize, z: C) -> f64 {
        let zc = self.chart_point(k, z);
        min_distance(&self.boundary[k].samples, zc) / self.domain(k).radius()
    }

    pub fn min_separation(&self, z: C) -> f64 {
        (0..self.n()).map(|k| self.separation(k, z)).fold(f64::INFINITY, f64::min)
    }

    /// Relative distance to `Γ` below which area quadrature is refused.
    pub fn exclusion(&self) -> f64 {
        5.0 * 2.0 * PI / self.disc.n_t as f64
    }
}
