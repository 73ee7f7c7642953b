//! JSON configuration files and their validation.

use num_complex::Complex64 as C;
use schiffer_core::domains::{validate_config, ConformalDomain, Discretization, OpenRegion, SurfaceConfig};
use schiffer_core::surface_models::SurfaceModel;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pair(pub f64, pub f64);

impl From<Pair> for C {
    fn from(p: Pair) -> C {
        C::new(p.0, p.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Sphere,
    Torus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    #[serde(default)]
    pub tau: Option<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub label: String,
    pub coeffs: Vec<Pair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    #[default]
    Function,
    Form,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    #[default]
    Dense,
    Obstructed,
}

/// A nested triple `Σ ⊆ Σ″ ⊆ Σ′` with a monomial target on `Σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleSpec {
    pub label: String,
    pub sigma: OpenRegion,
    pub sigma_dprime: OpenRegion,
    pub sigma_prime: OpenRegion,
    #[serde(default)]
    pub kind: TargetKind,
    /// Exponent `p` of the target `z^p` (function) or `z^p dz` (form).
    #[serde(default)]
    pub target_power: Option<i32>,
    /// Pole `a` of the target `1/(z − a)` (function) or `dz/(z − a)` (form); overrides `target_power`.
    #[serde(default)]
    pub target_pole: Option<Pair>,
    #[serde(default)]
    pub expect: Expectation,
}

impl TripleSpec {
    pub fn power(&self) -> i32 {
        self.target_power.unwrap_or(match self.kind {
            TargetKind::Function => -1,
            TargetKind::Form => -2,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub identity: f64,
    pub closed_form: f64,
    pub left_inverse: f64,
    pub surjectivity: f64,
    pub v_defect: f64,
    pub adjoint: f64,
    pub density: f64,
    pub counterexample: f64,
    pub form_density: f64,
    pub periodicity: f64,
    pub norm: f64,
    pub bergman: f64,
    pub cdjo: f64,
    pub s_min: f64,
    pub singular_floor: f64,
    pub isometry: f64,
    pub stokes: f64,
    pub both_sides: f64,
    pub average: f64,
    pub transmitted: f64,
    pub jump: f64,
    pub uniqueness: f64,
    pub level_limit: f64,
    pub base_points: f64,
    pub extension: f64,
    pub xeps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-6,
            closed_form: 1e-9,
            left_inverse: 1e-6,
            surjectivity: 1e-6,
            v_defect: 1e-8,
            adjoint: 1e-7,
            density: 1e-6,
            counterexample: 1e-2,
            form_density: 1e-8,
            periodicity: 1e-10,
            norm: 1e-10,
            bergman: 1e-8,
            cdjo: 1e-8,
            s_min: 1e-3,
            singular_floor: 1e-10,
            isometry: 1e-8,
            stokes: 1e-8,
            both_sides: 1e-7,
            average: 1e-8,
            transmitted: 1e-6,
            jump: 1e-6,
            uniqueness: 1e-8,
            level_limit: 1e-5,
            base_points: 1e-8,
            extension: 1e-9,
            xeps: 1e-3,
        }
    }
}

impl Tolerances {
    pub fn uniform(t: f64) -> Self {
        Tolerances {
            identity: t,
            closed_form: t,
            left_inverse: t,
            surjectivity: t,
            v_defect: t,
            adjoint: t,
            density: t,
            counterexample: t,
            form_density: t,
            periodicity: t,
            norm: t,
            bergman: t,
            cdjo: t,
            s_min: t,
            singular_floor: t,
            isometry: t,
            stokes: t,
            both_sides: t,
            average: t,
            transmitted: t,
            jump: t,
            uniqueness: t,
            level_limit: t,
            base_points: t,
            extension: t,
            xeps: t,
        }
    }

    fn values(&self) -> [(&'static str, f64); 26] {
        [
            ("identity", self.identity),
            ("closed_form", self.closed_form),
            ("left_inverse", self.left_inverse),
            ("surjectivity", self.surjectivity),
            ("v_defect", self.v_defect),
            ("adjoint", self.adjoint),
            ("density", self.density),
            ("counterexample", self.counterexample),
            ("form_density", self.form_density),
            ("periodicity", self.periodicity),
            ("norm", self.norm),
            ("bergman", self.bergman),
            ("cdjo", self.cdjo),
            ("s_min", self.s_min),
            ("singular_floor", self.singular_floor),
            ("isometry", self.isometry),
            ("stokes", self.stokes),
            ("both_sides", self.both_sides),
            ("average", self.average),
            ("transmitted", self.transmitted),
            ("jump", self.jump),
            ("uniqueness", self.uniqueness),
            ("level_limit", self.level_limit),
            ("base_points", self.base_points),
            ("extension", self.extension),
            ("xeps", self.xeps),
        ]
    }
}

fn default_epsilon() -> f64 {
    0.2
}

fn default_truncation() -> usize {
    8
}

/// The on-disk configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub surface: Option<SurfaceSpec>,
    #[serde(default)]
    pub domains: Vec<DomainSpec>,
    #[serde(default)]
    pub q: Option<Pair>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default)]
    pub quadrature: Discretization,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub density: Vec<TripleSpec>,
}

#[derive(Debug)]
pub enum LoadError {
    Io(std::io::Error),
    Parse(serde_json::Error),
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadError::Io(e) => write!(f, "cannot read config: {e}"),
            LoadError::Parse(e) => write!(f, "cannot parse config: {e}"),
        }
    }
}

/// Reads a config and returns it with its raw bytes (for hashing).
pub fn load(path: &Path) -> Result<(ConfigFile, Vec<u8>), LoadError> {
    let bytes = std::fs::read(path).map_err(LoadError::Io)?;
    let cfg = serde_json::from_slice(&bytes).map_err(LoadError::Parse)?;
    Ok((cfg, bytes))
}

fn region_subset(a: &OpenRegion, b: &OpenRegion) -> bool {
    let inner_ok = match (a, b) {
        (_, OpenRegion::Disk { .. }) => true,
        (OpenRegion::Disk { .. }, OpenRegion::Annulus { .. }) => false,
        (OpenRegion::Annulus { r1, .. }, OpenRegion::Annulus { r1: s1, .. }) => r1 >= s1,
    };
    inner_ok && a.outer() <= b.outer()
}

fn region_ok(r: &OpenRegion) -> bool {
    match *r {
        OpenRegion::Disk { r } => r > 0.0 && r.is_finite(),
        OpenRegion::Annulus { r1, r2 } => r1 > 0.0 && r2 > r1 && r2.is_finite(),
    }
}

impl ConfigFile {
    /// The surface part, if present.
    pub fn surface_config(&self) -> Option<SurfaceConfig> {
        let spec = self.surface.as_ref()?;
        let surface = match spec.kind {
            SurfaceKind::Sphere => SurfaceModel::sphere(),
            SurfaceKind::Torus => SurfaceModel::torus(spec.tau.map(C::from).unwrap_or(C::new(0.0, 1.0))).ok()?,
        };
        Some(SurfaceConfig {
            surface,
            domains: self.domains.iter().map(|d| ConformalDomain::new(d.label.clone(), d.coeffs.iter().map(|&p| p.into()).collect())).collect(),
            q: self.q.map(C::from).unwrap_or_default(),
            epsilon: self.epsilon,
        })
    }

    /// Every violated invariant, as human-readable lines.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.truncation < 2 {
            v.push(format!("truncation {} is below 2", self.truncation));
        }
        for (name, t) in self.tolerances.values() {
            if !(t > 0.0 && t.is_finite()) {
                v.push(format!("tolerance {name} = {t} is not positive"));
            }
        }
        let d = self.quadrature;
        if d.n_r < 2 || d.n_t < 4 || d.m < 4 {
            v.push(format!("quadrature orders {d:?} are too small"));
        }
        if self.surface.is_none() && self.density.is_empty() {
            v.push("config has neither a surface nor density triples".into());
        }
        if let Some(spec) = &self.surface {
            if spec.kind == SurfaceKind::Torus {
                let tau = spec.tau.map(C::from).unwrap_or(C::new(0.0, 1.0));
                if tau.im <= 0.0 {
                    v.push(format!("tau {tau} is not in the upper half-plane"));
                }
            }
            if self.q.is_none() {
                v.push("surface config without anchor q".into());
            }
            if self.domains.iter().any(|d| d.coeffs.len() < 2) {
                v.push("every domain needs at least two coefficients".into());
            }
            match self.surface_config() {
                Some(cfg) if v.is_empty() => v.extend(validate_config(&cfg).iter().map(|x| x.to_string())),
                Some(_) => {}
                None => v.push("surface could not be constructed".into()),
            }
        }
        for t in &self.density {
            for (name, r) in [("sigma", &t.sigma), ("sigma_dprime", &t.sigma_dprime), ("sigma_prime", &t.sigma_prime)] {
                if !region_ok(r) {
                    v.push(format!("triple {}: {name} {r:?} is not a valid region", t.label));
                }
            }
            if !region_subset(&t.sigma, &t.sigma_dprime) || !region_subset(&t.sigma_dprime, &t.sigma_prime) || !t.sigma.closure_inside(&t.sigma_prime) {
                v.push(format!("triple {}: nesting violation", t.label));
            }
            if let Some(a) = t.target_pole {
                let r = C::from(a).norm();
                if r >= t.sigma.inner() && r <= t.sigma.outer() {
                    v.push(format!("triple {}: target pole lies in the closure of sigma", t.label));
                }
                if t.expect == Expectation::Obstructed {
                    v.push(format!("triple {}: obstructed triples need a monomial target", t.label));
                }
            }
        }
        v
    }
}

/// Settings shared by every suite of one run.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub truncation: usize,
    pub disc: Discretization,
    pub tol: Tolerances,
    pub seed: u64,
}
