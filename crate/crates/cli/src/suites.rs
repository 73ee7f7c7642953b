//! Experiment suites. Each suite appends named checks and tables to a [`Recorder`].

use crate::config::{Expectation, RunSettings, TargetKind, Tolerances, TripleSpec};
use crate::report::Recorder;
use anyhow::{anyhow, Result};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use schiffer_core::boundary_transmission::{bounce, transmit_exact_forms, transmit_to_omega, transmit_to_sigma};
use schiffer_core::domains::{fundamental_domain_quadrature, ConformalDomain, Discretization, Location, OpenRegion, SurfaceConfig, Workspace};
use schiffer_core::jump::{
    apply_dbar_j, apply_dj, apply_j, apply_j_base_points, apply_j_bounced, apply_j_level, apply_j_prime, extension_collar_check,
    jump_inverse_check, jump_solve, project_w, xeps_density_residuals,
};
use schiffer_core::linalg::lstsq;
use schiffer_core::schiffer_ops::{
    adjoint_check, apply_s_bar_compact, apply_s_compact, apply_t, assemble_section, laurent_norm_sq, left_inverse_residual, preimage_v_defect,
    restriction, surjectivity_preimage, t_sigma_form, SectionOp, Target,
};
use schiffer_core::spaces::{
    dirichlet_inner_disk, sigma_holomorphic_basis, split_harmonic, v_defect, w_defect, w_defect_level, Chirality, FormExpansion,
    HarmonicExpansion, Region, SigmaElement, SigmaFunction,
};
use schiffer_core::surface_models::{bergman_kernel_compact, compact_holomorphic_basis, green_function, SurfaceModel};
use std::f64::consts::PI;
use std::time::Instant;

/// Modes per domain in random test data.
const DATA_MODES: usize = 6;
/// Modes kept by transmissions and solver re-expansions.
const FIT_MODES: usize = 40;
/// Modes kept by the jump solver in random-data checks.
const SOLVE_MODES: usize = 16;
/// Points per region in the pointwise grids.
const GRID: usize = 50;
/// Points used by the cheaper linearity checks.
const SUBGRID: usize = 10;
/// Smallest relative distance of a `Σ` grid point to `Γ`.
const SIGMA_MARGIN: f64 = 0.3;
/// Largest chart radius of an `Ω_k` grid point.
const OMEGA_RADIUS: f64 = 0.8;
const SWEEP: [usize; 4] = [4, 8, 12, 16];
/// Allowed growth of a residual between consecutive truncations.
const ROUNDOFF: f64 = 1e-12;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn zero() -> C {
    C::new(0.0, 0.0)
}

pub fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn rc(rng: &mut ChaCha8Rng) -> C {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn max_over<F>(pts: &[C], f: F) -> Result<f64>
where
    F: Fn(C) -> Result<f64> + Sync + Send,
{
    let v: Vec<f64> = pts.par_iter().map(|&z| f(z)).collect::<Result<_>>()?;
    Ok(v.into_iter().fold(0.0, f64::max))
}

fn fmax(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

/// A surface configuration with its seeded evaluation grids.
pub struct SurfaceRun<'a> {
    pub ws: &'a Workspace,
    pub set: &'a RunSettings,
    pub sigma: Vec<C>,
    /// `(z, ζ)` pairs per domain.
    pub omega: Vec<Vec<(C, C)>>,
}

impl<'a> SurfaceRun<'a> {
    pub fn new(ws: &'a Workspace, set: &'a RunSettings) -> Result<Self> {
        let mut r = rng(set.seed, 0);
        let sigma = sigma_grid(ws, &mut r, GRID);
        if sigma.len() < GRID {
            return Err(anyhow!("could not place {GRID} grid points in Σ"));
        }
        let omega = (0..ws.n())
            .map(|k| {
                let dom = ws.domain(k);
                (0..GRID)
                    .map(|_| {
                        let zeta = C::from_polar(OMEGA_RADIUS * r.gen::<f64>().sqrt(), 2.0 * PI * r.gen::<f64>());
                        (dom.eval(zeta), zeta)
                    })
                    .collect()
            })
            .collect();
        Ok(SurfaceRun { ws, set, sigma, omega })
    }

    fn cfg(&self) -> &SurfaceConfig {
        &self.ws.cfg
    }

    fn tol(&self) -> &Tolerances {
        &self.set.tol
    }

    fn sub_sigma(&self) -> &[C] {
        &self.sigma[..SUBGRID]
    }

    fn omega_z(&self, k: usize, count: usize) -> Vec<C> {
        self.omega[k].iter().take(count).map(|p| p.0).collect()
    }

    fn all_points(&self) -> Vec<C> {
        let mut v = self.sigma.clone();
        for k in 0..self.ws.n() {
            v.extend(self.omega_z(k, GRID));
        }
        v
    }

    fn m(&self) -> usize {
        self.ws.disc.m
    }
}

fn sigma_grid(ws: &Workspace, r: &mut ChaCha8Rng, count: usize) -> Vec<C> {
    let cfg = &ws.cfg;
    let torus = cfg.surface.is_torus();
    let (mut lo, mut hi) = (c(f64::INFINITY, f64::INFINITY), c(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for d in &cfg.domains {
        let (b, rad) = (d.base_point(), 2.5 * d.radius());
        lo = c(lo.re.min(b.re - rad), lo.im.min(b.im - rad));
        hi = c(hi.re.max(b.re + rad), hi.im.max(b.im + rad));
    }
    let mut pts = Vec::with_capacity(count);
    let mut tries = 0;
    while pts.len() < count && tries < 200_000 {
        tries += 1;
        let z = if torus {
            c(r.gen::<f64>(), 0.0) + cfg.surface.tau * r.gen::<f64>()
        } else {
            c(r.gen_range(lo.re..hi.re), r.gen_range(lo.im..hi.im))
        };
        if ws.locate(z) == Location::Sigma && ws.min_separation(z) >= SIGMA_MARGIN && (z - cfg.q).norm() > 1e-3 {
            pts.push(z);
        }
    }
    pts
}

fn random_h_decay(cfg: &SurfaceConfig, r: &mut ChaCha8Rng, n: usize, decay: f64) -> Vec<HarmonicExpansion> {
    (0..cfg.n())
        .map(|k| {
            let holo = (1..=n).map(|p| rc(r) * decay.powi(p as i32)).collect();
            let anti = (1..=n).map(|p| rc(r) * decay.powi(p as i32)).collect();
            HarmonicExpansion::disk(k, holo, anti, rc(r))
        })
        .collect()
}

fn random_h(cfg: &SurfaceConfig, r: &mut ChaCha8Rng) -> Vec<HarmonicExpansion> {
    random_h_decay(cfg, r, DATA_MODES, 0.6)
}

fn random_anti(cfg: &SurfaceConfig, r: &mut ChaCha8Rng) -> Vec<HarmonicExpansion> {
    (0..cfg.n())
        .map(|k| HarmonicExpansion::disk(k, vec![], (1..=DATA_MODES).map(|p| rc(r) * 0.6f64.powi(p as i32)).collect(), zero()))
        .collect()
}

fn random_holo(cfg: &SurfaceConfig, r: &mut ChaCha8Rng, n: usize, decay: f64) -> Vec<HarmonicExpansion> {
    (0..cfg.n()).map(|k| HarmonicExpansion::disk(k, (1..=n).map(|p| rc(r) * decay.powi(p as i32)).collect(), vec![], rc(r))).collect()
}

fn random_abar(cfg: &SurfaceConfig, r: &mut ChaCha8Rng) -> Vec<FormExpansion> {
    (0..cfg.n())
        .map(|k| FormExpansion::disk(k, Chirality::AntiHolo, (0..DATA_MODES).map(|p| rc(r) * 0.6f64.powi(p as i32)).collect()))
        .collect()
}

fn random_sigma_holo(cfg: &SurfaceConfig, r: &mut ChaCha8Rng, n: usize) -> SigmaFunction {
    let terms = sigma_holomorphic_basis(cfg, n)
        .into_iter()
        .map(|e| {
            let scale = match e {
                SigmaElement::Pole { m, .. } => 0.5f64.powi(m as i32),
                _ => 0.5,
            };
            (e, rc(r) * scale)
        })
        .collect();
    SigmaFunction::new(terms)
}

fn only(h: &[HarmonicExpansion], k: usize) -> Vec<HarmonicExpansion> {
    h.iter()
        .enumerate()
        .map(|(j, x)| if j == k { x.clone() } else { x.scale(zero()) })
        .collect()
}

fn only_form(a: &[FormExpansion], k: usize) -> Vec<FormExpansion> {
    a.iter().enumerate().map(|(j, x)| if j == k { x.clone() } else { x.scale(zero()) }).collect()
}

fn split_all(h: &[HarmonicExpansion]) -> (Vec<FormExpansion>, Vec<FormExpansion>) {
    h.iter().map(split_harmonic).unzip()
}

/// Collar data `Σ a_p ζ^p`, `p ∈ {−3..3} \ {0}`; in `X_ε` when `in_x` (torus: `Σ_k ρ_k a_{k,−1} = 0`).
fn collar_data(cfg: &SurfaceConfig, r: &mut ChaCha8Rng, in_x: bool) -> Vec<HarmonicExpansion> {
    let powers = vec![-3, -2, -1, 1, 2, 3];
    let mut coeffs: Vec<Vec<C>> = (0..cfg.n()).map(|_| powers.iter().map(|&p: &i32| rc(r) * 0.5f64.powi(p.abs())).collect()).collect();
    if cfg.surface.is_torus() {
        let s: C = (0..cfg.n()).map(|k| coeffs[k][2] * cfg.domains[k].radius()).sum();
        coeffs[0][2] -= s / cfg.domains[0].radius();
        if !in_x {
            coeffs[0][2] += c(0.3, 0.0);
        }
    }
    coeffs
        .into_iter()
        .enumerate()
        .map(|(k, a)| HarmonicExpansion::laurent(Region::Collar(k), powers.clone(), a, vec![zero(); 6], rc(r), zero()))
        .collect()
}

fn max_over_omega<F>(run: &SurfaceRun, count: usize, f: F) -> Result<f64>
where
    F: Fn(usize, C, C) -> Result<f64> + Sync + Send,
{
    let mut m: f64 = 0.0;
    for k in 0..run.ws.n() {
        let pts: Vec<(C, C)> = run.omega[k].iter().take(count).copied().collect();
        let v: Vec<f64> = pts.par_iter().map(|&(z, zeta)| f(k, z, zeta)).collect::<Result<_>>()?;
        m = m.max(fmax(v));
    }
    Ok(m)
}

/// Identity audit: derivative identities, sum decompositions, transmission
/// identities, `W` membership, and torus foundations.
pub fn identities(run: &SurfaceRun, rec: &mut Recorder) {
    let ws = run.ws;
    let cfg = run.cfg();
    let tol = *run.tol();
    let neg = Tolerances::default();
    let m = run.m();
    let mut r = rng(run.set.seed, 1);
    let h = random_h(cfg, &mut r);
    let (beta, abar) = split_all(&h);
    let djo = if cfg.n() == 1 { "eq:derivative_J_identities" } else { "DJO" };

    let line1 = max_over(&run.sigma, |z| Ok((apply_dj(ws, &h, z)? + apply_t(ws, &abar, Target::Sigma, z)?).norm()));
    rec.below_or_err("djo_line1_sigma", djo, line1, tol.identity);
    let line2 = max_over_omega(run, GRID, |j, z, _| {
        let lhs = apply_dj(ws, &h, z)?;
        let rhs = -apply_t(ws, &abar, Target::Omega(j), z)? + beta[j].eval_surface(cfg, z)?;
        Ok((lhs - rhs).norm())
    });
    rec.below_or_err("djo_line2_omega", djo, line2, tol.identity);
    let line3 = apply_s_bar_compact(ws, &abar).map_err(anyhow::Error::from).and_then(|s| {
        let sbar = s.first().copied().unwrap_or_default();
        max_over(&run.all_points(), |z| Ok((apply_dbar_j(ws, &h, z)? - sbar).norm()))
    });
    rec.below_or_err("djo_line3_all_regions", djo, line3, tol.identity);
    // σ_T flipped: T → −T
    match max_over(&run.sigma, |z| Ok((apply_dj(ws, &h, z)? - apply_t(ws, &abar, Target::Sigma, z)?).norm())) {
        Ok(v) => rec.at_least("djo_line1_flipped_sign_control", djo, v, neg.identity, "SignConventionViolation detected"),
        Err(e) => rec.error("djo_line1_flipped_sign_control", djo, neg.identity, e),
    }

    let cdjo = project_w(cfg, &h)
        .map_err(anyhow::Error::from)
        .and_then(|hw| max_over(&run.all_points(), |z| Ok(apply_dbar_j(ws, &hw, z)?.norm())));
    rec.below_or_err("cdjo_dbar_vanishes_on_w", "CDJO", cdjo, tol.cdjo);
    if cfg.surface.is_torus() {
        match max_over(&run.all_points(), |z| Ok(apply_dbar_j(ws, &h, z)?.norm())) {
            Ok(v) => rec.at_least("cdjo_unconstrained_control", "CDJO", v, neg.cdjo, "v_defect ≠ 0 breaks holomorphy as expected"),
            Err(e) => rec.error("cdjo_unconstrained_control", "CDJO", neg.cdjo, e),
        }
    }

    let tosig = max_over(run.sub_sigma(), |z| {
        let full = apply_t(ws, &abar, Target::Sigma, z)?;
        let mut parts = zero();
        for k in 0..cfg.n() {
            parts += apply_t(ws, &only_form(&abar, k), Target::Sigma, z)?;
        }
        Ok((full - parts).norm())
    });
    rec.below_or_err("t_sigma_sum_over_domains", "eq:TOsig_sum", tosig, tol.identity);
    let toomega = max_over_omega(run, SUBGRID, |j, z, _| {
        let full = apply_t(ws, &abar, Target::Omega(j), z)?;
        let mut parts = zero();
        for k in 0..cfg.n() {
            parts += apply_t(ws, &only_form(&abar, k), Target::Omega(j), z)?;
        }
        Ok((full - parts).norm())
    });
    rec.below_or_err("t_omega_sum_over_domains", "eq:TOOmega_sum", toomega, tol.identity);
    let je = max_over(run.sub_sigma(), |z| {
        let full = apply_j(ws, &h, z)?;
        let mut parts = zero();
        for k in 0..cfg.n() {
            parts += apply_j(ws, &only(&h, k), z)?;
        }
        Ok((full - parts).norm())
    });
    rec.below_or_err("j_sum_over_curves", "JE", je, tol.identity);

    let alpha: Vec<FormExpansion> = abar
        .iter()
        .map(|a| FormExpansion { chirality: Chirality::Holo, coeffs: a.coeffs.iter().map(|x| x.conj()).collect(), ..a.clone() })
        .collect();
    let conj = (|| -> Result<f64> {
        let sb = apply_s_bar_compact(ws, &abar)?;
        let s = apply_s_compact(ws, &alpha)?;
        Ok(fmax(sb.iter().zip(&s).map(|(x, y)| (x - y.conj()).norm())))
    })();
    rec.below_or_err("s_bar_is_conjugate_of_s", "eq:conjugate_definition", conj, tol.identity);
    let sor = (|| -> Result<f64> {
        let full = apply_s_compact(ws, &alpha)?;
        let mut parts = vec![zero(); full.len()];
        for k in 0..cfg.n() {
            for (p, v) in parts.iter_mut().zip(apply_s_compact(ws, &only_form(&alpha, k))?) {
                *p += v;
            }
        }
        Ok(fmax(full.iter().zip(&parts).map(|(x, y)| (x - y).norm())))
    })();
    rec.below_or_err("s_compact_sum_over_domains", "eq:SOR_sum", sor, tol.identity);

    let stokes = (|| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let x = random_h(cfg, &mut r);
            let a = w_defect(cfg, &x)?;
            let b = w_defect_level(cfg, &x, 0.0, m)?;
            worst = worst.max(fmax(a.iter().zip(&b).map(|(u, v)| (u - v).norm())));
        }
        Ok(worst)
    })();
    rec.below_or_err("w_defect_area_vs_contour", "eq:jump_condition_doubleintegral", stokes, tol.stokes);

    let anti = project_w(cfg, &random_anti(cfg, &mut r));
    let vbc = anti.as_ref().map_err(|e| anyhow!("{e}")).and_then(|hb| {
        let mut worst: f64 = 0.0;
        for x in hb.iter() {
            let dn = dirichlet_inner_disk(x, x)?.re;
            let fnorm = split_harmonic(x).1.disk_norm_sq();
            worst = worst.max((dn - fnorm).abs() / dn.max(1e-300));
        }
        Ok(worst)
    });
    rec.below_or_err("dbar_preserves_norm_on_w_prime", "VBC", vbc, tol.isometry);
    let vbc_v = anti.as_ref().map_err(|e| anyhow!("{e}")).and_then(|hb| {
        let a: Vec<FormExpansion> = hb.iter().map(|x| split_harmonic(x).1).collect();
        Ok(fmax(v_defect(cfg, &a)?.iter().map(|v| v.norm())))
    });
    rec.below_or_err("dbar_maps_w_prime_into_v", "VBC", vbc_v, tol.v_defect);

    let tmc = (|| -> Result<f64> {
        let hs = random_sigma_holo(cfg, &mut r, 4);
        let mut worst: f64 = 0.0;
        for k in 0..cfg.n() {
            worst = worst.max(transmit_to_omega(cfg, &hs, k, FIT_MODES, m)?.residual);
        }
        Ok(worst)
    })();
    rec.below_or_err("transmission_trace_match", "TMC", tmc, tol.identity);

    let nbv = (|| -> Result<f64> {
        let hs = random_sigma_holo(cfg, &mut r, 4);
        let ho: Vec<HarmonicExpansion> = (0..cfg.n()).map(|k| Ok(transmit_to_omega(cfg, &hs, k, FIT_MODES, m)?.value)).collect::<Result<_>>()?;
        let hq = hs.value(cfg, cfg.q)?;
        max_over(&run.sigma, |z| Ok((apply_j(ws, &ho, z)? + hs.value(cfg, z)? - hq).norm()))
    })();
    rec.below_or_err("j_of_transmitted_sigma_function", "NBV", nbv, tol.identity);

    let tj = anti.as_ref().map_err(|e| anyhow!("{e}")).and_then(|hb| {
        let sol = jump_solve(ws, hb, FIT_MODES)?;
        let t: Vec<HarmonicExpansion> = (0..cfg.n()).map(|j| Ok(transmit_to_omega(cfg, &sol.h_sigma, j, FIT_MODES, m)?.value)).collect::<Result<_>>()?;
        max_over_omega(run, SUBGRID, |j, z, zeta| Ok((-t[j].eval_chart(zeta) - hb[j].eval_chart(zeta) + apply_j(ws, hb, z)?).norm()))
    });
    rec.below_or_err("transmitted_jump_on_w_prime", "th:transmitted_jump", tj, tol.transmitted);

    let good = collar_data(cfg, &mut r, true);
    let avg = (|| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for u in &good {
            let g = bounce(u, FIT_MODES, m)?.value;
            for j in 0..4 {
                let (mut a, mut b) = (zero(), zero());
                for i in 0..m {
                    let zeta = C::from_polar(1.0, 2.0 * PI * i as f64 / m as f64);
                    let w = zeta.powi(j) * C::i() * zeta;
                    a += u.eval_chart(zeta) * w;
                    b += g.eval_chart(zeta) * w;
                }
                worst = worst.max(((a - b) * (2.0 * PI / m as f64)).norm());
            }
        }
        Ok(worst)
    })();
    rec.below_or_err("bounce_preserves_boundary_averages", "eq:forms_same_average", avg, tol.average);
    let jprime = max_over(run.sub_sigma(), |z| Ok((apply_j_prime(ws, &good, z)? - apply_j_bounced(ws, &good, z, FIT_MODES)?).norm()));
    rec.below_or_err("j_prime_equals_j_of_bounce", "eq:J_J'_same", jprime, tol.base_points);
    let jprime_def = max_over(run.sub_sigma(), |z| {
        let a = apply_j_prime(ws, &good, z)?;
        let b: C = (0..cfg.n()).map(|k| apply_j_prime(ws, &only(&good, k), z)).sum::<std::result::Result<C, _>>()?;
        Ok((a - b).norm())
    });
    rec.below_or_err("j_prime_sum_over_collars", "eq:Jprime_definition", jprime_def, tol.identity);
    rec.below_or_err("x_eps_output_extends_into_collars", "th:extension_collar", extension_collar_check(ws, &good, cfg.epsilon).map_err(anyhow::Error::from), tol.extension);
    if cfg.surface.is_torus() {
        let bad = collar_data(cfg, &mut r, false);
        match extension_collar_check(ws, &bad, cfg.epsilon) {
            Ok(v) => rec.at_least("collar_data_outside_x_eps_control", "th:extension_collar", v, neg.extension, "data outside X_ε does not extend"),
            Err(e) => rec.error("collar_data_outside_x_eps_control", "th:extension_collar", neg.extension, e),
        }
    }
    let holo = (|| -> Result<f64> {
        let gb: Vec<HarmonicExpansion> = good.iter().map(|u| Ok(bounce(u, FIT_MODES, m)?.value)).collect::<Result<_>>()?;
        max_over(run.sub_sigma(), |z| Ok(apply_dbar_j(ws, &gb, z)?.norm()))
    })();
    rec.below_or_err("j_of_bounced_x_eps_is_holomorphic", "co:holo_extension", holo, tol.cdjo);

    if cfg.n() == 1 {
        let both = both_sides(run, &h);
        rec.below_or_err("j_from_either_side_of_gamma", "eq:J_both_sides", both, tol.both_sides);
    }
    if cfg.surface.is_torus() {
        torus_foundations(run, rec, &mut r);
    }
}

/// Value at `s = 0` of the polynomial through `(s_i, v_i)`.
fn extrapolate_to_zero(s: &[f64], v: &[C]) -> C {
    let mut p = v.to_vec();
    for k in 1..p.len() {
        for i in 0..p.len() - k {
            p[i] = (p[i + 1] * s[i] - p[i] * s[i + k]) / (s[i] - s[i + k]);
        }
    }
    p[0]
}

/// `J` from `Σ`-side level curves applied to `𝔒(Ω, Σ)h` against `J` from `Ω`-side curves.
fn both_sides(run: &SurfaceRun, h: &[HarmonicExpansion]) -> Result<f64> {
    let ws = run.ws;
    let cfg = run.cfg();
    let m = run.m();
    let hs = transmit_to_sigma(cfg, h, FIT_MODES, m)?;
    let dom = ws.domain(0);
    let levels: [f64; 6] = [0.005, 0.01, 0.015, 0.02, 0.03, 0.04];
    let mut curves = Vec::new();
    for &lv in &levels {
        let mut samples = Vec::with_capacity(m);
        for i in 0..m {
            let zeta = C::from_polar(lv.exp(), 2.0 * PI * i as f64 / m as f64);
            let w = dom.eval(zeta);
            samples.push((w, C::i() * zeta * dom.deriv(zeta), hs.value.value(cfg, w)?));
        }
        curves.push(samples);
    }
    let outer_j = |z: C| -> Result<C> {
        let mut vals = Vec::with_capacity(levels.len());
        for samples in &curves {
            let mut acc = zero();
            for &(w, dw, v) in samples {
                acc += schiffer_core::surface_models::dw_green(&cfg.surface, w, z, cfg.q)? * v * dw;
            }
            vals.push(-acc * (2.0 * PI / m as f64) / C::new(0.0, PI));
        }
        Ok(extrapolate_to_zero(&levels, &vals))
    };
    let far: Vec<C> = run.sigma.iter().copied().filter(|&z| ws.min_separation(z) > 0.5).take(SUBGRID).collect();
    let mut pts = far;
    pts.extend(run.omega_z(0, SUBGRID));
    max_over(&pts, |z| Ok((apply_j(ws, h, z)? - outer_j(z)?).norm()))
}

fn torus_foundations(run: &SurfaceRun, rec: &mut Recorder, r: &mut ChaCha8Rng) {
    let s = &run.cfg().surface;
    let tol = run.tol();
    let tau = s.tau;
    let per = (|| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let pick = |r: &mut ChaCha8Rng| c(r.gen::<f64>(), 0.0) + tau * r.gen::<f64>();
            let (w, z, q) = (pick(r), pick(r), pick(r));
            let g0 = green_function(s, w, z, q)?.finite()?;
            for sh in [c(1.0, 0.0), tau] {
                worst = worst.max((green_function(s, w + sh, z, q)?.finite()? - g0).abs());
                worst = worst.max((green_function(s, w, z + sh, q)?.finite()? - g0).abs());
                worst = worst.max((green_function(s, w, z, q + sh)?.finite()? - g0).abs());
            }
        }
        Ok(worst)
    })();
    rec.below_or_err("torus_green_double_periodicity", "eq:T_general_definition", per, tol.periodicity);
    let quad = fundamental_domain_quadrature(tau, 32);
    let norm = quad.as_ref().map_err(|e| anyhow!("{e}")).map(|q| {
        let area: f64 = q.weights.iter().sum();
        let closed = compact_holomorphic_basis(s).first().map_or(f64::NAN, |b| b.norm_sq);
        (area - tau.im).abs().max((closed - tau.im).abs())
    });
    rec.below_or_err("torus_dz_norm_is_im_tau", "eq:form_inner_product", norm, tol.norm);
    let repro = quad.as_ref().map_err(|e| anyhow!("{e}")).map(|q| {
        let z0 = c(0.3, 0.4);
        // ∬ κ dz (dw̄ ∧ dw) with dw̄ ∧ dw = 2i dA
        let v: C = q.nodes.iter().zip(&q.weights).map(|(&w, &wt)| bergman_kernel_compact(s, z0, w) * C::new(0.0, 2.0) * wt).sum();
        (v - 1.0).norm()
    });
    rec.below_or_err("torus_bergman_reproduces_dz", "eq:SOR_sum", repro, tol.bergman);
}

/// Isomorphism diagnostics for `T(𝒪, Σ)` on `V`.
pub fn isomorphism(run: &SurfaceRun, rec: &mut Recorder) {
    let ws = run.ws;
    let cfg = run.cfg();
    let tol = *run.tol();
    let m = run.m();
    let n = run.set.truncation;
    let mut r = rng(run.set.seed, 2);

    let mut ns: Vec<usize> = [2, 4, 6, 8].into_iter().filter(|&x| x < n).collect();
    ns.push(n);
    let mut rows = Vec::new();
    let mut last = None;
    for &k in &ns {
        match assemble_section(SectionOp::TSigma, ws, k) {
            Ok(sec) => {
                let smin = sec.singular_values.last().copied().unwrap_or(0.0);
                let smax = sec.singular_values.first().copied().unwrap_or(0.0);
                rows.push(vec![k as f64, smin, smax]);
                last = Some(sec);
            }
            Err(e) => rec.error(format!("t_section_n{k}"), "th:general_T_is_isomorphism", tol.s_min, e),
        }
    }
    rec.table("t_section_sweep", &["N", "s_min", "s_max"], rows.clone());
    if let Some(row) = rows.last() {
        rec.at_least("t_section_bounded_below", "th:general_T_is_isomorphism", row[1], tol.s_min, "smallest singular value at the largest truncation");
    }
    let single_disk = !cfg.surface.is_torus() && cfg.n() == 1 && cfg.domains[0].is_affine();
    if single_disk {
        match assemble_section(SectionOp::TSigma, ws, 8) {
            Ok(sec) => {
                let dev = fmax(sec.singular_values.iter().map(|s| (s - 1.0).abs()));
                rec.below("disk_t_singular_values_are_one", "th:general_T_is_isomorphism", dev, tol.isometry);
                rec.below("disk_t_section_is_diagonal", "th:general_T_is_isomorphism", sec.off_diagonal(), tol.isometry);
            }
            Err(e) => rec.error("disk_t_singular_values_are_one", "th:general_T_is_isomorphism", tol.isometry, e),
        }
    }
    let _ = last;

    let samples: Result<Vec<Vec<FormExpansion>>> = (0..20).map(|_| Ok(schiffer_core::spaces::project_v(cfg, &random_abar(cfg, &mut r))?)).collect();
    match samples {
        Ok(abars) => {
            let li: Result<Vec<f64>> = abars.par_iter().map(|a| Ok(left_inverse_residual(cfg, a, 3 * DATA_MODES, m)?)).collect();
            rec.below_or_err("left_inverse_on_v", "TII", li.map(fmax), tol.left_inverse);
            let exact: Result<Vec<f64>> = abars
                .par_iter()
                .map(|a| {
                    let f = t_sigma_form(cfg, a)?;
                    Ok(fmax(f.periods(cfg, m)?.iter().map(|p| p.norm())).max(f.non_exact_part()))
                })
                .collect();
            rec.below_or_err("t_image_is_exact", "th:general_T_is_isomorphism", exact.map(fmax), tol.v_defect);
            let forms = (|| -> Result<f64> {
                let mut worst: f64 = 0.0;
                for a in abars.iter().take(3) {
                    let beta = t_sigma_form(cfg, a)?;
                    for j in 0..cfg.n() {
                        let (d, db) = transmit_exact_forms(cfg, &beta, j, FIT_MODES, m)?;
                        let pts: Vec<C> = run.omega_z(j, SUBGRID);
                        worst = worst.max(max_over(&pts, |z| {
                            let e1 = (d.eval_surface(cfg, z)? - apply_t(ws, a, Target::Omega(j), z)?).norm();
                            let e2 = (db.eval_surface(cfg, z)? - a[j].eval_surface(cfg, z)?).norm();
                            Ok(e1.max(e2))
                        })?);
                    }
                }
                Ok(worst)
            })();
            rec.below_or_err("transmitted_t_image_recovers_abar", "th:transmitted_jump_forms", forms, tol.transmitted);
        }
        Err(e) => rec.error("left_inverse_on_v", "TII", tol.left_inverse, e),
    }
    match assemble_section(SectionOp::LeftInverse, ws, DATA_MODES) {
        Ok(sec) => rec.below("left_inverse_section_is_identity", "TII", sec.identity_defect(), tol.left_inverse),
        Err(e) => rec.error("left_inverse_section_is_identity", "TII", tol.left_inverse, e),
    }

    let mut surj: f64 = 0.0;
    let mut vdef: f64 = 0.0;
    let mut failure = None;
    for _ in 0..10 {
        let hs = random_sigma_holo(cfg, &mut r, 4);
        let res = (|| -> Result<(f64, f64)> {
            let pre = surjectivity_preimage(cfg, &hs, FIT_MODES, m)?;
            let e = max_over(&run.sigma[..20], |z| Ok((apply_t(ws, &pre, Target::Sigma, z)? - hs.eval_full(cfg, z)?[1]).norm()))?;
            Ok((e, preimage_v_defect(cfg, &pre)?))
        })();
        match res {
            Ok((e, v)) => {
                surj = surj.max(e);
                vdef = vdef.max(v);
            }
            Err(e) => failure = Some(e),
        }
    }
    match failure {
        None => {
            rec.below("preimage_reproduces_exact_forms", "TIS", surj, tol.surjectivity);
            rec.below("preimage_lies_in_v", "TIS", vdef, tol.v_defect);
        }
        Some(e) => rec.error("preimage_reproduces_exact_forms", "TIS", tol.surjectivity, e),
    }
}

/// Jump-problem experiments.
pub fn jump(run: &SurfaceRun, rec: &mut Recorder, timings: &mut Vec<(String, f64)>) {
    let ws = run.ws;
    let cfg = run.cfg();
    let tol = *run.tol();
    let mut r = rng(run.set.seed, 3);

    let affine = if cfg.surface.is_torus() { None } else { (0..cfg.n()).find(|&k| cfg.domains[k].is_affine()) };
    if let Some(k0) = affine {
        let start = Instant::now();
        let dom = ws.domain(k0).clone();
        let (cc, rho) = (dom.base_point(), dom.radius());
        let h: Vec<HarmonicExpansion> =
            (0..cfg.n()).map(|k| HarmonicExpansion::disk(k, vec![], vec![if k == k0 { c(1.0, 0.0) } else { zero() }], zero())).collect();
        let inside = rho / (cfg.q - cc);
        let outside = |z: C| -rho / (z - cc) + inside;
        let sol = jump_solve(ws, &h, SOLVE_MODES);
        timings.push(("jump_closed_form".into(), start.elapsed().as_secs_f64()));
        match sol {
            Ok(sol) => {
                rec.below("zbar_jump_boundary_residual", "th:jump_proper", sol.residual, tol.closed_form);
                let mut err = (sol.h_omega[k0].constant - inside).norm();
                err = err.max(fmax(sol.h_omega[k0].holo_coeffs.iter().map(|x| x.norm())));
                for k in (0..cfg.n()).filter(|&k| k != k0) {
                    for &(z, zeta) in run.omega[k].iter().take(SUBGRID) {
                        err = err.max((sol.h_omega[k].eval_chart(zeta) - outside(z)).norm());
                    }
                }
                for &z in &run.sigma {
                    match sol.h_sigma.value(cfg, z) {
                        Ok(v) => err = err.max((v - outside(z)).norm()),
                        Err(_) => err = f64::NAN,
                    }
                }
                rec.below("zbar_jump_closed_form_solution", "th:jump_dependable", err, tol.closed_form);
            }
            Err(e) => rec.error("zbar_jump_boundary_residual", "th:jump_proper", tol.closed_form, e),
        }
        let pointwise = (|| -> Result<f64> {
            let a = max_over(&run.sigma, |z| Ok((apply_j(ws, &h, z)? - outside(z)).norm()))?;
            let b = max_over(&run.omega_z(k0, GRID), |z| Ok((apply_j(ws, &h, z)? - inside).norm()))?;
            Ok(a.max(b).max(apply_j(ws, &h, cfg.q)?.norm()))
        })();
        rec.below_or_err("zbar_j_closed_form_pointwise", "eq:jump_definition", pointwise, tol.closed_form);
    }

    let hw = project_w(cfg, &random_h(cfg, &mut r)).map_err(anyhow::Error::from);
    let solved = hw.and_then(|hw| {
        let sol = jump_solve(ws, &hw, SOLVE_MODES)?;
        Ok((hw, sol))
    });
    match &solved {
        Ok((hw, sol)) => {
            rec.below("random_w_jump_residual", "th:jump_proper", sol.residual, tol.jump);
            rec.below("random_w_outputs_holomorphic", "th:jump_proper", sol.holomorphy_defect, tol.cdjo);
            let q_val = sol.h_sigma.value(cfg, cfg.q).map(|v| v.norm());
            rec.below_or_err("random_w_sigma_part_vanishes_at_q", "th:jump_proper", q_val, tol.closed_form);
            let pert: Result<Vec<HarmonicExpansion>> = hw
                .iter()
                .zip(random_holo(cfg, &mut r, 3, 0.6))
                .map(|(x, g)| Ok(x.add(&g)?))
                .collect();
            let uniq = pert.and_then(|p| {
                let sol2 = jump_solve(ws, &p, SOLVE_MODES)?;
                max_over(&run.sigma, |z| Ok((sol.h_sigma.value(cfg, z)? - sol2.h_sigma.value(cfg, z)?).norm()))
            });
            rec.below_or_err("holomorphic_perturbation_leaves_sigma_part", "re:ignore_holomorphic", uniq, tol.uniqueness);
            let (beta, abar) = split_all(hw);
            let block = (|| -> Result<f64> {
                let a = max_over_omega(run, SUBGRID, |j, z, _| {
                    let d = split_harmonic(&sol.h_omega[j]).0.eval_surface(cfg, z)?;
                    Ok((d - beta[j].eval_surface(cfg, z)? + apply_t(ws, &abar, Target::Omega(j), z)?).norm())
                })?;
                let b = max_over(run.sub_sigma(), |z| Ok((sol.h_sigma.eval_full(cfg, z)?[1] + apply_t(ws, &abar, Target::Sigma, z)?).norm()))?;
                Ok(a.max(b))
            })();
            rec.below_or_err("derivative_of_jump_block_structure", "th:derivative_of_jump_isomorphism", block, tol.identity);
            let pind = max_over(&run.sigma[..5], |z| {
                let a: Vec<C> = (0..cfg.n()).map(|k| c(0.2, -0.1) * if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
                Ok((apply_j(ws, hw, z)? - apply_j_base_points(cfg, hw, z, &a, 0.05, 512)?).norm())
            });
            rec.below_or_err("j_independent_of_base_points", "eq:jump_definition", pind, tol.base_points);
            let level = max_over(&run.sigma[..3], |z| {
                let est = apply_j_level(cfg, hw, z, 0.02, run.m(), 1e-3)?;
                Ok((est.limit - apply_j(ws, hw, z)?).norm())
            });
            rec.below_or_err("level_curve_limit_settles", "eq:jump_definition", level, tol.level_limit);
        }
        Err(e) => rec.error("random_w_jump_residual", "th:jump_proper", tol.jump, e),
    }

    let dep = (|| -> Result<f64> {
        let u = random_holo(cfg, &mut r, DATA_MODES, 0.6);
        let a = max_over_omega(run, SUBGRID, |j, z, zeta| Ok((apply_j(ws, &u, z)? - u[j].eval_chart(zeta)).norm()))?;
        let b = max_over(run.sub_sigma(), |z| Ok(apply_j(ws, &u, z)?.norm()))?;
        let hs = random_sigma_holo(cfg, &mut r, 4).anchored(cfg)?;
        let ho: Vec<HarmonicExpansion> = (0..cfg.n()).map(|k| Ok(transmit_to_omega(cfg, &hs, k, FIT_MODES, ws.disc.m)?.value)).collect::<Result<_>>()?;
        let c1 = max_over_omega(run, SUBGRID, |_, z, _| Ok(apply_j(ws, &ho, z)?.norm()))?;
        let c2 = max_over(run.sub_sigma(), |z| Ok((apply_j(ws, &ho, z)? + hs.value(cfg, z)?).norm()))?;
        Ok(a.max(b).max(c1).max(c2))
    })();
    rec.below_or_err("jump_of_one_sided_data", "th:jump_dependable", dep, tol.identity);

    let u_omega = random_holo(cfg, &mut r, 12, 0.5);
    let u_sigma = random_sigma_holo(cfg, &mut r, 6).scale(c(0.2, 0.0));
    rec.below_or_err("jump_inverse_random_pair", "th:jump_isomorphism", jump_inverse_check(ws, &u_omega, &u_sigma, FIT_MODES).map_err(anyhow::Error::from), tol.jump);
    let zeros: Vec<HarmonicExpansion> = (0..cfg.n()).map(|k| HarmonicExpansion::disk(k, vec![], vec![], zero())).collect();
    rec.below_or_err(
        "jump_inverse_sigma_side_only",
        "th:jump_isomorphism_just_one_side",
        jump_inverse_check(ws, &zeros, &u_sigma, FIT_MODES).map_err(anyhow::Error::from),
        tol.jump,
    );
}

fn truncate(h: &[HarmonicExpansion], n: usize) -> Vec<HarmonicExpansion> {
    h.iter()
        .map(|e| {
            let keep = |v: &[C]| e.powers.iter().zip(v).map(|(&p, x)| if p as usize <= n { *x } else { zero() }).collect();
            HarmonicExpansion { holo_coeffs: keep(&e.holo_coeffs), antiholo_coeffs: keep(&e.antiholo_coeffs), ..e.clone() }
        })
        .collect()
}

fn strictly_decreasing(v: &[f64]) -> f64 {
    // largest ratio of consecutive entries; below 1 means strictly decreasing
    v.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max)
}

/// Density of bounced collar data in `W` and of its `J`-images in `𝒟(Σ)`.
pub fn surface_density(run: &SurfaceRun, rec: &mut Recorder) {
    let ws = run.ws;
    let cfg = run.cfg();
    let tol = *run.tol();
    let mut r = rng(run.set.seed, 4);
    let h = match project_w(cfg, &random_h_decay(cfg, &mut r, 24, 0.4)) {
        Ok(h) => h,
        Err(e) => return rec.error("x_eps_density_in_w", "th:average_Xr_dense", tol.xeps, e),
    };
    match xeps_density_residuals(cfg, &h, &SWEEP) {
        Ok(res) => {
            rec.table("x_eps_density", &["N", "residual"], SWEEP.iter().zip(&res).map(|(&n, &v)| vec![n as f64, v]).collect());
            rec.below("x_eps_density_in_w", "th:average_Xr_dense", res[res.len() - 1], tol.xeps);
            rec.below("x_eps_density_strictly_decreasing", "th:average_Xr_dense", strictly_decreasing(&res), 1.0);
        }
        Err(e) => rec.error("x_eps_density_in_w", "th:average_Xr_dense", tol.xeps, e),
    }
    let anti: Vec<HarmonicExpansion> = h.iter().map(|x| x.antiholomorphic_part()).collect();
    match xeps_density_residuals(cfg, &anti, &SWEEP) {
        Ok(res) => {
            rec.table("x_eps_antiholomorphic_density", &["N", "residual"], SWEEP.iter().zip(&res).map(|(&n, &v)| vec![n as f64, v]).collect());
            rec.below("x_eps_antiholomorphic_density_in_w_prime", "co:GX_r_antiholo_is_dense", res[res.len() - 1], tol.xeps);
        }
        Err(e) => rec.error("x_eps_antiholomorphic_density_in_w_prime", "co:GX_r_antiholo_is_dense", tol.xeps, e),
    }
    let central: Result<Vec<f64>> = SWEEP
        .iter()
        .map(|&n| {
            let g = project_w(cfg, &truncate(&h, n))?;
            let d: Vec<HarmonicExpansion> = h.iter().zip(&g).map(|(a, b)| a.add(&b.scale(c(-1.0, 0.0)))).collect::<std::result::Result<_, _>>()?;
            max_over(run.sub_sigma(), |z| Ok(apply_j(ws, &d, z)?.norm()))
        })
        .collect();
    match central {
        Ok(res) => {
            rec.table("collar_restriction_density", &["N", "sup_residual_on_sigma"], SWEEP.iter().zip(&res).map(|(&n, &v)| vec![n as f64, v]).collect());
            rec.below("collar_functions_dense_on_sigma", "th:central_density_theorem", res[res.len() - 1], tol.xeps);
            rec.below("collar_density_strictly_decreasing", "th:central_density_theorem", strictly_decreasing(&res), 1.0);
        }
        Err(e) => rec.error("collar_functions_dense_on_sigma", "th:central_density_theorem", tol.xeps, e),
    }
}

fn powers_for(region: &OpenRegion, n: usize, kind: TargetKind) -> Vec<i32> {
    let half = (n / 2) as i32;
    match (region, kind) {
        (OpenRegion::Disk { .. }, TargetKind::Function) => (0..n as i32).collect(),
        (OpenRegion::Disk { .. }, TargetKind::Form) => (0..n as i32).collect(),
        // derivatives of z^p, p ≠ 0: exact forms only
        (OpenRegion::Annulus { .. }, TargetKind::Function) => (-half..=half).filter(|&p| p != 0).map(|p| p - 1).collect(),
        (OpenRegion::Annulus { .. }, TargetKind::Form) => (-half..half).collect(),
    }
}

/// Best approximation of the form `f(z) dz` on `Σ` by restrictions of `z^j dz` with `j` in `basis`;
/// returns the residual norm.
fn best_approximation(sigma: &OpenRegion, f: &dyn Fn(C) -> C, basis: &[i32], disc: &Discretization) -> Result<f64> {
    let quad = sigma.quadrature(disc.n_r, disc.n_t)?;
    let mut rows: Vec<Vec<C>> = quad.nodes.iter().zip(&quad.weights).map(|(&z, &w)| basis.iter().map(|&j| z.powi(j) * w.sqrt()).collect()).collect();
    for j in 0..basis.len() {
        let norm = rows.iter().map(|r| r[j].norm_sqr()).sum::<f64>().sqrt();
        rows.iter_mut().for_each(|r| r[j] /= norm);
    }
    let rhs: Vec<C> = quad.nodes.iter().zip(&quad.weights).map(|(&z, &w)| f(z) * w.sqrt()).collect();
    let fit = lstsq(&rows, &rhs, 1e14).map_err(|cond| anyhow!("ill-conditioned density fit (condition {cond:.3e})"))?;
    let res: f64 = rows.iter().zip(&rhs).map(|(row, b)| (row.iter().zip(&fit.x).map(|(a, x)| a * x).sum::<C>() - b).norm_sqr()).sum();
    Ok(res.sqrt())
}

fn scratch_workspace() -> Result<Workspace> {
    let cfg = SurfaceConfig {
        surface: SurfaceModel::sphere(),
        domains: vec![ConformalDomain::disk("unit", c(0.0, 0.0), 1.0)],
        q: c(2.0, 0.0),
        epsilon: 0.2,
    };
    Ok(Workspace::new(cfg, Discretization { n_r: 8, n_t: 16, m: 16 })?)
}

/// Density experiments on nested triples.
pub fn density(triples: &[TripleSpec], set: &RunSettings, rec: &mut Recorder) {
    let tol = set.tol;
    let mut ns: Vec<usize> = vec![2, 4, 8, 16, 32, 64];
    if !ns.contains(&set.truncation) {
        ns.push(set.truncation);
        ns.sort_unstable();
    }
    for t in triples {
        let p = t.power();
        // the Dirichlet seminorm of a function is the norm of its derivative
        let target: Box<dyn Fn(C) -> C + Sync> = match (t.target_pole.map(C::from), t.kind) {
            (Some(a), TargetKind::Function) => Box::new(move |z: C| -1.0 / ((z - a) * (z - a))),
            (Some(a), TargetKind::Form) => Box::new(move |z: C| 1.0 / (z - a)),
            (None, TargetKind::Function) => Box::new(move |z: C| p as f64 * z.powi(p - 1)),
            (None, TargetKind::Form) => Box::new(move |z: C| z.powi(p)),
        };
        let res: Result<Vec<f64>> = ns.iter().map(|&n| best_approximation(&t.sigma, &*target, &powers_for(&t.sigma_dprime, n, t.kind), &set.disc)).collect();
        let res = match res {
            Ok(r) => r,
            Err(e) => {
                rec.error(format!("{}_density", t.label), "th:dirichlet_density_squeeze", tol.density, e);
                continue;
            }
        };
        rec.table(&format!("density_{}", t.label), &["N", "residual"], ns.iter().zip(&res).map(|(&n, &v)| vec![n as f64, v]).collect());
        let rise = fmax(res.windows(2).map(|w| w[1] - w[0]));
        let last = res[res.len() - 1];
        match (t.expect, t.kind) {
            (Expectation::Dense, TargetKind::Function) => {
                rec.below(format!("{}_final_residual", t.label), "th:dirichlet_density_squeeze", last, tol.density);
                rec.below(format!("{}_residual_monotone", t.label), "co:density_general_isotopy", rise, ROUNDOFF);
                if t.sigma_dprime != t.sigma_prime {
                    rec.below(format!("{}_intermediate_surface", t.label), "co:embedding_in_double", last, tol.density);
                }
            }
            (Expectation::Dense, TargetKind::Form) => {
                let at8 = ns.iter().position(|&n| n == 8).map_or(last, |i| res[i]);
                rec.below(format!("{}_form_residual_n8", t.label), "th:form_general_isotopy_density", at8, tol.form_density);
                rec.below(format!("{}_residual_monotone", t.label), "th:form_general_isotopy_density", rise, ROUNDOFF);
                if t.sigma_dprime != t.sigma_prime {
                    rec.below(format!("{}_intermediate_surface", t.label), "co:embedding_in_double", last, tol.form_density);
                }
            }
            (Expectation::Obstructed, _) => {
                let expect = match t.kind {
                    TargetKind::Function => (p * p) as f64 * laurent_norm_sq(t.sigma, p - 1),
                    TargetKind::Form => laurent_norm_sq(t.sigma, p),
                };
                let dev = fmax(res.iter().map(|v| (v * v - expect).abs() / expect));
                rec.below(format!("{}_residual_squared_matches_norm", t.label), crate::report::COUNTEREXAMPLE, dev, tol.counterexample);
            }
        }
    }
    let ws = match scratch_workspace() {
        Ok(ws) => ws,
        Err(e) => return rec.error("s_section", "th:Bergman_comparison_dense", tol.singular_floor, e),
    };
    let mut seen: Vec<(OpenRegion, OpenRegion)> = Vec::new();
    for t in triples.iter().filter(|t| t.expect == Expectation::Dense) {
        if seen.contains(&(t.sigma, t.sigma_prime)) {
            continue;
        }
        seen.push((t.sigma, t.sigma_prime));
        let op = SectionOp::SOpen { sigma: t.sigma, sigma_prime: t.sigma_prime };
        let secs: Result<Vec<Vec<f64>>> = SWEEP.iter().map(|&n| Ok(assemble_section(op, &ws, n)?.singular_values)).collect();
        match secs {
            Ok(svs) => {
                let mins: Vec<f64> = svs.iter().map(|s| s.last().copied().unwrap_or(0.0)).collect();
                let floor = mins.iter().copied().fold(f64::INFINITY, f64::min);
                rec.table(
                    &format!("s_section_{}", t.label),
                    &["N", "s_min", "s_max"],
                    SWEEP.iter().zip(&svs).map(|(&n, s)| vec![n as f64, s.last().copied().unwrap_or(0.0), s.first().copied().unwrap_or(0.0)]).collect(),
                );
                rec.at_least(format!("{}_s_section_trivial_kernel", t.label), "th:Bergman_comparison_dense", floor, tol.singular_floor, "every singular value above the floor");
                rec.below(format!("{}_s_section_tail_decreasing", t.label), "th:Bergman_comparison_dense", strictly_decreasing(&mins), 1.0);
            }
            Err(e) => rec.error(format!("{}_s_section_trivial_kernel", t.label), "th:Bergman_comparison_dense", tol.singular_floor, e),
        }
    }
}

/// Default nested pairs for the adjoint suite.
pub fn default_pairs() -> Vec<(String, OpenRegion, OpenRegion)> {
    vec![
        ("disk_in_disk".into(), OpenRegion::Disk { r: 0.5 }, OpenRegion::Disk { r: 1.0 }),
        ("annulus_in_annulus".into(), OpenRegion::Annulus { r1: 0.5, r2: 1.0 }, OpenRegion::Annulus { r1: 0.25, r2: 2.0 }),
    ]
}

/// `S(Σ, Σ′) = R(Σ′, Σ)*` on seeded pairs, and restriction of monomials.
pub fn adjoint(triples: &[TripleSpec], set: &RunSettings, rec: &mut Recorder) {
    let tol = set.tol;
    let mut pairs = default_pairs();
    for t in triples {
        if t.sigma.closure_inside(&t.sigma_prime) && !pairs.iter().any(|(_, a, b)| *a == t.sigma && *b == t.sigma_prime) {
            pairs.push((t.label.clone(), t.sigma, t.sigma_prime));
        }
    }
    let mut r = rng(set.seed, 5);
    for (label, s, sp) in pairs {
        let powers: Vec<i32> = match s {
            OpenRegion::Disk { .. } => (0..=6).collect(),
            OpenRegion::Annulus { .. } => (-3..=3).collect(),
        };
        let powers_p: Vec<i32> = match sp {
            OpenRegion::Disk { .. } => (0..=6).collect(),
            OpenRegion::Annulus { .. } => (-3..=3).collect(),
        };
        let run = (|| -> Result<(f64, f64)> {
            let qs = s.quadrature(32, 128)?;
            let qp = sp.quadrature(32, 128)?;
            let mut data = Vec::new();
            for _ in 0..20 {
                let a = FormExpansion::laurent(Region::Open(s), Chirality::Holo, powers.clone(), powers.iter().map(|_| rc(&mut r)).collect());
                let b = FormExpansion::laurent(Region::Open(sp), Chirality::Holo, powers_p.clone(), powers_p.iter().map(|_| rc(&mut r)).collect());
                data.push((a, b));
            }
            let vals: Vec<f64> = data.par_iter().map(|(a, b)| Ok(adjoint_check(s, sp, a, b, &qs, &qp)?)).collect::<Result<_>>()?;
            let mut mono: f64 = 0.0;
            let common: Vec<i32> = powers_p.iter().copied().filter(|p| powers.contains(p)).collect();
            for &p in &common {
                let beta = FormExpansion::laurent(Region::Open(sp), Chirality::Holo, vec![p], vec![c(1.0, 0.0)]);
                let (out, res) = restriction(sp, s, &beta, &powers, &qs)?;
                mono = mono.max(res);
                for (&pp, x) in out.basis.powers.iter().zip(&out.coeffs) {
                    mono = mono.max((x - if pp == p { 1.0 } else { 0.0 }).norm());
                }
            }
            Ok((fmax(vals), mono))
        })();
        match run {
            Ok((adj, mono)) => {
                rec.below(format!("{label}_adjoint_discrepancy"), "th:restriction_adjoint", adj, tol.adjoint);
                rec.below(format!("{label}_restriction_of_monomials"), "th:restriction_adjoint", mono, tol.adjoint);
            }
            Err(e) => rec.error(format!("{label}_adjoint_discrepancy"), "th:restriction_adjoint", tol.adjoint, e),
        }
    }
}
