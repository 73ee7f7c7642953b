//! Boundary traces on the curves `Γ_k`, transmission between the two sides of
//! a curve, bounce from a collar to the full domain, and transmission of exact
//! one-forms.
//!
//! Traces are sampled through the disk parametrization `θ ↦ f_k(e^{iθ})` and
//! carried as discrete Fourier data. On the disk side, mode `m > 0` becomes
//! `ζ^m`, mode `−m` becomes `ζ̄^m`.

use crate::domains::{chart_circle, DomainError, LevelCurve, SurfaceConfig};
use crate::linalg::lstsq;
use crate::spaces::{
    eval_sigma_element, sigma_harmonic_basis, split_harmonic, FormExpansion, HarmonicExpansion, Region, SigmaElement,
    SigmaForm, SigmaFunction, SpaceError,
};
use num_complex::Complex64 as C;
use rustfft::FftPlanner;
use thiserror::Error;

/// Condition-number cap for boundary least-squares fits.
pub const FIT_CONDITION_CAP: f64 = 1e10;
/// Period size above which a form on `Σ` is treated as not exact.
pub const EXACTNESS_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransmissionError {
    #[error("expansion does not live on a region bounded by this curve")]
    RegionMismatch,
    #[error("boundary fit is ill conditioned (condition number {0:e})")]
    IllConditionedFit(f64),
    #[error("form is not exact on Σ (largest period {0:e})")]
    NotExact(f64),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Samples on `Γ_k` and their discrete Fourier coefficients in `θ`.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub k: usize,
    pub curve: LevelCurve,
    pub samples: Vec<C>,
    /// `fourier[j]` is mode `j` for `j < M/2` and mode `j − M` above.
    pub fourier: Vec<C>,
}

impl BoundaryTrace {
    pub fn from_samples(k: usize, curve: LevelCurve, samples: Vec<C>) -> Self {
        let m = samples.len();
        let mut buf = samples.clone();
        FftPlanner::<f64>::new().plan_fft_forward(m).process(&mut buf);
        let fourier = buf.into_iter().map(|c| c / m as f64).collect();
        BoundaryTrace { k, curve, samples, fourier }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Fourier coefficient of `e^{imθ}`.
    pub fn mode(&self, m: i64) -> C {
        let n = self.fourier.len() as i64;
        self.fourier[m.rem_euclid(n) as usize]
    }

    /// `|Σ|c_m|² − mean |samples|²|`.
    pub fn parseval_defect(&self) -> f64 {
        let a: f64 = self.fourier.iter().map(|c| c.norm_sqr()).sum();
        let b: f64 = self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.len() as f64;
        (a - b).abs()
    }

    /// Largest coefficient with `|m| > n`.
    pub fn tail(&self, n: usize) -> f64 {
        let half = (self.len() / 2) as i64;
        (n as i64 + 1..half).map(|m| self.mode(m).norm().max(self.mode(-m).norm())).fold(0.0, f64::max)
    }

    /// Geometric decay factor `r` with `|c_m| ≈ r^{|m|}`, fitted over modes above the noise floor.
    pub fn decay_rate(&self) -> f64 {
        let half = self.len() / 2;
        let pts: Vec<(f64, f64)> = (1..half)
            .filter_map(|m| {
                let a = self.mode(m as i64).norm().max(self.mode(-(m as i64)).norm());
                (a > 1e-13).then(|| (m as f64, a.ln()))
            })
            .collect();
        if pts.len() < 2 {
            return 0.0;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (sxy / sxx).exp()
    }
}

/// A harmonic function on one side of `Γ_k`.
#[derive(Debug, Clone, Copy)]
pub enum Side<'a> {
    Omega(&'a HarmonicExpansion),
    Sigma(&'a SigmaFunction),
}

/// Trace on `Γ_k` of a function on `Ω_k` (through the chart) or on `Σ` (directly).
pub fn trace(cfg: &SurfaceConfig, h: Side<'_>, k: usize, m: usize) -> Result<BoundaryTrace, TransmissionError> {
    let curve = chart_circle(&cfg.domains[k], 0.0, m);
    let samples = match h {
        Side::Omega(e) => {
            if !matches!(e.region, Region::Omega(j) | Region::Collar(j) if j == k) {
                return Err(TransmissionError::RegionMismatch);
            }
            curve.zetas.iter().map(|&z| e.eval_chart(z)).collect()
        }
        Side::Sigma(f) => curve.samples.iter().map(|&z| f.value(cfg, z)).collect::<Result<Vec<_>, _>>()?,
    };
    Ok(BoundaryTrace::from_samples(k, curve, samples))
}

/// The disk expansion with the given trace, truncated at `|m| ≤ n`.
pub fn trace_to_disk(tr: &BoundaryTrace, n: usize) -> HarmonicExpansion {
    let n = n.min(tr.len() / 2 - 1);
    let holo = (1..=n).map(|m| tr.mode(m as i64)).collect();
    let anti = (1..=n).map(|m| tr.mode(-(m as i64))).collect();
    HarmonicExpansion::disk(tr.k, holo, anti, tr.mode(0))
}

/// Value with the fit diagnostics that produced it.
#[derive(Debug, Clone)]
pub struct Transmitted<T> {
    pub value: T,
    /// Largest trace mismatch over the boundary samples.
    pub residual: f64,
    pub condition: f64,
}

fn disk_residual(h: &HarmonicExpansion, tr: &BoundaryTrace) -> f64 {
    tr.curve.zetas.iter().zip(&tr.samples).map(|(&z, s)| (h.eval_chart(z) - s).norm()).fold(0.0, f64::max)
}

/// `𝔒(Σ, Ω_j)`: the disk expansion on `Ω_j` matching the trace of `h` on `Γ_j`.
pub fn transmit_to_omega(
    cfg: &SurfaceConfig,
    h: &SigmaFunction,
    j: usize,
    n: usize,
    m: usize,
) -> Result<Transmitted<HarmonicExpansion>, TransmissionError> {
    let tr = trace(cfg, Side::Sigma(h), j, m)?;
    let value = trace_to_disk(&tr, n);
    let residual = disk_residual(&value, &tr);
    Ok(Transmitted { value, residual, condition: 1.0 })
}

/// Least-squares fit of boundary data on all curves `Γ_k` (samples of
/// `chart_circle(f_k, 0, m)`) by a combination of `basis`.
pub fn fit_sigma(
    cfg: &SurfaceConfig,
    basis: &[SigmaElement],
    data: &[Vec<C>],
) -> Result<Transmitted<SigmaFunction>, TransmissionError> {
    if data.len() != cfg.n() {
        return Err(TransmissionError::RegionMismatch);
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (k, vals) in data.iter().enumerate() {
        let curve = chart_circle(&cfg.domains[k], 0.0, vals.len());
        for (&z, &v) in curve.samples.iter().zip(vals) {
            let row = basis.iter().map(|&e| eval_sigma_element(cfg, e, z).map(|x| x[0])).collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
            rhs.push(v);
        }
    }
    let fit = lstsq(&rows, &rhs, FIT_CONDITION_CAP).map_err(TransmissionError::IllConditionedFit)?;
    Ok(Transmitted { value: SigmaFunction::from_basis(basis, &fit.x), residual: fit.max_residual, condition: fit.condition })
}

/// `𝔒(𝒪, Σ)`: the harmonic function on `Σ` whose trace on each `Γ_k` matches `h_k`.
pub fn transmit_to_sigma(
    cfg: &SurfaceConfig,
    h: &[HarmonicExpansion],
    n: usize,
    m: usize,
) -> Result<Transmitted<SigmaFunction>, TransmissionError> {
    if h.len() != cfg.n() {
        return Err(TransmissionError::RegionMismatch);
    }
    let mut data = Vec::with_capacity(h.len());
    for (k, hk) in h.iter().enumerate() {
        data.push(trace(cfg, Side::Omega(hk), k, m)?.samples);
    }
    fit_sigma(cfg, &sigma_harmonic_basis(cfg, n), &data)
}

/// `𝔊`: the disk expansion on `Ω_k` with the same trace on `|ζ| = 1` as the collar data.
pub fn bounce(collar_h: &HarmonicExpansion, n: usize, m: usize) -> Result<Transmitted<HarmonicExpansion>, TransmissionError> {
    let k = match collar_h.region {
        Region::Collar(k) | Region::Omega(k) => k,
        _ => return Err(TransmissionError::RegionMismatch),
    };
    let id = crate::domains::ConformalDomain::disk("chart", C::new(0.0, 0.0), 1.0);
    let curve = chart_circle(&id, 0.0, m);
    let samples = curve.zetas.iter().map(|&z| collar_h.eval_chart(z)).collect();
    let tr = BoundaryTrace::from_samples(k, curve, samples);
    let value = trace_to_disk(&tr, n);
    let residual = disk_residual(&value, &tr);
    Ok(Transmitted { value, residual, condition: 1.0 })
}

/// `d 𝔒(Σ, Ω_j) d⁻¹` on exact forms; returns the `(∂, ∂̄)` parts on `Ω_j`.
pub fn transmit_exact_forms(
    cfg: &SurfaceConfig,
    beta: &SigmaForm,
    j: usize,
    n: usize,
    m: usize,
) -> Result<(FormExpansion, FormExpansion), TransmissionError> {
    let worst = beta.periods(cfg, m)?.iter().map(|p| p.norm()).fold(beta.non_exact_part(), f64::max);
    if worst > EXACTNESS_TOL {
        return Err(TransmissionError::NotExact(worst));
    }
    let h = beta.primitive.anchored(cfg)?;
    let t = transmit_to_omega(cfg, &h, j, n, m)?;
    Ok(split_harmonic(&t.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::ConformalDomain;
    use crate::spaces::{sigma_holomorphic_basis, SigmaElement as E};
    use crate::surface_models::SurfaceModel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn disk_cfg() -> SurfaceConfig {
        SurfaceConfig {
            surface: SurfaceModel::sphere(),
            domains: vec![ConformalDomain::disk("D", c(0.0, 0.0), 1.0)],
            q: c(2.0, 0.0),
            epsilon: 0.2,
        }
    }

    fn two_cfg() -> SurfaceConfig {
        SurfaceConfig {
            surface: SurfaceModel::sphere(),
            domains: vec![
                ConformalDomain::new("A", vec![c(-1.5, 0.0), c(0.6, 0.0), c(0.05, 0.0)]),
                ConformalDomain::disk("B", c(1.5, 0.0), 0.6),
            ],
            q: c(0.0, 0.0),
            epsilon: 0.2,
        }
    }

    fn torus_cfg() -> SurfaceConfig {
        SurfaceConfig {
            surface: SurfaceModel::torus(c(0.0, 1.0)).unwrap(),
            domains: vec![
                ConformalDomain::disk("A", c(0.25, 0.25), 0.12),
                ConformalDomain::disk("B", c(0.7, 0.6), 0.12),
            ],
            q: c(0.5, 0.85),
            epsilon: 0.2,
        }
    }

    fn rc(rng: &mut ChaCha8Rng) -> C {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn trace_examples() {
        let cfg = disk_cfg();
        for n in 1..5usize {
            let mut a = vec![c(0.0, 0.0); n];
            a[n - 1] = c(1.0, 0.0);
            let h = HarmonicExpansion::disk(0, a.clone(), vec![], c(0.0, 0.0));
            let t = trace(&cfg, Side::Omega(&h), 0, 64).unwrap();
            assert!((t.mode(n as i64) - 1.0).norm() < 1e-14);
            assert!(t.fourier.iter().map(|x| x.norm()).sum::<f64>() - 1.0 < 1e-13);
            let hb = HarmonicExpansion::disk(0, vec![], a, c(0.0, 0.0));
            let t = trace(&cfg, Side::Omega(&hb), 0, 64).unwrap();
            assert!((t.mode(-(n as i64)) - 1.0).norm() < 1e-14);
            assert!(t.parseval_defect() < 1e-10);
        }
        let zbar = HarmonicExpansion::disk(0, vec![], vec![c(1.0, 0.0)], c(0.0, 0.0));
        let inv = SigmaFunction::new(vec![(E::Pole { k: 0, m: 1 }, c(1.0, 0.0))]);
        let a = trace(&cfg, Side::Omega(&zbar), 0, 64).unwrap();
        let b = trace(&cfg, Side::Sigma(&inv), 0, 64).unwrap();
        assert!(a.samples.iter().zip(&b.samples).all(|(x, y)| (x - y).norm() < 1e-12));
        let other = HarmonicExpansion::disk(1, vec![], vec![], c(0.0, 0.0));
        assert!(matches!(trace(&cfg, Side::Omega(&other), 0, 16), Err(TransmissionError::RegionMismatch)));
    }

    #[test]
    fn analytic_traces_decay_geometrically() {
        let cfg = two_cfg();
        let h = SigmaFunction::new(vec![(E::Pole { k: 1, m: 1 }, c(1.0, 0.0))]);
        let t = trace(&cfg, Side::Sigma(&h), 0, 256).unwrap();
        let r = t.decay_rate();
        assert!(r > 0.0 && r < 0.6, "{r}");
    }

    #[test]
    fn disk_to_exterior_and_back() {
        let cfg = disk_cfg();
        for n in 1..=8usize {
            let mut a = vec![c(0.0, 0.0); n];
            a[n - 1] = c(1.0, 0.0);
            let h = HarmonicExpansion::disk(0, a, vec![], c(0.0, 0.0));
            let s = transmit_to_sigma(&cfg, &[h.clone()], 10, 128).unwrap();
            assert!(s.residual < 1e-10);
            // ζ^n on the circle extends outward as z̄^{−n}
            for (e, coef) in &s.value.terms {
                let expect = if *e == (E::ConjPole { k: 0, m: n }) { 1.0 } else { 0.0 };
                assert!((coef - expect).norm() < 1e-10, "{e:?} {coef}");
            }
            let back = transmit_to_omega(&cfg, &s.value, 0, 10, 128).unwrap();
            let d = back.value.add(&h.scale(c(-1.0, 0.0))).unwrap();
            assert!(d.holo_coeffs.iter().chain(&d.antiholo_coeffs).all(|x| x.norm() < 1e-10) && d.constant.norm() < 1e-10);
        }
        let k = HarmonicExpansion::constant(Region::Omega(0), c(2.0, -1.0));
        let s = transmit_to_sigma(&cfg, &[k], 6, 64).unwrap();
        assert!((s.value.value(&cfg, c(5.0, 3.0)).unwrap() - c(2.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn multi_curve_transmission_matches_traces() {
        for cfg in [two_cfg(), torus_cfg()] {
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            let h: Vec<HarmonicExpansion> = (0..2)
                .map(|k| HarmonicExpansion::disk(k, (0..3).map(|_| rc(&mut rng)).collect(), (0..3).map(|_| rc(&mut rng)).collect(), rc(&mut rng)))
                .collect();
            let s = transmit_to_sigma(&cfg, &h, 16, 256).unwrap();
            assert!(s.residual < 1e-8, "residual {}", s.residual);
            for k in 0..2 {
                let back = transmit_to_omega(&cfg, &s.value, k, 16, 256).unwrap();
                let d = back.value.add(&h[k].scale(c(-1.0, 0.0))).unwrap();
                let err = d.holo_coeffs.iter().chain(&d.antiholo_coeffs).map(|x| x.norm()).fold(d.constant.norm(), f64::max);
                assert!(err < 1e-8, "{err}");
            }
        }
    }

    #[test]
    fn transmission_ratio_is_finite() {
        let cfg = two_cfg();
        let h = vec![
            HarmonicExpansion::disk(0, vec![c(1.0, 0.0)], vec![], c(0.0, 0.0)),
            HarmonicExpansion::disk(1, vec![], vec![c(0.0, 1.0)], c(0.0, 0.0)),
        ];
        let s = transmit_to_sigma(&cfg, &h, 16, 256).unwrap();
        let num = crate::spaces::sigma_dirichlet_inner(&cfg, &s.value, &s.value, 256).unwrap().re;
        let den: f64 = h.iter().map(|x| crate::spaces::dirichlet_inner_disk(x, x).unwrap().re).sum();
        assert!(num.is_finite() && num > 0.0 && num / den < 10.0);
    }

    #[test]
    fn bounce_examples() {
        let pow = |p: i32, coef: C, holo: bool| {
            let (a, b) = if holo { (vec![coef], vec![c(0.0, 0.0)]) } else { (vec![c(0.0, 0.0)], vec![coef]) };
            HarmonicExpansion::laurent(Region::Collar(0), vec![p], a, b, c(0.0, 0.0), c(0.0, 0.0))
        };
        let b = bounce(&pow(3, c(1.0, 0.0), true), 8, 64).unwrap().value;
        assert!((b.holo_coeffs[2] - 1.0).norm() < 1e-14);
        let b = bounce(&pow(-1, c(1.0, 0.0), true), 8, 64).unwrap().value;
        assert!((b.antiholo_coeffs[0] - 1.0).norm() < 1e-14);
        assert!(b.holo_coeffs.iter().all(|x| x.norm() < 1e-14));
        let log = HarmonicExpansion::laurent(Region::Collar(0), vec![], vec![], vec![], c(0.0, 0.0), c(1.0, 0.0));
        let b = bounce(&log, 8, 64).unwrap().value;
        assert!(b.holo_coeffs.iter().chain(&b.antiholo_coeffs).all(|x| x.norm() < 1e-14) && b.constant.norm() < 1e-14);
        let bad = HarmonicExpansion::constant(Region::Sigma, c(1.0, 0.0));
        assert!(bounce(&bad, 4, 16).is_err());
    }

    #[test]
    fn exact_form_transmission_on_disk() {
        let cfg = disk_cfg();
        for n in 0..6usize {
            // β = z^{−n−2} dz has primitive −z^{−n−1}/(n+1)
            let h = SigmaFunction::new(vec![(E::Pole { k: 0, m: n + 1 }, c(-1.0 / (n as f64 + 1.0), 0.0))]);
            let (a, b) = transmit_exact_forms(&cfg, &SigmaForm::exact(h), 0, 10, 64).unwrap();
            assert!(a.coeffs.iter().all(|x| x.norm() < 1e-12));
            for (p, coef) in b.basis.powers.iter().zip(&b.coeffs) {
                let expect = if *p == n as i32 { -1.0 } else { 0.0 };
                assert!((coef - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_form_transmission_rejects_residues_and_is_linear() {
        let cfg = two_cfg();
        let form = SigmaForm {
            primitive: SigmaFunction::default(),
            extras: vec![(crate::spaces::SigmaExtra::ResidueDifference { k: 1 }, c(1.0, 0.0))],
        };
        assert!(matches!(transmit_exact_forms(&cfg, &form, 0, 8, 128), Err(TransmissionError::NotExact(_))));
        let basis = sigma_holomorphic_basis(&cfg, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x: Vec<C> = basis.iter().map(|_| rc(&mut rng)).collect();
        let y: Vec<C> = basis.iter().map(|_| rc(&mut rng)).collect();
        let (a, b) = (c(0.3, 1.0), c(-2.0, 0.5));
        let bx = SigmaForm::exact(SigmaFunction::from_basis(&basis, &x));
        let by = SigmaForm::exact(SigmaFunction::from_basis(&basis, &y));
        let z: Vec<C> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
        let bz = SigmaForm::exact(SigmaFunction::from_basis(&basis, &z));
        for j in 0..2 {
            let (hx, ax) = transmit_exact_forms(&cfg, &bx, j, 12, 256).unwrap();
            let (hy, ay) = transmit_exact_forms(&cfg, &by, j, 12, 256).unwrap();
            let (hz, az) = transmit_exact_forms(&cfg, &bz, j, 12, 256).unwrap();
            for i in 0..hz.coeffs.len() {
                assert!((hz.coeffs[i] - a * hx.coeffs[i] - b * hy.coeffs[i]).norm() < 1e-10);
                assert!((az.coeffs[i] - a * ax.coeffs[i] - b * ay.coeffs[i]).norm() < 1e-10);
            }
        }
    }
}
