use num_complex::Complex64 as C;
use schiffer_core::domains::{ConformalDomain, Discretization, SurfaceConfig, Workspace};
use schiffer_core::jump::{apply_dbar_j, apply_dj, apply_j, jump_solve, project_w};
use schiffer_core::schiffer_ops::{apply_t, Target};
use schiffer_core::spaces::{split_harmonic, FormExpansion, HarmonicExpansion};
use schiffer_core::surface_models::SurfaceModel;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn two_disk_sphere() -> Workspace {
    let cfg = SurfaceConfig {
        surface: SurfaceModel::sphere(),
        domains: vec![
            ConformalDomain::new("left", vec![c(-1.5, 0.0), c(0.6, 0.0), c(0.05, 0.0)]),
            ConformalDomain::disk("right", c(1.5, 0.0), 0.6),
        ],
        q: c(0.0, 0.0),
        epsilon: 0.2,
    };
    Workspace::new(cfg, Discretization::default()).unwrap()
}

fn torus() -> Workspace {
    let cfg = SurfaceConfig {
        surface: SurfaceModel::torus(c(0.1, 1.1)).unwrap(),
        domains: vec![ConformalDomain::disk("a", c(0.3, 0.3), 0.15), ConformalDomain::disk("b", c(0.7, 0.75), 0.1)],
        q: c(0.2, 0.8),
        epsilon: 0.2,
    };
    Workspace::new(cfg, Discretization::default()).unwrap()
}

fn data(n: usize) -> Vec<HarmonicExpansion> {
    (0..n)
        .map(|k| {
            let s = 1.0 + k as f64;
            HarmonicExpansion::disk(k, vec![c(0.3, -0.2) * s, c(0.1, 0.05)], vec![c(-0.4, 0.1), c(0.05, 0.2) * s], c(0.2, 0.0))
        })
        .collect()
}

/// `(∂_z f, ∂_z̄ f)` by central differences.
fn wirtinger(f: impl Fn(C) -> C, z: C) -> (C, C) {
    let h = 1e-4;
    let dx = (f(z + h) - f(z - h)) / (2.0 * h);
    let dy = (f(z + c(0.0, h)) - f(z - c(0.0, h))) / (2.0 * h);
    ((dx - C::i() * dy) * 0.5, (dx + C::i() * dy) * 0.5)
}

#[test]
fn zbar_on_an_affine_disk_has_the_closed_form_jump() {
    let (cc, rho, q) = (c(0.2, 0.3), 0.7, c(3.0, -1.0));
    let cfg = SurfaceConfig { surface: SurfaceModel::sphere(), domains: vec![ConformalDomain::disk("d", cc, rho)], q, epsilon: 0.2 };
    let ws = Workspace::new(cfg, Discretization::default()).unwrap();
    let h = vec![HarmonicExpansion::disk(0, vec![], vec![c(1.0, 0.0)], c(0.0, 0.0))];
    let sol = jump_solve(&ws, &h, 16).unwrap();
    assert!(sol.residual < 1e-9);
    let inside = rho / (q - cc);
    assert!((sol.h_omega[0].constant - inside).norm() < 1e-9);
    for z in [c(2.0, 0.0), c(-1.0, 2.0), c(0.5, -1.5)] {
        let expect = -rho / (z - cc) + inside;
        assert!((sol.h_sigma.value(&ws.cfg, z).unwrap() - expect).norm() < 1e-9);
        assert!((apply_j(&ws, &h, z).unwrap() - expect).norm() < 1e-9);
    }
}

#[test]
fn derivatives_of_j_match_finite_differences_on_the_sphere() {
    let ws = two_disk_sphere();
    let h = data(2);
    let abar: Vec<FormExpansion> = h.iter().map(|x| split_harmonic(x).1).collect();
    for z in [c(0.0, 1.2), c(0.2, -0.9), c(3.0, 0.5)] {
        let (d, db) = wirtinger(|w| apply_j(&ws, &h, w).unwrap(), z);
        assert!((d - apply_dj(&ws, &h, z).unwrap()).norm() < 1e-6);
        assert!((d + apply_t(&ws, &abar, Target::Sigma, z).unwrap()).norm() < 1e-6);
        assert!(db.norm() < 1e-6);
        assert!(apply_dbar_j(&ws, &h, z).unwrap().norm() < 1e-10);
    }
}

#[test]
fn j_of_w_data_is_holomorphic_on_the_torus() {
    let ws = torus();
    let hw = project_w(&ws.cfg, &data(2)).unwrap();
    for z in [c(0.5, 0.2), c(0.1, 0.6), c(0.9, 0.4)] {
        let (_, db) = wirtinger(|w| apply_j(&ws, &hw, w).unwrap(), z);
        assert!(db.norm() < 1e-6);
        assert!(apply_dbar_j(&ws, &hw, z).unwrap().norm() < 1e-8);
    }
    assert!(apply_j(&ws, &hw, ws.cfg.q).unwrap().norm() < 1e-10);
}

#[test]
fn j_is_doubly_periodic_on_the_torus() {
    let ws = torus();
    let hw = project_w(&ws.cfg, &data(2)).unwrap();
    let tau = ws.cfg.surface.tau;
    let z = c(0.5, 0.2);
    let base = apply_j(&ws, &hw, z).unwrap();
    for shift in [c(1.0, 0.0), tau, -tau + 1.0] {
        assert!((apply_j(&ws, &hw, z + shift).unwrap() - base).norm() < 1e-9);
    }
}
