//! Experiment driver: configuration files, suites and reports.

pub mod config;
pub mod report;
pub mod suites;

use config::{ConfigFile, RunSettings};
use report::{coverage, Meta, Recorder, Report};
use schiffer_core::domains::Workspace;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Identities,
    Isomorphism,
    Jump,
    Density,
    Adjoint,
    All,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Identities => "identities",
            Experiment::Isomorphism => "isomorphism",
            Experiment::Jump => "jump",
            Experiment::Density => "density",
            Experiment::Adjoint => "adjoint",
            Experiment::All => "all",
        }
    }

    fn includes(self, other: Experiment) -> bool {
        self == Experiment::All || self == other
    }
}

pub fn config_hash(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs `experiment` on a validated config.
pub fn run(file: &ConfigFile, bytes: &[u8], experiment: Experiment, set: &RunSettings) -> Report {
    let mut rec = Recorder::default();
    let mut timings = BTreeMap::new();
    let mut extra = Vec::new();
    if let Some(cfg) = file.surface_config() {
        match Workspace::new(cfg, set.disc) {
            Ok(ws) => match suites::SurfaceRun::new(&ws, set) {
                Ok(sr) => {
                    let mut time = |name: &str, f: &mut dyn FnMut(&mut Recorder)| {
                        let start = Instant::now();
                        f(&mut rec);
                        timings.insert(name.to_string(), start.elapsed().as_secs_f64());
                    };
                    if experiment.includes(Experiment::Identities) {
                        time("identities", &mut |r| suites::identities(&sr, r));
                    }
                    if experiment.includes(Experiment::Isomorphism) {
                        time("isomorphism", &mut |r| suites::isomorphism(&sr, r));
                    }
                    if experiment.includes(Experiment::Jump) {
                        time("jump", &mut |r| suites::jump(&sr, r, &mut extra));
                    }
                    if experiment.includes(Experiment::Density) {
                        time("surface_density", &mut |r| suites::surface_density(&sr, r));
                    }
                }
                Err(e) => rec.error("surface_grids", "th:general_T_is_isomorphism", 0.0, e),
            },
            Err(e) => rec.error("workspace", "th:general_T_is_isomorphism", 0.0, e),
        }
    }
    if experiment.includes(Experiment::Density) {
        let start = Instant::now();
        suites::density(&file.density, set, &mut rec);
        timings.insert("density".into(), start.elapsed().as_secs_f64());
    }
    if experiment.includes(Experiment::Adjoint) {
        let start = Instant::now();
        suites::adjoint(&file.density, set, &mut rec);
        timings.insert("adjoint".into(), start.elapsed().as_secs_f64());
    }
    timings.extend(extra);
    let coverage = coverage(&rec.checks);
    Report {
        meta: Meta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash(bytes),
            config_name: file.name.clone(),
            seed: set.seed,
            experiment: experiment.name().to_string(),
            truncation: set.truncation,
            quadrature: set.disc,
        },
        checks: rec.checks,
        tables: rec.tables,
        coverage,
        timings,
    }
}
