//! Report records and their JSON / CSV output.

use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

/// How a measurement is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Passes when `measured < tolerance`.
    Below,
    /// Negative control: passes when `measured ≥ tolerance`.
    AtLeast,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub measured: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub name: String,
    pub path: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Coverage {
    pub anchor: String,
    pub checks: usize,
    pub covered: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub version: String,
    pub config_hash: String,
    pub config_name: Option<String>,
    pub seed: u64,
    pub experiment: String,
    pub truncation: usize,
    pub quadrature: schiffer_core::domains::Discretization,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub meta: Meta,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    pub coverage: Vec<Coverage>,
    /// Wall-clock seconds per suite; kept apart from the deterministic fields.
    pub timings: BTreeMap<String, f64>,
}

pub const COUNTEREXAMPLE: &str = "annulus counterexample: bounded point evaluation on the exterior Dirichlet space";

/// Every anchor an `all` run is expected to exercise.
pub const IN_SCOPE: &[&str] = &[
    "th:general_T_is_isomorphism",
    "th:jump_proper",
    "th:dirichlet_density_squeeze",
    "co:embedding_in_double",
    "th:Bergman_comparison_dense",
    "eq:jump_definition",
    "eq:conjugate_definition",
    "eq:derivative_J_identities",
    "eq:TOsig_sum",
    "eq:TOOmega_sum",
    "eq:SOR_sum",
    "JE",
    "DJO",
    "eq:J_both_sides",
    "eq:Jprime_definition",
    "eq:forms_same_average",
    "eq:J_J'_same",
    "CDJO",
    "th:extension_collar",
    "co:holo_extension",
    "re:ignore_holomorphic",
    "th:average_Xr_dense",
    "VBC",
    "TMC",
    "th:transmitted_jump",
    "NBV",
    "TIS",
    "th:transmitted_jump_forms",
    "TII",
    "th:derivative_of_jump_isomorphism",
    "th:jump_isomorphism",
    "th:jump_isomorphism_just_one_side",
    "th:jump_dependable",
    "co:GX_r_antiholo_is_dense",
    "th:central_density_theorem",
    "co:density_general_isotopy",
    "th:form_general_isotopy_density",
    "th:restriction_adjoint",
    COUNTEREXAMPLE,
];

/// Accumulates checks and tables for one run.
#[derive(Debug, Default)]
pub struct Recorder {
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl Recorder {
    pub fn below(&mut self, name: impl Into<String>, anchor: &str, measured: f64, tolerance: f64) {
        let pass = measured.is_finite() && measured < tolerance;
        self.push(name.into(), anchor, measured, tolerance, Comparison::Below, pass, None);
    }

    pub fn at_least(&mut self, name: impl Into<String>, anchor: &str, measured: f64, tolerance: f64, note: &str) {
        let pass = measured.is_finite() && measured >= tolerance;
        self.push(name.into(), anchor, measured, tolerance, Comparison::AtLeast, pass, Some(note.to_string()));
    }

    /// A check that could not be evaluated.
    pub fn error(&mut self, name: impl Into<String>, anchor: &str, tolerance: f64, err: impl std::fmt::Display) {
        self.push(name.into(), anchor, f64::NAN, tolerance, Comparison::Below, false, Some(err.to_string()));
    }

    /// Records `measured` if available, otherwise the error.
    pub fn below_or_err<E: std::fmt::Display>(&mut self, name: impl Into<String>, anchor: &str, measured: Result<f64, E>, tolerance: f64) {
        match measured {
            Ok(m) => self.below(name, anchor, m, tolerance),
            Err(e) => self.error(name, anchor, tolerance, e),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, name: String, anchor: &str, measured: f64, tolerance: f64, comparison: Comparison, pass: bool, note: Option<String>) {
        self.checks.push(Check { name, anchor: anchor.to_string(), measured, tolerance, comparison, pass, note });
    }

    pub fn table(&mut self, name: &str, columns: &[&str], rows: Vec<Vec<f64>>) {
        self.tables.push(Table {
            name: name.to_string(),
            path: format!("{name}.csv"),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows,
        });
    }
}

pub fn coverage(checks: &[Check]) -> Vec<Coverage> {
    IN_SCOPE
        .iter()
        .map(|a| {
            let n = checks.iter().filter(|c| c.anchor == *a).count();
            Coverage { anchor: a.to_string(), checks: n, covered: n > 0 }
        })
        .collect()
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Writes `report.json` and one CSV per table into `dir`.
pub fn emit(report: &Report, dir: &Path) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    for t in &report.tables {
        let mut w = csv::Writer::from_path(dir.join(&t.path))?;
        w.write_record(&t.columns)?;
        for row in &t.rows {
            w.write_record(row.iter().map(|v| format!("{v:e}")))?;
        }
        w.flush()?;
    }
    let path = dir.join("report.json");
    let mut f = std::fs::File::create(&path)?;
    serde_json::to_writer_pretty(&mut f, report)?;
    f.write_all(b"\n")?;
    Ok(path)
}
