//! Runs `schiffer all` on the shipped configs and prints one line per acceptance criterion.

use serde_json::Value;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

struct Run {
    exit: i32,
    report: Value,
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_all(name: &str, out: &Path) -> Run {
    let status = Command::new(env!("CARGO_BIN_EXE_schiffer"))
        .args(["all", "--config"])
        .arg(configs_dir().join(format!("{name}.json")))
        .arg("--out")
        .arg(out)
        .status()
        .expect("binary runs");
    let text = std::fs::read_to_string(out.join("report.json")).expect("report written");
    Run { exit: status.code().unwrap_or(-1), report: serde_json::from_str(&text).expect("valid json") }
}

fn check<'a>(r: &'a Run, name: &str) -> Option<&'a Value> {
    r.report["checks"].as_array()?.iter().find(|c| c["name"] == name)
}

fn measured(r: &Run, name: &str) -> f64 {
    check(r, name).and_then(|c| c["measured"].as_f64()).unwrap_or(f64::NAN)
}

/// `measured < bound`, with NaN and missing checks failing.
fn below(r: &Run, name: &str, bound: f64) -> bool {
    measured(r, name) < bound
}

fn named_with_suffix<'a>(r: &'a Run, suffix: &str) -> Vec<&'a Value> {
    r.report["checks"].as_array().map(|v| v.iter().filter(|c| c["name"].as_str().is_some_and(|n| n.ends_with(suffix))).collect()).unwrap_or_default()
}

fn main() {
    let tmp = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let runs: BTreeMap<&str, Run> = ["a", "b", "c", "d"].into_iter().map(|n| (n, run_all(n, &tmp.path().join(n)))).collect();
    let elapsed = start.elapsed().as_secs_f64();
    let (a, b, c, d) = (&runs["a"], &runs["b"], &runs["c"], &runs["d"]);

    let mut results = Vec::new();

    let jump_time = a.report["timings"]["jump_closed_form"].as_f64().unwrap_or(f64::INFINITY);
    results.push((
        below(a, "zbar_jump_boundary_residual", 1e-9)
            && below(a, "zbar_jump_closed_form_solution", 1e-9)
            && below(a, "zbar_j_closed_form_pointwise", 1e-9)
            && jump_time < 5.0,
        format!(
            "jump closed form on (a): residual {:.2e}, solution error {:.2e}, {:.3} s",
            measured(a, "zbar_jump_boundary_residual"),
            measured(a, "zbar_jump_closed_form_solution"),
            jump_time
        ),
    ));

    results.push((
        below(a, "disk_t_singular_values_are_one", 1e-8) && below(a, "disk_t_section_is_diagonal", 1e-8),
        format!(
            "disk T section at N=8: |s-1| {:.2e}, off-diagonal {:.2e}",
            measured(a, "disk_t_singular_values_are_one"),
            measured(a, "disk_t_section_is_diagonal")
        ),
    ));

    results.push((
        below(b, "left_inverse_on_v", 1e-6) && below(c, "left_inverse_on_v", 1e-6),
        format!("left inverse on V: (b) {:.2e}, (c) {:.2e}", measured(b, "left_inverse_on_v"), measured(c, "left_inverse_on_v")),
    ));

    results.push((
        below(b, "preimage_reproduces_exact_forms", 1e-6) && below(b, "preimage_lies_in_v", 1e-8),
        format!(
            "surjectivity on (b): reproduction {:.2e}, v_defect {:.2e}",
            measured(b, "preimage_reproduces_exact_forms"),
            measured(b, "preimage_lies_in_v")
        ),
    ));

    let djo = ["djo_line1_sigma", "djo_line2_omega", "djo_line3_all_regions"];
    let djo_worst = [a, b, c].iter().flat_map(|r| djo.iter().map(|n| measured(r, n))).fold(0.0, |m: f64, v| if v.is_nan() { f64::NAN } else { m.max(v) });
    results.push((djo_worst < 1e-6, format!("derivative identities on (a)-(c): worst {djo_worst:.2e}")));

    let adj = ["disk_in_disk_adjoint_discrepancy", "annulus_in_annulus_adjoint_discrepancy"];
    results.push((
        adj.iter().all(|n| below(d, n, 1e-7)),
        format!("adjoint discrepancy: disk {:.2e}, annulus {:.2e}", measured(d, adj[0]), measured(d, adj[1])),
    ));

    let floors = named_with_suffix(d, "_s_section_trivial_kernel");
    let tails = named_with_suffix(d, "_s_section_tail_decreasing");
    let min_floor = floors.iter().map(|c| c["measured"].as_f64().unwrap_or(f64::NAN)).fold(f64::INFINITY, f64::min);
    let max_ratio = tails.iter().map(|c| c["measured"].as_f64().unwrap_or(f64::NAN)).fold(0.0, f64::max);
    results.push((
        !floors.is_empty() && tails.len() == floors.len() && min_floor > 1e-10 && max_ratio < 1.0,
        format!("S sections: smallest singular value {min_floor:.2e}, largest tail ratio {max_ratio:.3}"),
    ));

    let dev = measured(d, "annulus_counterexample_residual_squared_matches_norm");
    results.push((
        below(d, "annulus_positive_final_residual", 1e-6) && dev < 1e-2,
        format!("density: positive residual {:.2e}, counterexample deviation from 3π {:.2e}", measured(d, "annulus_positive_final_residual"), dev),
    ));

    results.push((
        below(c, "torus_green_double_periodicity", 1e-10) && below(c, "torus_dz_norm_is_im_tau", 1e-10) && below(c, "torus_bergman_reproduces_dz", 1e-8),
        format!(
            "torus: periodicity {:.2e}, |dz|^2 {:.2e}, reproduction {:.2e}",
            measured(c, "torus_green_double_periodicity"),
            measured(c, "torus_dz_norm_is_im_tau"),
            measured(c, "torus_bergman_reproduces_dz")
        ),
    ));

    let mut covered: BTreeMap<String, u64> = BTreeMap::new();
    let mut listed = true;
    for r in runs.values() {
        let cov = r.report["coverage"].as_array().cloned().unwrap_or_default();
        listed &= !cov.is_empty();
        for e in cov {
            *covered.entry(e["anchor"].as_str().unwrap_or_default().to_string()).or_default() += e["checks"].as_u64().unwrap_or(0);
        }
    }
    let missing: Vec<&String> = covered.iter().filter(|(_, &n)| n == 0).map(|(a, _)| a).collect();
    let exits: Vec<i32> = runs.values().map(|r| r.exit).collect();
    results.push((
        exits.iter().all(|&e| e == 0) && listed && missing.is_empty() && elapsed < 600.0,
        format!("all runs: exit codes {exits:?}, {elapsed:.1} s, uncovered anchors {missing:?}"),
    ));

    for (i, (ok, msg)) in results.iter().enumerate() {
        println!("criterion {}: {} {}", i + 1, if *ok { "PASS" } else { "FAIL" }, msg);
    }
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, r)| !r.0).map(|(i, _)| i + 1).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
