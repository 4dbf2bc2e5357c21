//! `--mode estimate`: one stability estimate for one candidate, optionally
//! checked against the deterministic column-by-column value.

use pstab::stability::{exact_stability, stab_estimate};

use crate::config::{build_candidates, ExperimentConfig};
use crate::error::{AppError, AppResult};
use crate::loaders::load_matrix;
use crate::report::{EstimateReport, SCHEMA_VERSION};

pub fn run_estimate(cfg: &ExperimentConfig) -> AppResult<EstimateReport> {
    let matrix_spec = cfg.require_matrix()?;
    let a = load_matrix(matrix_spec, cfg.seed)?;
    if cfg.candidates.len() != 1 {
        return Err(AppError::config(format!(
            "estimate mode takes exactly one candidate, got {}",
            cfg.candidates.len()
        )));
    }
    let candidates = build_candidates(&a, &cfg.candidates)?;
    let m = candidates[0].as_ref();

    let est = stab_estimate(&a, m, cfg.k, cfg.seed)?;
    let (exact, relative_error) = if cfg.exact {
        let exact = exact_stability(&a, m)?;
        // relative error is ill-defined at exact = 0; fall back to absolute
        let rel = if exact > 0.0 {
            (est.value - exact).abs() / exact
        } else {
            est.value
        };
        (Some(exact), Some(rel))
    } else {
        (None, None)
    };

    Ok(EstimateReport {
        schema_version: SCHEMA_VERSION,
        mode: "estimate",
        matrix: matrix_spec.to_string(),
        candidate: m.label(),
        dim: a.dim(),
        nnz: a.nnz(),
        k: est.k,
        seed: est.seed,
        estimate: est.value,
        solve_count: est.solve_count,
        spmv_count: est.spmv_count,
        exact,
        relative_error,
    })
}

pub fn print_estimate(report: &EstimateReport) {
    println!(
        "S = {:.6e}  (candidate {}, k = {}, seed = {})",
        report.estimate, report.candidate, report.k, report.seed
    );
    println!(
        "cost: {} preconditioner solves, {} matrix-vector products",
        report.solve_count, report.spmv_count
    );
    if let (Some(exact), Some(rel)) = (report.exact, report.relative_error) {
        println!("exact = {exact:.6e}  relative error = {rel:.3e}");
    }
}
