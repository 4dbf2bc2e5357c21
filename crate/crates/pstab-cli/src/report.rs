//! Report schemas and writers. JSON output is versioned and deterministic:
//! identical config and seed produce byte-identical files, so no wall-clock
//! data goes in (timings are printed to stderr instead).

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use pstab::kernel::KernelCell;

use crate::error::{AppError, AppResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub schema_version: u32,
    pub mode: &'static str,
    pub matrix: String,
    pub candidate: String,
    pub dim: usize,
    pub nnz: usize,
    pub k: usize,
    pub seed: u64,
    pub estimate: f64,
    pub solve_count: u64,
    pub spmv_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateSolve {
    pub label: String,
    pub iterations: usize,
    pub converged: bool,
}

/// Approximation-ratio summary: iterations of a policy divided by the best
/// candidate's iterations, so 1.00 is optimal. Non-converged candidates are
/// charged the iteration cap and flag the row as censored (the worst-case and
/// random columns are then lower bounds).
#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub label: String,
    pub worst_case: f64,
    pub random: f64,
    pub selector_min: f64,
    pub selector_mean: f64,
    pub selector_max: f64,
    pub censored: bool,
    pub all_censored: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StoppingInfo {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub absolute_tol: Option<f64>,
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SparseReport {
    pub schema_version: u32,
    pub mode: &'static str,
    pub matrix: String,
    pub dim: usize,
    pub nnz: usize,
    pub seed: u64,
    pub algorithm: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub trials: usize,
    pub stopping: StoppingInfo,
    pub candidates: Vec<CandidateSolve>,
    pub ratio: RatioRow,
    /// How often each candidate was chosen across the trials.
    pub chosen_counts: Vec<u64>,
    /// Cost audit, averaged over trials.
    pub avg_solves_per_trial: f64,
    pub avg_spmv_per_trial: f64,
    pub avg_gaussian_draws_per_trial: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    pub schema_version: u32,
    pub mode: &'static str,
    pub dataset: String,
    pub dim: usize,
    pub n_features: usize,
    pub clusters: usize,
    pub rank: usize,
    pub k: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub cells: Vec<KernelCell>,
}

pub fn write_json<T: Serialize>(out: &str, report: &T) -> AppResult<PathBuf> {
    let path = PathBuf::from(format!("{out}.json"));
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| AppError::Config(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

fn iterations_cell(solve: &CandidateSolve) -> String {
    if solve.converged {
        solve.iterations.to_string()
    } else {
        "---".to_string()
    }
}

/// Table-style CSV of per-candidate iteration counts; non-convergence is
/// written as `---`.
pub fn write_iterations_csv(out: &str, solves: &[CandidateSolve]) -> AppResult<PathBuf> {
    let path = PathBuf::from(format!("{out}_iterations.csv"));
    let mut w = fs::File::create(&path)?;
    writeln!(w, "candidate,iterations,converged")?;
    for s in solves {
        writeln!(w, "{},{},{}", s.label, iterations_cell(s), s.converged)?;
    }
    Ok(path)
}

pub fn write_ratio_csv(out: &str, row: &RatioRow) -> AppResult<PathBuf> {
    let path = PathBuf::from(format!("{out}_ratios.csv"));
    let mut w = fs::File::create(&path)?;
    writeln!(
        w,
        "matrix,worst_case,random,selector_min,selector_mean,selector_max,censored"
    )?;
    writeln!(
        w,
        "{},{:.2},{:.2},{:.2},{:.2},{:.2},{}",
        row.label,
        row.worst_case,
        row.random,
        row.selector_min,
        row.selector_mean,
        row.selector_max,
        row.censored
    )?;
    Ok(path)
}

pub fn write_grid_csv(out: &str, cells: &[KernelCell]) -> AppResult<PathBuf> {
    let path = PathBuf::from(format!("{out}_grid.csv"));
    let mut w = fs::File::create(&path)?;
    writeln!(
        w,
        "length_scale,noise,iters_none,iters_block,iters_lowrank,iters_selected,chosen,log10_block,log10_lowrank,log10_selected"
    )?;
    for c in cells {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{:.2},{:.2},{:.2}",
            c.length_scale,
            c.noise,
            c.iters_none,
            c.iters_block,
            c.iters_lowrank,
            c.iters_selected,
            c.chosen,
            c.log10_ratio_block,
            c.log10_ratio_lowrank,
            c.log10_ratio_selected
        )?;
    }
    Ok(path)
}
