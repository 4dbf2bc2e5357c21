//! The kernel-regression grid experiment: for every `(ℓ, σₙ²)` pair, build
//! the system, let the selector pick among {identity, geometric block,
//! geometric low-rank}, and validate every choice with actual conjugate
//! gradient solves.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::kernel::{
    geometric_block_precond, geometric_lowrank_precond, gram_matrix, kmeans_cluster, Dataset,
};
use crate::pcg::{pcg_solve, StoppingRule};
use crate::precond::{IdentityPrecond, Preconditioner};
use crate::rng::derive_seed;
use crate::select::select_preconditioner;

/// Parameters of the grid sweep.
#[derive(Debug, Clone)]
pub struct KernelGridParams {
    pub length_scales: Vec<f64>,
    pub noise_levels: Vec<f64>,
    /// Rank of the low-rank candidate.
    pub rank: usize,
    /// Sketch size handed to the selector.
    pub sketch_k: usize,
    /// Cluster count; `None` means `⌈√d⌉`.
    pub clusters: Option<usize>,
    pub max_iterations: usize,
    pub seed: u64,
}

impl KernelGridParams {
    pub fn new(length_scales: Vec<f64>, noise_levels: Vec<f64>, seed: u64) -> Self {
        KernelGridParams {
            length_scales,
            noise_levels,
            rank: 25,
            sketch_k: 10,
            clusters: None,
            max_iterations: 10_000,
            seed,
        }
    }
}

/// One grid cell: iteration counts for every candidate and for the selected
/// one, plus the base-10 log ratios against the unpreconditioned solve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct KernelCell {
    pub length_scale: f64,
    pub noise: f64,
    pub iters_none: usize,
    pub iters_block: usize,
    pub iters_lowrank: usize,
    pub iters_selected: usize,
    pub converged_none: bool,
    pub converged_block: bool,
    pub converged_lowrank: bool,
    /// Which candidate the selector picked (0 = identity, 1 = block,
    /// 2 = low-rank) and its label.
    pub chosen_index: usize,
    pub chosen: String,
    /// Stability estimates per candidate, in candidate order.
    pub estimates: Vec<f64>,
    pub log10_ratio_block: f64,
    pub log10_ratio_lowrank: f64,
    pub log10_ratio_selected: f64,
}

/// The default stopping rule of the sweep: absolute tolerance `10⁻⁵·√d` or a
/// (practically vacuous) relative tolerance `10⁻¹⁵·‖b‖`, whichever is met
/// first, capped at `max_iterations`.
pub fn kernel_stopping_rule(d: usize, max_iterations: usize) -> Result<StoppingRule> {
    StoppingRule::new(Some(1e-15), Some(1e-5 * (d as f64).sqrt()), max_iterations)
}

/// The `(ℓ, σₙ²)` pairs of the grid in row-major order, with the per-cell
/// seeds every cell derives its randomness from. Exposed so a driver can run
/// cells on a worker pool and still match the serial sweep bit for bit.
pub fn grid_cells(params: &KernelGridParams) -> Vec<(f64, f64, u64, u64)> {
    let mut out = Vec::new();
    let mut cell_idx = 0u64;
    for &ell in &params.length_scales {
        for &noise in &params.noise_levels {
            out.push((
                ell,
                noise,
                derive_seed(params.seed, 2 * cell_idx),
                derive_seed(params.seed, 2 * cell_idx + 1),
            ));
            cell_idx += 1;
        }
    }
    out
}

/// The cluster count the sweep uses: `⌈√d⌉` unless overridden.
pub fn grid_cluster_count(params: &KernelGridParams, d: usize) -> usize {
    params
        .clusters
        .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
        .min(d)
}

/// Runs one grid cell: builds the Gram system, factors the candidates
/// {identity, geometric block, geometric low-rank}, selects with one shared
/// sketch, and solves with every candidate. The selected column reuses the
/// matching candidate's solve, so a cell whose selection lands on the
/// identity has a log ratio of exactly zero.
pub fn kernel_cell(
    data: &Dataset,
    clustering: &crate::kernel::Clustering,
    rule: &StoppingRule,
    length_scale: f64,
    noise: f64,
    rank: usize,
    sketch_k: usize,
    lowrank_seed: u64,
    select_seed: u64,
) -> Result<KernelCell> {
    let d = data.n_points();
    let sys = gram_matrix(data, length_scale, noise)?;
    let identity = IdentityPrecond::new(d);
    let block = geometric_block_precond(&sys, clustering)?;
    let lowrank = geometric_lowrank_precond(&sys, clustering, rank, lowrank_seed)?;
    let candidates: [&dyn Preconditioner; 3] = [&identity, &block, &lowrank];

    let report = select_preconditioner(&sys, &candidates, sketch_k, select_seed, true)?;

    let solves: Vec<_> = candidates
        .iter()
        .map(|m| pcg_solve(&sys, m, data.targets(), rule, None))
        .collect::<Result<_>>()?;

    let iters: Vec<usize> = solves.iter().map(|s| s.iterations).collect();
    let ratio = |i: usize| -> f64 { (iters[i] as f64 / iters[0] as f64).log10() };
    Ok(KernelCell {
        length_scale,
        noise,
        iters_none: iters[0],
        iters_block: iters[1],
        iters_lowrank: iters[2],
        iters_selected: iters[report.chosen_index],
        converged_none: solves[0].converged,
        converged_block: solves[1].converged,
        converged_lowrank: solves[2].converged,
        chosen_index: report.chosen_index,
        chosen: report.candidate_labels[report.chosen_index].clone(),
        estimates: report.estimates.iter().map(|e| e.unwrap()).collect(),
        log10_ratio_block: ratio(1),
        log10_ratio_lowrank: ratio(2),
        log10_ratio_selected: ratio(report.chosen_index),
    })
}

/// Runs the sweep serially. Clustering happens once (it depends only on the
/// points); each cell then goes through [`kernel_cell`].
pub fn kernel_experiment(data: &Dataset, params: &KernelGridParams) -> Result<Vec<KernelCell>> {
    if params.length_scales.is_empty() || params.noise_levels.is_empty() {
        return Err(Error::InvalidParameter("parameter grids must be nonempty".into()));
    }
    let d = data.n_points();
    let c = grid_cluster_count(params, d);
    let clustering = kmeans_cluster(data, c, derive_seed(params.seed, u64::MAX - 1))?;
    let rule = kernel_stopping_rule(d, params.max_iterations)?;

    grid_cells(params)
        .into_iter()
        .map(|(ell, noise, lowrank_seed, select_seed)| {
            kernel_cell(
                data,
                &clustering,
                &rule,
                ell,
                noise,
                params.rank,
                params.sketch_k,
                lowrank_seed,
                select_seed,
            )
        })
        .collect()
}
