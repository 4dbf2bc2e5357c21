//! `--mode kernel`: the (ℓ, σₙ²) grid sweep with the three kernel
//! candidates, cells spread over the worker pool.

use rayon::prelude::*;

use pstab::kernel::{
    grid_cells, grid_cluster_count, kernel_cell, kernel_stopping_rule, kmeans_cluster,
    KernelGridParams,
};
use pstab::rng::derive_seed;

use crate::config::ExperimentConfig;
use crate::error::AppResult;
use crate::loaders::load_dataset;
use crate::report::{write_grid_csv, write_json, KernelReport, SCHEMA_VERSION};

pub fn run_kernel_experiment(cfg: &ExperimentConfig) -> AppResult<KernelReport> {
    let dataset_spec = cfg.require_dataset()?;
    let data = load_dataset(dataset_spec, cfg.target_column.as_deref(), cfg.seed)?;
    let d = data.n_points();

    let params = KernelGridParams {
        length_scales: cfg.length_scales.clone(),
        noise_levels: cfg.noise_levels.clone(),
        rank: cfg.rank,
        sketch_k: cfg.k,
        clusters: cfg.clusters,
        max_iterations: cfg.max_iterations.unwrap_or(10_000),
        seed: cfg.seed,
    };
    let c = grid_cluster_count(&params, d);
    let clustering = kmeans_cluster(&data, c, derive_seed(params.seed, u64::MAX - 1))?;
    let rule = kernel_stopping_rule(d, params.max_iterations)?;

    // same per-cell seeds as the serial sweep, so thread count cannot change
    // the results
    let cells = grid_cells(&params)
        .into_par_iter()
        .map(|(ell, noise, lowrank_seed, select_seed)| {
            kernel_cell(
                &data,
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
        .collect::<Result<Vec<_>, _>>()?;

    let report = KernelReport {
        schema_version: SCHEMA_VERSION,
        mode: "kernel",
        dataset: dataset_spec.to_string(),
        dim: d,
        n_features: data.n_features(),
        clusters: clustering.n_clusters(),
        rank: params.rank,
        k: params.sketch_k,
        seed: params.seed,
        max_iterations: params.max_iterations,
        cells,
    };

    if let Some(out) = &cfg.out {
        write_json(out, &report)?;
        write_grid_csv(out, &report.cells)?;
    }
    Ok(report)
}

pub fn print_kernel(report: &KernelReport) {
    println!(
        "dataset {} (d = {}, p = {}), {} clusters, rank {}, k = {}",
        report.dataset, report.dim, report.n_features, report.clusters, report.rank, report.k
    );
    println!(
        "{:>12} {:>9} {:>10} {:>10} {:>10} {:>10}  {}",
        "length", "noise", "none", "block", "lowrank", "selected", "chosen"
    );
    for c in &report.cells {
        println!(
            "{:>12} {:>9} {:>10} {:>10} {:>10} {:>10}  {}",
            c.length_scale, c.noise, c.iters_none, c.iters_block, c.iters_lowrank,
            c.iters_selected, c.chosen
        );
    }
}
