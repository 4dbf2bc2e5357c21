//! `--mode sparse`: solve with every candidate preconditioner, run the
//! selector over many independent trials, and summarize how close the
//! selected preconditioner's iteration count comes to the best possible.

use rayon::prelude::*;

use pstab::pcg::{pcg_solve, StoppingRule};
use pstab::rng::{derive_seed, rng_stream, standard_normal_vec};
use pstab::select::{adaptive_select, select_preconditioner, SelectionReport};
use pstab::Preconditioner;

use crate::config::{build_candidates, Algorithm, ExperimentConfig};
use crate::error::AppResult;
use crate::report::{
    write_iterations_csv, write_json, write_ratio_csv, CandidateSolve, RatioRow, SparseReport,
    StoppingInfo, SCHEMA_VERSION,
};

/// Stream index reserved for the fixed right-hand side.
const RHS_STREAM: u64 = u64::MAX - 2;

pub fn run_sparse_experiment(cfg: &ExperimentConfig) -> AppResult<SparseReport> {
    let matrix_spec = cfg.require_matrix()?;
    let a = load(cfg, matrix_spec)?;
    let d = a.dim();
    let candidates = build_candidates(&a, &cfg.candidates)?;
    let refs: Vec<&dyn Preconditioner> = candidates.iter().map(|b| b.as_ref()).collect();

    let relative_tol = cfg.relative_tol.or(Some(1e-9));
    let max_iterations = cfg.max_iterations.unwrap_or(50_000);
    let rule = StoppingRule::new(relative_tol, cfg.absolute_tol, max_iterations)?;

    // one fixed b ~ N(0, I) for the whole experiment
    let b = standard_normal_vec(&mut rng_stream(derive_seed(cfg.seed, RHS_STREAM), 0), d);

    // solve once per candidate
    let solves: Vec<CandidateSolve> = refs
        .par_iter()
        .map(|m| {
            pcg_solve(&a, m, &b, &rule, None).map(|res| CandidateSolve {
                label: m.label(),
                iterations: res.iterations,
                converged: res.converged,
            })
        })
        .collect::<Result<_, _>>()?;

    // non-converged candidates are charged the iteration cap
    let effective: Vec<usize> = solves
        .iter()
        .map(|s| if s.converged { s.iterations } else { max_iterations })
        .collect();
    let censored = solves.iter().any(|s| !s.converged);
    let all_censored = solves.iter().all(|s| !s.converged);
    let min_iters = *effective.iter().min().expect("at least one candidate") as f64;
    let max_iters = *effective.iter().max().expect("at least one candidate") as f64;
    let mean_iters = effective.iter().sum::<usize>() as f64 / effective.len() as f64;

    // selector trials with per-trial derived seeds: parallel and serial runs
    // see the same stream assignments, so the report is order-independent
    let trial_reports: Vec<SelectionReport> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let seed_t = derive_seed(cfg.seed, t as u64);
            match cfg.algorithm {
                Algorithm::Alg2 => select_preconditioner(&a, &refs, cfg.k, seed_t, true),
                Algorithm::Alg3 => adaptive_select(&a, &refs, cfg.epsilon, cfg.delta, seed_t),
            }
        })
        .collect::<Result<_, _>>()?;

    let mut chosen_counts = vec![0u64; refs.len()];
    let mut ratios = Vec::with_capacity(cfg.trials);
    let (mut sum_solves, mut sum_spmv, mut sum_draws) = (0u64, 0u64, 0u64);
    for report in &trial_reports {
        chosen_counts[report.chosen_index] += 1;
        ratios.push(effective[report.chosen_index] as f64 / min_iters);
        sum_solves += report.total_solves;
        sum_spmv += report.total_spmv;
        sum_draws += report.gaussian_draws;
    }
    let n_trials = cfg.trials as f64;
    let ratio = RatioRow {
        label: matrix_spec.to_string(),
        worst_case: max_iters / min_iters,
        random: mean_iters / min_iters,
        selector_min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        selector_mean: ratios.iter().sum::<f64>() / n_trials,
        selector_max: ratios.iter().copied().fold(0.0, f64::max),
        censored,
        all_censored,
    };

    let report = SparseReport {
        schema_version: SCHEMA_VERSION,
        mode: "sparse",
        matrix: matrix_spec.to_string(),
        dim: d,
        nnz: a.nnz(),
        seed: cfg.seed,
        algorithm: cfg.algorithm.as_str(),
        k: matches!(cfg.algorithm, Algorithm::Alg2).then_some(cfg.k),
        epsilon: matches!(cfg.algorithm, Algorithm::Alg3).then_some(cfg.epsilon),
        delta: matches!(cfg.algorithm, Algorithm::Alg3).then_some(cfg.delta),
        trials: cfg.trials,
        stopping: StoppingInfo {
            relative_tol,
            absolute_tol: cfg.absolute_tol,
            max_iterations,
        },
        candidates: solves,
        ratio,
        chosen_counts,
        avg_solves_per_trial: sum_solves as f64 / n_trials,
        avg_spmv_per_trial: sum_spmv as f64 / n_trials,
        avg_gaussian_draws_per_trial: sum_draws as f64 / n_trials,
    };

    if let Some(out) = &cfg.out {
        write_json(out, &report)?;
        write_iterations_csv(out, &report.candidates)?;
        write_ratio_csv(out, &report.ratio)?;
    }
    Ok(report)
}

fn load(cfg: &ExperimentConfig, spec: &str) -> AppResult<pstab::CsrMatrix> {
    crate::loaders::load_matrix(spec, cfg.seed)
}

pub fn print_sparse(report: &SparseReport) {
    println!(
        "matrix {} (d = {}, nnz = {}), {} trials of {}",
        report.matrix, report.dim, report.nnz, report.trials, report.algorithm
    );
    println!("{:<14} {:>12} {:>10}", "candidate", "iterations", "converged");
    for c in &report.candidates {
        let iters = if c.converged {
            c.iterations.to_string()
        } else {
            "---".to_string()
        };
        println!("{:<14} {:>12} {:>10}", c.label, iters, c.converged);
    }
    let r = &report.ratio;
    println!(
        "ratios: worst {:.2}  random {:.2}  selector min/mean/max {:.2}/{:.2}/{:.2}{}",
        r.worst_case,
        r.random,
        r.selector_min,
        r.selector_mean,
        r.selector_max,
        if r.censored { "  (censored)" } else { "" }
    );
    println!(
        "selector cost per trial: {:.1} solves, {:.1} products, {:.0} gaussian draws",
        report.avg_solves_per_trial, report.avg_spmv_per_trial, report.avg_gaussian_draws_per_trial
    );
}
