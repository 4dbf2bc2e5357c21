use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use pstab_cli::config::{ConfigFile, ExperimentConfig, Mode};
use pstab_cli::error::AppResult;
use pstab_cli::estimate::{print_estimate, run_estimate};
use pstab_cli::kernel_exp::{print_kernel, run_kernel_experiment};
use pstab_cli::report::write_json;
use pstab_cli::sparse_exp::{print_sparse, run_sparse_experiment};

/// Estimate preconditioner stability by sketching, select among candidate
/// preconditioners, and validate the choice with conjugate gradients.
#[derive(Debug, Parser)]
#[command(name = "pstab", version, about)]
struct Cli {
    /// TOML config file; flags below override its values
    #[arg(long)]
    config: Option<PathBuf>,

    /// sparse | kernel | estimate
    #[arg(long)]
    mode: Option<String>,

    /// Matrix Market path or synthetic spec (synth:tridiag:<d>,
    /// synth:blockdiag:<d>:<bs>, synth:poisson2d:<n>)
    #[arg(long)]
    matrix: Option<String>,

    /// CSV dataset path or synthetic spec (synth:blobs:<n>:<p>:<c>)
    #[arg(long)]
    dataset: Option<String>,

    /// Name of the CSV target column (default: last column)
    #[arg(long)]
    target_column: Option<String>,

    /// Candidate spec, repeatable: identity | blk:<size> | rcm:<size>
    #[arg(long = "candidate")]
    candidates: Vec<String>,

    /// Sketch size for the estimator and for alg2
    #[arg(long)]
    k: Option<usize>,

    /// Relative accuracy for alg3
    #[arg(long)]
    epsilon: Option<f64>,

    /// Failure probability for alg3
    #[arg(long)]
    delta: Option<f64>,

    /// alg2 (fixed sketch size) | alg3 (adaptive filtering)
    #[arg(long)]
    algorithm: Option<String>,

    /// Number of independent selector trials (sparse mode)
    #[arg(long)]
    trials: Option<usize>,

    /// Master seed; every random quantity derives from it
    #[arg(long)]
    seed: Option<u64>,

    /// Also compute the exact stability and the relative error (estimate mode)
    #[arg(long)]
    exact: bool,

    /// Output path prefix for the JSON and CSV reports
    #[arg(long)]
    out: Option<String>,

    /// Worker pool size (0 = one per core)
    #[arg(long)]
    threads: Option<usize>,

    /// Rank of the low-rank kernel candidate
    #[arg(long)]
    rank: Option<usize>,

    /// Cluster count for the kernel preconditioners (default ⌈√d⌉)
    #[arg(long)]
    clusters: Option<usize>,
}

impl Cli {
    fn overrides(&self) -> ConfigFile {
        ConfigFile {
            mode: self.mode.clone(),
            matrix: self.matrix.clone(),
            dataset: self.dataset.clone(),
            target_column: self.target_column.clone(),
            candidates: (!self.candidates.is_empty()).then(|| self.candidates.clone()),
            k: self.k,
            epsilon: self.epsilon,
            delta: self.delta,
            algorithm: self.algorithm.clone(),
            trials: self.trials,
            seed: self.seed,
            relative_tol: None,
            absolute_tol: None,
            max_iterations: None,
            length_scales: None,
            noise_levels: None,
            rank: self.rank,
            clusters: self.clusters,
            out: self.out.clone(),
            threads: self.threads,
            exact: self.exact.then_some(true),
        }
    }
}

fn run(cfg: &ExperimentConfig) -> AppResult<()> {
    let started = Instant::now();
    match cfg.mode {
        Mode::Estimate => {
            let report = run_estimate(cfg)?;
            print_estimate(&report);
            if let Some(out) = &cfg.out {
                let path = write_json(out, &report)?;
                eprintln!("report written to {}", path.display());
            }
        }
        Mode::Sparse => {
            let report = run_sparse_experiment(cfg)?;
            print_sparse(&report);
            if let Some(out) = &cfg.out {
                eprintln!("reports written with prefix {out}");
            }
        }
        Mode::Kernel => {
            let report = run_kernel_experiment(cfg)?;
            print_kernel(&report);
            if let Some(out) = &cfg.out {
                eprintln!("reports written with prefix {out}");
            }
        }
    }
    eprintln!("elapsed: {:.2?}", started.elapsed());
    Ok(())
}

fn dispatch(cli: Cli) -> AppResult<()> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let cfg = ExperimentConfig::resolve(file.merged_with(cli.overrides()))?;
    if cfg.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| pstab_cli::AppError::Config(e.to_string()))?;
        pool.install(|| run(&cfg))
    } else {
        run(&cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
