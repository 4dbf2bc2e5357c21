//! Declarative experiment configuration: a TOML file of key–value settings
//! plus command-line overrides that win over the file.

use std::path::Path;

use serde::Deserialize;

use pstab::precond::{BlockOrdering, BlockSpec};
use pstab::{CsrMatrix, IdentityPrecond, Preconditioner};

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sparse,
    Kernel,
    Estimate,
}

impl Mode {
    pub fn parse(s: &str) -> AppResult<Mode> {
        match s {
            "sparse" => Ok(Mode::Sparse),
            "kernel" => Ok(Mode::Kernel),
            "estimate" => Ok(Mode::Estimate),
            other => Err(AppError::config(format!(
                "unknown mode '{other}' (expected sparse, kernel or estimate)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Sparse => "sparse",
            Mode::Kernel => "kernel",
            Mode::Estimate => "estimate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Fixed sketch size, one shared sketch, plain argmin.
    Alg2,
    /// Adaptive filtered selection driven by (ε, δ).
    Alg3,
}

impl Algorithm {
    pub fn parse(s: &str) -> AppResult<Algorithm> {
        match s {
            "alg2" => Ok(Algorithm::Alg2),
            "alg3" => Ok(Algorithm::Alg3),
            other => Err(AppError::config(format!(
                "unknown algorithm '{other}' (expected alg2 or alg3)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Alg2 => "alg2",
            Algorithm::Alg3 => "alg3",
        }
    }
}

/// Raw config-file contents; every field optional so the file and the flags
/// can each carry any subset.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub mode: Option<String>,
    pub matrix: Option<String>,
    pub dataset: Option<String>,
    pub target_column: Option<String>,
    pub candidates: Option<Vec<String>>,
    pub k: Option<usize>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub algorithm: Option<String>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub relative_tol: Option<f64>,
    pub absolute_tol: Option<f64>,
    pub max_iterations: Option<usize>,
    pub length_scales: Option<Vec<f64>>,
    pub noise_levels: Option<Vec<f64>>,
    pub rank: Option<usize>,
    pub clusters: Option<usize>,
    pub out: Option<String>,
    pub threads: Option<usize>,
    pub exact: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| AppError::config(format!("{}: {e}", path.display())))
    }

    /// Overlays `other` (typically the command line) on top of `self`.
    pub fn merged_with(mut self, other: ConfigFile) -> ConfigFile {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if other.$field.is_some() { self.$field = other.$field; })*
            };
        }
        take!(
            mode, matrix, dataset, target_column, candidates, k, epsilon, delta, algorithm,
            trials, seed, relative_tol, absolute_tol, max_iterations, length_scales,
            noise_levels, rank, clusters, out, threads, exact
        );
        self
    }
}

/// Fully resolved configuration with defaults applied.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub matrix: Option<String>,
    pub dataset: Option<String>,
    pub target_column: Option<String>,
    pub candidates: Vec<String>,
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub seed: u64,
    pub relative_tol: Option<f64>,
    pub absolute_tol: Option<f64>,
    pub max_iterations: Option<usize>,
    pub length_scales: Vec<f64>,
    pub noise_levels: Vec<f64>,
    pub rank: usize,
    pub clusters: Option<usize>,
    pub out: Option<String>,
    pub threads: usize,
    pub exact: bool,
}

/// The nine stock sparse-mode candidates: the identity plus block pinches at
/// several sizes, two of them after reverse Cuthill–McKee reordering.
pub const DEFAULT_SPARSE_CANDIDATES: [&str; 9] = [
    "identity", "blk:1", "blk:10", "blk:25", "blk:50", "blk:75", "blk:100", "rcm:75", "rcm:100",
];

impl ExperimentConfig {
    pub fn resolve(file: ConfigFile) -> AppResult<Self> {
        let mode = Mode::parse(
            file.mode
                .as_deref()
                .ok_or_else(|| AppError::config("mode is required (sparse, kernel or estimate)"))?,
        )?;
        let candidates = match file.candidates {
            Some(c) if !c.is_empty() => c,
            Some(_) => return Err(AppError::config("candidate list is empty")),
            None => match mode {
                Mode::Sparse => DEFAULT_SPARSE_CANDIDATES
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
                Mode::Estimate => vec!["identity".to_string()],
                Mode::Kernel => Vec::new(), // kernel candidates are fixed
            },
        };
        let trials = file.trials.unwrap_or(1);
        if trials < 1 {
            return Err(AppError::config("trials must be at least 1"));
        }
        let cfg = ExperimentConfig {
            mode,
            matrix: file.matrix,
            dataset: file.dataset,
            target_column: file.target_column,
            candidates,
            k: file.k.unwrap_or(10),
            epsilon: file.epsilon.unwrap_or(0.25),
            delta: file.delta.unwrap_or(0.1),
            algorithm: Algorithm::parse(file.algorithm.as_deref().unwrap_or("alg2"))?,
            trials,
            seed: file.seed.unwrap_or(0),
            relative_tol: file.relative_tol,
            absolute_tol: file.absolute_tol,
            max_iterations: file.max_iterations,
            length_scales: file
                .length_scales
                .unwrap_or_else(|| vec![1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2]),
            noise_levels: file.noise_levels.unwrap_or_else(|| vec![1e-2, 1e-4, 1e-6]),
            rank: file.rank.unwrap_or(25),
            clusters: file.clusters,
            out: file.out,
            threads: file.threads.unwrap_or(0),
            exact: file.exact.unwrap_or(false),
        };
        if cfg.length_scales.is_empty() || cfg.noise_levels.is_empty() {
            return Err(AppError::config("length_scales and noise_levels must be nonempty"));
        }
        Ok(cfg)
    }

    pub fn require_matrix(&self) -> AppResult<&str> {
        self.matrix
            .as_deref()
            .ok_or_else(|| AppError::config("this mode needs --matrix (a .mtx path or a synth: spec)"))
    }

    pub fn require_dataset(&self) -> AppResult<&str> {
        self.dataset
            .as_deref()
            .ok_or_else(|| AppError::config("kernel mode needs --dataset (a .csv path or a synth: spec)"))
    }
}

/// Parses one candidate spec: `identity`, `blk:<size>` or `rcm:<size>`.
pub fn parse_candidate(spec: &str) -> AppResult<Option<BlockSpec>> {
    if spec == "identity" {
        return Ok(None);
    }
    let (kind, size) = spec
        .split_once(':')
        .ok_or_else(|| bad_candidate(spec))?;
    let block_size: usize = size.parse().map_err(|_| bad_candidate(spec))?;
    let ordering = match kind {
        "blk" => BlockOrdering::Natural,
        "rcm" => BlockOrdering::Rcm,
        _ => return Err(bad_candidate(spec)),
    };
    Ok(Some(BlockSpec::new(block_size, ordering)?))
}

fn bad_candidate(spec: &str) -> AppError {
    AppError::config(format!(
        "invalid candidate '{spec}' (expected identity, blk:<size> or rcm:<size>)"
    ))
}

/// Builds the candidate preconditioners for a sparse system.
pub fn build_candidates(
    a: &CsrMatrix,
    specs: &[String],
) -> AppResult<Vec<Box<dyn Preconditioner>>> {
    let mut out: Vec<Box<dyn Preconditioner>> = Vec::with_capacity(specs.len());
    for spec in specs {
        match parse_candidate(spec)? {
            None => out.push(Box::new(IdentityPrecond::new(a.dim()))),
            Some(block_spec) => out.push(Box::new(block_spec.build(a)?)),
        }
    }
    Ok(out)
}
