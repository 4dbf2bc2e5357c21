//! Selecting the minimal-stability candidate.
//!
//! Two strategies are provided. The fixed-`k` strategy estimates every
//! candidate's stability with one shared sketch and returns the argmin. The
//! adaptive strategy runs `T = ⌈log₂(1/ε)⌉` rounds, halving the working
//! accuracy each round, estimating only the surviving candidates and
//! discarding any whose estimate provably cannot belong to the minimizer;
//! with a clear winner it spends far fewer preconditioner solves than the
//! fixed-`k` strategy needs for the same final guarantee.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::precond::Preconditioner;
use crate::stability::{stab_from_sketch, SketchedSystem};

/// Which strategy produced a report, and with what parameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum SelectionParams {
    FixedK { k: usize, reuse_sketch: bool },
    Adaptive { epsilon: f64, delta: f64, round_ks: Vec<usize> },
}

/// One adaptive round: the working accuracy, the sketch size it implied, and
/// the candidates still alive after filtering.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SelectionRound {
    pub epsilon: f64,
    pub k: usize,
    pub survivors: Vec<usize>,
}

/// Everything a selection run produced, including the cost tallies needed to
/// audit the sketch-reuse accounting.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SelectionReport {
    pub candidate_labels: Vec<String>,
    /// Final estimate per candidate; `None` for candidates filtered out
    /// before the last round.
    pub estimates: Vec<Option<f64>>,
    pub chosen_index: usize,
    pub params: SelectionParams,
    pub rounds: Vec<SelectionRound>,
    pub total_spmv: u64,
    pub total_solves: u64,
    pub gaussian_draws: u64,
    pub seed: u64,
}

/// Index of the smallest value, ties broken toward the lowest index.
pub(crate) fn argmin(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    best
}

/// Estimates every candidate's stability with sketch size `k` and returns
/// the candidate with the smallest estimate (lowest index on ties).
///
/// With `reuse_sketch` one Gaussian sketch and one set of products `A·Q` are
/// shared by all candidates, so the run consumes `k` matrix-vector products,
/// `n·k` solves and `d·k` normal draws; without it every candidate gets an
/// independent sketch (`n·k` products, `n·d·k` draws), which the statistical
/// tests need.
pub fn select_preconditioner<A: LinearOperator + ?Sized>(
    a: &A,
    candidates: &[&dyn Preconditioner],
    k: usize,
    seed: u64,
    reuse_sketch: bool,
) -> Result<SelectionReport> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let n = candidates.len();
    let mut estimates = Vec::with_capacity(n);
    let mut total_spmv = 0u64;
    let mut total_solves = 0u64;
    let mut gaussian_draws = 0u64;
    if reuse_sketch {
        let sketch = SketchedSystem::new(a, k, seed)?;
        total_spmv += sketch.spmv_count();
        gaussian_draws += sketch.gaussian_draws();
        for m in candidates {
            let est = stab_from_sketch(*m, &sketch)?;
            total_solves += est.solve_count;
            estimates.push(est.value);
        }
    } else {
        for (j, m) in candidates.iter().enumerate() {
            let sketch = SketchedSystem::with_stream(a, k, seed, j as u64)?;
            total_spmv += sketch.spmv_count();
            gaussian_draws += sketch.gaussian_draws();
            let est = stab_from_sketch(*m, &sketch)?;
            total_solves += est.solve_count;
            estimates.push(est.value);
        }
    }
    let chosen = argmin(estimates.iter().copied());
    Ok(SelectionReport {
        candidate_labels: candidates.iter().map(|m| m.label()).collect(),
        estimates: estimates.into_iter().map(Some).collect(),
        chosen_index: chosen,
        params: SelectionParams::FixedK {
            k,
            reuse_sketch,
        },
        rounds: Vec::new(),
        total_spmv,
        total_solves,
        gaussian_draws,
        seed,
    })
}

/// Adaptive filtered selection.
///
/// Runs `T = ⌈log₂(1/ε)⌉` rounds. Round `t` works at accuracy
/// `ε_cur = 2⁻ᵗ`, estimates the surviving candidates with a fresh shared
/// sketch of size `k = ⌈(6/ε_cur²)·ln(2T|P|/δ)⌉`, and keeps only those whose
/// estimate is within `√((1+ε_cur)/(1−ε_cur))` of the round minimum. The
/// round minimizer of the final round is returned.
pub fn adaptive_select<A: LinearOperator + ?Sized>(
    a: &A,
    candidates: &[&dyn Preconditioner],
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<SelectionReport> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidParameter(alloc::format!(
            "epsilon must lie strictly between 0 and 1/2, got {epsilon}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "delta must lie strictly between 0 and 1, got {delta}"
        )));
    }
    let n = candidates.len();
    let rounds_total = (1.0 / epsilon).log2().ceil() as usize;
    let mut surviving: Vec<usize> = (0..n).collect();
    let mut eps_cur = 1.0f64;
    let mut rounds = Vec::with_capacity(rounds_total);
    let mut round_ks = Vec::with_capacity(rounds_total);
    let mut chosen = 0usize;
    let mut final_estimates: Vec<Option<f64>> = vec![None; n];
    let mut total_spmv = 0u64;
    let mut total_solves = 0u64;
    let mut gaussian_draws = 0u64;
    for t in 1..=rounds_total {
        eps_cur /= 2.0;
        let k = (6.0 / (eps_cur * eps_cur)
            * (2.0 * rounds_total as f64 * surviving.len() as f64 / delta).ln())
        .ceil() as usize;
        round_ks.push(k);
        // fresh sketch each round, shared by this round's survivors
        let sketch = SketchedSystem::with_stream(a, k, seed, t as u64)?;
        total_spmv += sketch.spmv_count();
        gaussian_draws += sketch.gaussian_draws();
        let mut round_estimates = Vec::with_capacity(surviving.len());
        for &i in &surviving {
            let est = stab_from_sketch(candidates[i], &sketch)?;
            total_solves += est.solve_count;
            round_estimates.push(est.value);
        }
        let best_pos = argmin(round_estimates.iter().copied());
        chosen = surviving[best_pos];
        let cutoff =
            round_estimates[best_pos] * ((1.0 + eps_cur) / (1.0 - eps_cur)).sqrt();
        if t == rounds_total {
            for (pos, &i) in surviving.iter().enumerate() {
                final_estimates[i] = Some(round_estimates[pos]);
            }
        }
        let filtered: Vec<usize> = surviving
            .iter()
            .enumerate()
            .filter(|&(pos, _)| round_estimates[pos] <= cutoff)
            .map(|(_, &i)| i)
            .collect();
        surviving = filtered;
        rounds.push(SelectionRound {
            epsilon: eps_cur,
            k,
            survivors: surviving.clone(),
        });
    }
    Ok(SelectionReport {
        candidate_labels: candidates.iter().map(|m| m.label()).collect(),
        estimates: final_estimates,
        chosen_index: chosen,
        params: SelectionParams::Adaptive {
            epsilon,
            delta,
            round_ks,
        },
        rounds,
        total_spmv,
        total_solves,
        gaussian_draws,
        seed,
    })
}

/// Whether a selection satisfies the multiplicative guarantee
/// `exact[chosen] ≤ √((1+ε)/(1−ε))·min(exact)`, judged against externally
/// computed exact stabilities.
pub fn selection_guarantee_check(
    report: &SelectionReport,
    exact_values: &[f64],
    epsilon: f64,
) -> Result<bool> {
    if exact_values.len() != report.candidate_labels.len() {
        return Err(Error::LengthMismatch {
            expected: report.candidate_labels.len(),
            got: exact_values.len(),
        });
    }
    let best = exact_values.iter().copied().fold(f64::INFINITY, f64::min);
    let chosen = exact_values[report.chosen_index];
    Ok(chosen <= ((1.0 + epsilon) / (1.0 - epsilon)).sqrt() * best)
}
