//! Randomized estimation of the preconditioner stability `‖I − M⁻¹A‖_F`.
//!
//! The estimator sketches the operator with a `d × k` Gaussian matrix `Q`
//! whose entries are i.i.d. `N(0, 1/k)` and returns `‖Q − M⁻¹(AQ)‖_F`, which
//! costs `k` matrix-vector products and `k` preconditioner solves. Squared,
//! the estimate is an unbiased Monte-Carlo average of `‖(I − M⁻¹A)q‖₂²` over
//! standard Gaussian probes, so it converges to the true stability as `k`
//! grows. The exact value is available from [`exact_stability`], which runs
//! the deterministic column-by-column computation at a cost of `d` products
//! and `d` solves — the reason the sketch is worth having.
//!
//! [`sample_size_stab`] and [`sample_size_select`] convert a relative
//! accuracy `ε` and failure probability `δ` into the sample count `k` that
//! guarantees `√(1−ε)·exact ≤ S ≤ √(1+ε)·exact` with probability `1 − δ`
//! (union-bounded over `n` candidates for the selection variant).

use alloc::vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dense::{norm2, DenseMatrix};
use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::precond::Preconditioner;
use crate::rng::{gaussian_matrix, rng_stream};

/// A stability estimate together with the cost metadata needed to audit it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StabilityEstimate {
    /// The estimated stability `S ≥ 0` (the norm, not its square).
    pub value: f64,
    /// Number of sketch columns.
    pub k: usize,
    /// Seed the sketch was drawn from.
    pub seed: u64,
    /// Preconditioner solves consumed (always `k`).
    pub solve_count: u64,
    /// Matrix-vector products consumed (always `k`).
    pub spmv_count: u64,
}

/// A Gaussian sketch `Q` with the products `A·Q` cached, so the same draw can
/// be shared across every candidate preconditioner: the matrix side then
/// costs `k` products total instead of `n·k`, and only `d·k` normal variates
/// are ever simulated.
pub struct SketchedSystem {
    q: DenseMatrix,
    aq: DenseMatrix,
    seed: u64,
}

impl SketchedSystem {
    /// Draws `Q` (d×k, entries `N(0, 1/k)`) on stream 0 of `seed` and applies
    /// `a` to each column.
    pub fn new<A: LinearOperator + ?Sized>(a: &A, k: usize, seed: u64) -> Result<Self> {
        Self::with_stream(a, k, seed, 0)
    }

    /// Same as [`SketchedSystem::new`] but drawing from a chosen ChaCha
    /// stream, which is how independent re-draws are produced from one seed.
    pub fn with_stream<A: LinearOperator + ?Sized>(
        a: &A,
        k: usize,
        seed: u64,
        stream: u64,
    ) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParameter("sketch size k must be at least 1".into()));
        }
        let d = a.dim();
        let mut rng = rng_stream(seed, stream);
        let q = gaussian_matrix(d, k, 1.0 / k as f64, &mut rng)?;
        let mut aq = DenseMatrix::zeros(d, k);
        for j in 0..k {
            a.matvec_into(q.col(j), aq.col_mut(j));
        }
        Ok(SketchedSystem { q, aq, seed })
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    pub fn k(&self) -> usize {
        self.q.cols()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Matrix-vector products spent building this sketch.
    pub fn spmv_count(&self) -> u64 {
        self.k() as u64
    }

    /// Normal variates drawn for this sketch.
    pub fn gaussian_draws(&self) -> u64 {
        (self.dim() * self.k()) as u64
    }
}

/// Stability estimate for one candidate against a pre-drawn sketch. Costs
/// `k` preconditioner solves and no further matrix products.
pub fn stab_from_sketch<M: Preconditioner + ?Sized>(
    m: &M,
    sketch: &SketchedSystem,
) -> Result<StabilityEstimate> {
    let d = sketch.dim();
    if m.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: m.dim(),
        });
    }
    let k = sketch.k();
    let mut sum_sq = 0.0;
    let mut col = vec![0.0; d];
    for j in 0..k {
        m.apply_into(sketch.aq.col(j), &mut col)?;
        let q = sketch.q.col(j);
        for i in 0..d {
            col[i] = q[i] - col[i];
        }
        let n = norm2(&col);
        sum_sq += n * n;
    }
    Ok(StabilityEstimate {
        value: sum_sq.sqrt(),
        k,
        seed: sketch.seed,
        solve_count: k as u64,
        spmv_count: k as u64,
    })
}

/// Sketched stability estimate `S ≈ ‖I − M⁻¹A‖_F` using a fresh sketch drawn
/// from `seed`. Exactly `k` matrix-vector products and `k` solves.
pub fn stab_estimate<A, M>(a: &A, m: &M, k: usize, seed: u64) -> Result<StabilityEstimate>
where
    A: LinearOperator + ?Sized,
    M: Preconditioner + ?Sized,
{
    let sketch = SketchedSystem::new(a, k, seed)?;
    stab_from_sketch(m, &sketch)
}

/// Exact stability `‖I − M⁻¹A‖_F`, computed column by column over the
/// standard basis. Costs `d` matrix-vector products and `d` solves, which is
/// what any deterministic scheme must pay; used as the test oracle.
pub fn exact_stability<A, M>(a: &A, m: &M) -> Result<f64>
where
    A: LinearOperator + ?Sized,
    M: Preconditioner + ?Sized,
{
    let d = a.dim();
    if m.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: m.dim(),
        });
    }
    let mut e = vec![0.0; d];
    let mut ae = vec![0.0; d];
    let mut col = vec![0.0; d];
    let mut sum_sq = 0.0;
    for j in 0..d {
        e[j] = 1.0;
        a.matvec_into(&e, &mut ae);
        m.apply_into(&ae, &mut col)?;
        for i in 0..d {
            let s = e[i] - col[i];
            sum_sq += s * s;
        }
        e[j] = 0.0;
    }
    Ok(sum_sq.sqrt())
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "{name} must lie strictly between 0 and 1, got {v}"
        )));
    }
    Ok(())
}

/// Sample count guaranteeing `√(1−ε)·exact ≤ S ≤ √(1+ε)·exact` with
/// probability at least `1 − δ`: `⌈12/(ε²(3−2ε))·ln(2/δ)⌉`.
pub fn sample_size_stab(epsilon: f64, delta: f64) -> Result<usize> {
    check_unit_interval("epsilon", epsilon)?;
    check_unit_interval("delta", delta)?;
    let bound = 12.0 / (epsilon * epsilon * (3.0 - 2.0 * epsilon)) * (2.0 / delta).ln();
    Ok(bound.ceil() as usize)
}

/// Sample count for selecting among `n` candidates with the same guarantee
/// holding simultaneously for all of them: `⌈12/(ε²(3−2ε))·ln(2n/δ)⌉`.
pub fn sample_size_select(epsilon: f64, delta: f64, n: usize) -> Result<usize> {
    check_unit_interval("epsilon", epsilon)?;
    check_unit_interval("delta", delta)?;
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let bound =
        12.0 / (epsilon * epsilon * (3.0 - 2.0 * epsilon)) * (2.0 * n as f64 / delta).ln();
    Ok(bound.ceil() as usize)
}
