//! Randomized truncated eigen-approximation of a symmetric PSD matrix by
//! subspace iteration with Rayleigh–Ritz extraction.

use alloc::vec::Vec;

use crate::dense::{orthonormal_columns, sym_eigen, DenseMatrix};
use crate::error::{Error, Result};
use crate::rng::{gaussian_matrix, rng_stream};

const OVERSAMPLE: usize = 10;
const POWER_PASSES: usize = 2;

/// Rank-`r` approximation `U·diag(Λ)·Uᵀ ≈ A` for symmetric PSD `A`.
///
/// Draws a Gaussian test matrix with 10 columns of oversampling, runs two
/// power passes through `A` with re-orthonormalization, and extracts Ritz
/// pairs from the compressed matrix `QᵀAQ`. Returns the top `r` Ritz values
/// (descending) with their orthonormal Ritz vectors; if the input has
/// numerical rank below `r`, only the meaningful directions come back, so the
/// result can be thinner than requested. `r = 0` returns empty factors.
pub fn lowrank_approx(a: &DenseMatrix, r: usize, seed: u64) -> Result<(DenseMatrix, Vec<f64>)> {
    if a.rows() != a.cols() {
        return Err(Error::InvalidParameter("matrix must be square".into()));
    }
    let d = a.rows();
    if r >= d {
        return Err(Error::InvalidParameter(alloc::format!(
            "rank {r} must be below the dimension {d}"
        )));
    }
    if r == 0 {
        return Ok((DenseMatrix::zeros(d, 0), Vec::new()));
    }
    let m = (r + OVERSAMPLE).min(d);
    let mut rng = rng_stream(seed, 0);
    let g = gaussian_matrix(d, m, 1.0, &mut rng)?;
    let mut q = orthonormal_columns(&a.matmul(&g));
    // each power pass squares the spectral separation (AᵀA = A² here), with
    // re-orthonormalization after every product to keep the basis tame
    for _ in 0..POWER_PASSES {
        q = orthonormal_columns(&a.matmul(&q));
        q = orthonormal_columns(&a.matmul(&q));
    }
    if q.cols() == 0 {
        // numerically zero input: nothing to approximate
        return Ok((DenseMatrix::zeros(d, 0), Vec::new()));
    }
    let aq = a.matmul(&q);
    let mut b = q.transpose_matmul(&aq);
    // symmetrize roundoff before the eigensolve
    for i in 0..b.rows() {
        for j in i + 1..b.cols() {
            let s = 0.5 * (b.get(i, j) + b.get(j, i));
            b.set(i, j, s);
            b.set(j, i, s);
        }
    }
    let (vals, vecs) = sym_eigen(&b);
    let floor = vals.first().copied().unwrap_or(0.0).max(0.0) * 1e-14;
    let keep = vals
        .iter()
        .take(r)
        .filter(|&&v| v > floor && v > 0.0)
        .count();
    let mut lam = Vec::with_capacity(keep);
    let mut u = DenseMatrix::zeros(d, keep);
    for j in 0..keep {
        lam.push(vals[j]);
        let vj = vecs.col(j);
        let col = u.col_mut(j);
        for (i, out) in col.iter_mut().enumerate() {
            let mut acc = 0.0;
            for l in 0..q.cols() {
                acc += q.get(i, l) * vj[l];
            }
            *out = acc;
        }
    }
    Ok((u, lam))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::dot;
    use crate::kernel::{gram_matrix, Dataset};
    use approx::assert_abs_diff_eq;

    fn materialize(u: &DenseMatrix, lam: &[f64]) -> DenseMatrix {
        let d = u.rows();
        let mut out = DenseMatrix::zeros(d, d);
        for (j, &l) in lam.iter().enumerate() {
            let col = u.col(j);
            for a in 0..d {
                for b in 0..d {
                    out.set(a, b, out.get(a, b) + l * col[a] * col[b]);
                }
            }
        }
        out
    }

    #[test]
    fn exact_rank_two_input_is_recovered() {
        let d = 30;
        let mut rng = crate::rng::rng_stream(91, 0);
        let g = crate::rng::gaussian_matrix(d, 2, 1.0, &mut rng).unwrap();
        // A = g₀g₀ᵀ·3 + g₁g₁ᵀ
        let mut a = DenseMatrix::zeros(d, d);
        for (w, j) in [(3.0, 0usize), (1.0, 1usize)] {
            let c = g.col(j);
            for x in 0..d {
                for y in 0..d {
                    a.set(x, y, a.get(x, y) + w * c[x] * c[y]);
                }
            }
        }
        let (u, lam) = lowrank_approx(&a, 2, 7).unwrap();
        assert_eq!(lam.len(), 2);
        let approx_a = materialize(&u, &lam);
        let mut err = 0.0;
        for x in 0..d {
            for y in 0..d {
                let diff = a.get(x, y) - approx_a.get(x, y);
                err += diff * diff;
            }
        }
        assert!(err.sqrt() <= 1e-8 * a.frobenius_norm());
    }

    #[test]
    fn rank_zero_returns_empty_factors() {
        let a = DenseMatrix::identity(6);
        let (u, lam) = lowrank_approx(&a, 0, 3).unwrap();
        assert_eq!(u.cols(), 0);
        assert!(lam.is_empty());
    }

    #[test]
    fn ritz_values_match_dense_eigenvalues_of_a_gram_matrix() {
        // squared exponential Gram with a smoothly decaying spectrum, r = 25
        let d = 120;
        let mut rng = crate::rng::rng_stream(55, 0);
        let points: Vec<f64> = crate::rng::standard_normal_vec(&mut rng, d * 3);
        let data = Dataset::new(d, 3, points, alloc::vec![0.0; d]).unwrap();
        let sys = gram_matrix(&data, 2.0, 1e-4).unwrap();
        let (u, lam) = lowrank_approx(sys.gram(), 25, 19).unwrap();
        assert_eq!(lam.len(), 25);

        // dense full eigendecomposition oracle
        let na = nalgebra::DMatrix::from_fn(d, d, |i, j| sys.gram().get(i, j));
        let mut evals: Vec<f64> = na.symmetric_eigen().eigenvalues.iter().copied().collect();
        evals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for j in 0..25 {
            let rel = (lam[j] - evals[j]).abs() / evals[j].abs().max(1e-300);
            assert!(rel <= 1e-3, "ritz value {j}: {} vs {} (rel {rel})", lam[j], evals[j]);
        }
        // Ritz vectors are orthonormal
        for i in 0..25 {
            for j in 0..25 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot(u.col(i), u.col(j)), want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn rank_at_or_above_dimension_is_rejected() {
        let a = DenseMatrix::identity(4);
        assert!(lowrank_approx(&a, 4, 1).is_err());
        assert!(lowrank_approx(&a, 9, 1).is_err());
    }
}
