//! Preconditioned conjugate gradients, the downstream consumer that turns a
//! selected preconditioner into an iteration count.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dense::{axpy, dot, norm2};
use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::precond::Preconditioner;

/// When to stop: a relative tolerance on `‖r‖/‖b‖`, an absolute tolerance on
/// `‖r‖`, or both (either one suffices), plus an iteration cap.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StoppingRule {
    relative_tol: Option<f64>,
    absolute_tol: Option<f64>,
    max_iterations: usize,
}

impl StoppingRule {
    pub fn new(
        relative_tol: Option<f64>,
        absolute_tol: Option<f64>,
        max_iterations: usize,
    ) -> Result<Self> {
        if relative_tol.is_none() && absolute_tol.is_none() {
            return Err(Error::InvalidParameter(
                "at least one tolerance must be set".into(),
            ));
        }
        for t in [relative_tol, absolute_tol].into_iter().flatten() {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::InvalidParameter("tolerances must be positive".into()));
            }
        }
        if max_iterations < 1 {
            return Err(Error::InvalidParameter(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(StoppingRule {
            relative_tol,
            absolute_tol,
            max_iterations,
        })
    }

    pub fn relative(tol: f64, max_iterations: usize) -> Result<Self> {
        Self::new(Some(tol), None, max_iterations)
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn relative_tol(&self) -> Option<f64> {
        self.relative_tol
    }

    pub fn absolute_tol(&self) -> Option<f64> {
        self.absolute_tol
    }

    /// The residual norm below which the solve counts as converged; with both
    /// tolerances set the larger threshold applies (either criterion ends the
    /// solve).
    pub fn threshold(&self, b_norm: f64) -> f64 {
        let rel = self.relative_tol.map(|t| t * b_norm).unwrap_or(f64::NEG_INFINITY);
        let abs = self.absolute_tol.unwrap_or(f64::NEG_INFINITY);
        rel.max(abs)
    }
}

/// Outcome of a conjugate gradients run. Hitting the iteration cap is not an
/// error: the result simply reports `converged = false`.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Recurrence residual norm at exit (what convergence was judged on).
    pub final_residual_norm: f64,
    /// Explicitly recomputed `‖b − A·x‖` at exit. A large gap to the
    /// recurrence value signals accumulated drift and is worth surfacing.
    pub explicit_residual_norm: f64,
    /// Recurrence residual norm after each iteration; its length equals
    /// `iterations` and its last entry equals `final_residual_norm`.
    pub residual_history: Vec<f64>,
}

/// Solves `A·x = b` by preconditioned conjugate gradients.
///
/// `operator` must be symmetric positive definite (not checked; breakdowns
/// surface as [`Error::Breakdown`]). Convergence is checked on the recurrence
/// residual each iteration; `x0` defaults to the zero vector. One
/// preconditioner solve happens at setup and one per iteration.
pub fn pcg_solve<A, M>(
    operator: &A,
    m: &M,
    b: &[f64],
    rule: &StoppingRule,
    x0: Option<&[f64]>,
) -> Result<SolveResult>
where
    A: LinearOperator + ?Sized,
    M: Preconditioner + ?Sized,
{
    let d = operator.dim();
    if b.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: b.len(),
        });
    }
    if m.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: m.dim(),
        });
    }
    if let Some(x0) = x0 {
        if x0.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: x0.len(),
            });
        }
    }

    let threshold = rule.threshold(norm2(b));
    let mut x = x0.map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; d]);
    let mut r = if x0.is_some() {
        let ax = operator.matvec(&x);
        b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect::<Vec<f64>>()
    } else {
        b.to_vec()
    };

    let mut residual_norm = norm2(&r);
    if residual_norm <= threshold {
        let explicit = explicit_residual(operator, &x, b);
        return Ok(SolveResult {
            x,
            iterations: 0,
            converged: true,
            final_residual_norm: residual_norm,
            explicit_residual_norm: explicit,
            residual_history: Vec::new(),
        });
    }

    let mut z = m.apply(&r)?;
    let mut rho = dot(&r, &z);
    if !(rho > 0.0) {
        return Err(Error::Breakdown { iteration: 1 });
    }
    let mut p = z.clone();
    let mut ap = vec![0.0; d];
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    for t in 1..=rule.max_iterations() {
        operator.matvec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Breakdown { iteration: t });
        }
        let alpha = rho / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        residual_norm = norm2(&r);
        history.push(residual_norm);
        iterations = t;
        // one solve per iteration, matching the per-iteration cost model
        m.apply_into(&r, &mut z)?;
        if residual_norm <= threshold {
            converged = true;
            break;
        }
        if t == rule.max_iterations() {
            break;
        }
        let rho_next = dot(&r, &z);
        if !(rho_next > 0.0) {
            return Err(Error::Breakdown { iteration: t });
        }
        let beta = rho_next / rho;
        rho = rho_next;
        for i in 0..d {
            p[i] = z[i] + beta * p[i];
        }
    }

    let explicit = explicit_residual(operator, &x, b);
    Ok(SolveResult {
        x,
        iterations,
        converged,
        final_residual_norm: residual_norm,
        explicit_residual_norm: explicit,
        residual_history: history,
    })
}

fn explicit_residual<A: LinearOperator + ?Sized>(a: &A, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.matvec(x);
    let diff: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
    norm2(&diff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precond::{block_pinch, IdentityPrecond};
    use crate::sparse::CsrMatrix;
    use approx::assert_abs_diff_eq;

    fn dense_spd_csr(d: usize, seed: u64) -> CsrMatrix {
        let mut rng = crate::rng::rng_stream(seed, 0);
        let g = crate::rng::gaussian_matrix(d, d, 1.0, &mut rng).unwrap();
        let mut a = g.transpose_matmul(&g);
        for i in 0..d {
            a.set(i, i, a.get(i, i) + d as f64);
        }
        let mut triplets = Vec::new();
        for i in 0..d {
            for j in 0..d {
                triplets.push((i, j, a.get(i, j)));
            }
        }
        CsrMatrix::from_triplets(d, &triplets).unwrap()
    }

    #[test]
    fn identity_system_converges_in_one_iteration() {
        let a = CsrMatrix::identity(8);
        let m = IdentityPrecond::new(8);
        let b: Vec<f64> = (0..8).map(|i| (i as f64) - 3.0).collect();
        let rule = StoppingRule::relative(1e-12, 100).unwrap();
        let res = pcg_solve(&a, &m, &b, &rule, None).unwrap();
        assert!(res.converged);
        assert_eq!(res.iterations, 1);
        for i in 0..8 {
            assert_abs_diff_eq!(res.x[i], b[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn random_spd_matches_direct_solve() {
        let d = 20;
        let a = dense_spd_csr(d, 77);
        let m = IdentityPrecond::new(d);
        let mut rng = crate::rng::rng_stream(78, 0);
        let b = crate::rng::standard_normal_vec(&mut rng, d);
        let rule = StoppingRule::relative(1e-12, 10_000).unwrap();
        let res = pcg_solve(&a, &m, &b, &rule, None).unwrap();
        assert!(res.converged);
        // dense direct oracle
        let na = nalgebra::DMatrix::from_fn(d, d, |i, j| a.get(i, j));
        let want = na
            .cholesky()
            .unwrap()
            .solve(&nalgebra::DVector::from_column_slice(&b));
        let scale = want.norm();
        for i in 0..d {
            assert!((res.x[i] - want[i]).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn three_distinct_eigenvalues_finish_in_three_iterations() {
        // A = U diag(1,1,…,4,…,9) Uᵀ for a random orthogonal U
        let d = 15;
        let mut rng = crate::rng::rng_stream(5150, 0);
        let g = crate::rng::gaussian_matrix(d, d, 1.0, &mut rng).unwrap();
        let u = crate::dense::orthonormal_columns(&g);
        assert_eq!(u.cols(), d);
        let mut lam = vec![1.0; d];
        for (i, l) in lam.iter_mut().enumerate() {
            *l = match i % 3 {
                0 => 1.0,
                1 => 4.0,
                _ => 9.0,
            };
        }
        let mut scaled = u.clone();
        for j in 0..d {
            let c = scaled.col_mut(j);
            for v in c.iter_mut() {
                *v *= lam[j];
            }
        }
        // A = (U·Λ)·Uᵀ
        let mut triplets = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0.0;
                for l in 0..d {
                    acc += scaled.get(i, l) * u.get(j, l);
                }
                triplets.push((i, j, acc));
            }
        }
        let a = CsrMatrix::from_triplets(d, &triplets).unwrap();
        let m = IdentityPrecond::new(d);
        let b = crate::rng::standard_normal_vec(&mut crate::rng::rng_stream(5151, 0), d);
        let rule = StoppingRule::relative(1e-10, 100).unwrap();
        let res = pcg_solve(&a, &m, &b, &rule, None).unwrap();
        assert!(res.converged);
        assert!(res.iterations <= 3, "took {} iterations", res.iterations);
    }

    #[test]
    fn exact_preconditioner_converges_in_one_iteration() {
        let d = 12;
        let a = dense_spd_csr(d, 80);
        let m = block_pinch(&a, d).unwrap();
        let b = crate::rng::standard_normal_vec(&mut crate::rng::rng_stream(81, 0), d);
        let rule = StoppingRule::relative(1e-10, 50).unwrap();
        let res = pcg_solve(&a, &m, &b, &rule, None).unwrap();
        assert!(res.converged);
        assert_eq!(res.iterations, 1);
    }

    #[test]
    fn history_matches_iterations_and_final_norm() {
        let d = 25;
        let a = dense_spd_csr(d, 82);
        let m = block_pinch(&a, 5).unwrap();
        let b = crate::rng::standard_normal_vec(&mut crate::rng::rng_stream(83, 0), d);
        let rule = StoppingRule::relative(1e-9, 500).unwrap();
        let res = pcg_solve(&a, &m, &b, &rule, None).unwrap();
        assert!(res.converged);
        assert_eq!(res.residual_history.len(), res.iterations);
        assert_eq!(*res.residual_history.last().unwrap(), res.final_residual_norm);
        assert!(res.final_residual_norm <= rule.threshold(norm2(&b)));
        // recurrence and explicit residuals agree to well under 10× tolerance
        assert!(res.explicit_residual_norm <= 10.0 * rule.threshold(norm2(&b)));
    }

    #[test]
    fn solve_count_is_iterations_plus_setup() {
        let d = 30;
        let a = dense_spd_csr(d, 84);
        let m = block_pinch(&a, 6).unwrap();
        let b = crate::rng::standard_normal_vec(&mut crate::rng::rng_stream(85, 0), d);
        let rule = StoppingRule::relative(1e-10, 500).unwrap();
        m.reset_solve_count();
        let res = pcg_solve(&a, &m, &b, &rule, None).unwrap();
        assert!(res.converged);
        assert_eq!(m.solve_count(), res.iterations as u64 + 1);
    }

    #[test]
    fn cap_returns_unconverged_result_not_error() {
        let d = 40;
        let a = dense_spd_csr(d, 86);
        let m = IdentityPrecond::new(d);
        let b = crate::rng::standard_normal_vec(&mut crate::rng::rng_stream(87, 0), d);
        let rule = StoppingRule::relative(1e-14, 2).unwrap();
        let res = pcg_solve(&a, &m, &b, &rule, None).unwrap();
        assert!(!res.converged);
        assert_eq!(res.iterations, 2);
    }

    #[test]
    fn indefinite_operator_breaks_down() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (1, 1, -1.0)]).unwrap();
        let m = IdentityPrecond::new(2);
        let rule = StoppingRule::relative(1e-10, 10).unwrap();
        let got = pcg_solve(&a, &m, &[0.0, 1.0], &rule, None);
        assert!(matches!(got, Err(Error::Breakdown { .. })), "{got:?}");
    }

    #[test]
    fn warm_start_is_accepted() {
        let d = 10;
        let a = dense_spd_csr(d, 88);
        let m = IdentityPrecond::new(d);
        let b = crate::rng::standard_normal_vec(&mut crate::rng::rng_stream(89, 0), d);
        let rule = StoppingRule::relative(1e-10, 200).unwrap();
        let cold = pcg_solve(&a, &m, &b, &rule, None).unwrap();
        let warm = pcg_solve(&a, &m, &b, &rule, Some(&cold.x)).unwrap();
        assert!(warm.converged);
        assert_eq!(warm.iterations, 0);
    }

    #[test]
    fn stopping_rule_validation() {
        assert!(StoppingRule::new(None, None, 10).is_err());
        assert!(StoppingRule::new(Some(-1.0), None, 10).is_err());
        assert!(StoppingRule::new(Some(1e-9), None, 0).is_err());
        // OR semantics: the larger threshold wins
        let rule = StoppingRule::new(Some(1e-2), Some(5.0), 10).unwrap();
        assert_abs_diff_eq!(rule.threshold(10.0), 5.0);
        assert_abs_diff_eq!(rule.threshold(10_000.0), 100.0);
    }
}
