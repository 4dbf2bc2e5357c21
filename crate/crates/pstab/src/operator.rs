//! Matrix-vector product access, the only capability the estimator and the
//! solver need from a system matrix.

use alloc::vec;
use alloc::vec::Vec;

/// A square linear operator exposed through matrix-vector products.
///
/// Implemented by [`crate::sparse::CsrMatrix`], by dense matrices, and by the
/// regularized kernel system `K + σₙ²I`.
pub trait LinearOperator: Send + Sync {
    fn dim(&self) -> usize;

    /// `y = A·x`. Implementations may assume `x` and `y` have length `dim()`.
    fn matvec_into(&self, x: &[f64], y: &mut [f64]);

    fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.matvec_into(x, &mut y);
        y
    }
}

impl LinearOperator for crate::dense::DenseMatrix {
    fn dim(&self) -> usize {
        assert_eq!(self.rows(), self.cols());
        self.rows()
    }

    fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        crate::dense::DenseMatrix::matvec_into(self, x, y);
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        (**self).matvec_into(x, y);
    }
}
