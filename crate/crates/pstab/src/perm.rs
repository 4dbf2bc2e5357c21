//! Permutations of `{0, …, d−1}` used by the reordered preconditioners.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A permutation stored as `forward[new] = old`.
///
/// Applying the permutation gathers entries into the new ordering; applying
/// the inverse scatters them back. Both directions are needed because the
/// reordered preconditioners solve in the permuted frame and hand the result
/// back in the original one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            forward: (0..n).collect(),
        }
    }

    /// Builds a permutation from `forward[new] = old`, checking bijectivity.
    pub fn from_vec(forward: Vec<usize>) -> Result<Self> {
        let n = forward.len();
        let mut seen = alloc::vec![false; n];
        for &old in &forward {
            if old >= n || seen[old] {
                return Err(Error::InvalidParameter(alloc::format!(
                    "not a permutation of 0..{n}"
                )));
            }
            seen[old] = true;
        }
        Ok(Permutation { forward })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// `forward[new] = old`.
    pub fn as_slice(&self) -> &[usize] {
        &self.forward
    }

    /// Gathers `v` into the new ordering: `out[new] = v[forward[new]]`.
    pub fn gather(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.forward.len());
        self.forward.iter().map(|&old| v[old]).collect()
    }

    /// Scatters `v` back to the original ordering: `out[forward[new]] = v[new]`.
    pub fn scatter(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.forward.len());
        let mut out = alloc::vec![0.0; v.len()];
        for (new, &old) in self.forward.iter().enumerate() {
            out[old] = v[new];
        }
        out
    }

    /// The inverse permutation (`inv[old] = new`).
    pub fn inverse(&self) -> Permutation {
        let mut inv = alloc::vec![0usize; self.forward.len()];
        for (new, &old) in self.forward.iter().enumerate() {
            inv[old] = new;
        }
        Permutation { forward: inv }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gather_scatter_roundtrip() {
        let p = Permutation::from_vec(alloc::vec![2, 0, 3, 1]).unwrap();
        let v = [10.0, 11.0, 12.0, 13.0];
        let g = p.gather(&v);
        assert_eq!(g, alloc::vec![12.0, 10.0, 13.0, 11.0]);
        assert_eq!(p.scatter(&g), v.to_vec());
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_vec(alloc::vec![0, 0, 1]).is_err());
        assert!(Permutation::from_vec(alloc::vec![0, 3]).is_err());
    }

    #[test]
    fn inverse_composes_to_identity() {
        let p = Permutation::from_vec(alloc::vec![3, 1, 0, 2]).unwrap();
        let inv = p.inverse();
        for new in 0..4 {
            assert_eq!(inv.as_slice()[p.as_slice()[new]], new);
        }
    }
}
