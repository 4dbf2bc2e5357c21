//! Candidate preconditioners: identity, block-diagonal pinch, and the same
//! pinch applied after a reverse Cuthill–McKee reordering.
//!
//! A preconditioner exposes one capability: applying `M⁻¹` to a vector. The
//! pinch factors its diagonal blocks once at construction (dense Cholesky)
//! and each apply is a sequence of block solves. Every implementation keeps
//! an atomic tally of applies so the cost model of the estimators can be
//! audited from tests.

mod rcm;

pub use rcm::rcm_ordering;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use crate::dense::Cholesky;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::sparse::CsrMatrix;

/// Solve-with-`M` access plus bookkeeping.
pub trait Preconditioner: Send + Sync {
    fn dim(&self) -> usize;

    /// A short human-readable tag ("identity", "blk_10", "rcm_25", …).
    fn label(&self) -> String;

    /// `out = M⁻¹·v`, counting one solve.
    fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<()>;

    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }

    /// Number of applies performed since construction or the last reset.
    fn solve_count(&self) -> u64;

    fn reset_solve_count(&self);
}

impl<T: Preconditioner + ?Sized> Preconditioner for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn label(&self) -> String {
        (**self).label()
    }
    fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        (**self).apply_into(v, out)
    }
    fn solve_count(&self) -> u64 {
        (**self).solve_count()
    }
    fn reset_solve_count(&self) {
        (**self).reset_solve_count()
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// The trivial preconditioner `M = I`.
#[derive(Debug)]
pub struct IdentityPrecond {
    dim: usize,
    applies: AtomicU64,
}

impl IdentityPrecond {
    pub fn new(dim: usize) -> Self {
        IdentityPrecond {
            dim,
            applies: AtomicU64::new(0),
        }
    }
}

impl Preconditioner for IdentityPrecond {
    fn dim(&self) -> usize {
        self.dim
    }

    fn label(&self) -> String {
        "identity".into()
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(self.dim, v.len())?;
        out.copy_from_slice(v);
        self.applies.fetch_add(1, AtomicOrdering::Relaxed);
        Ok(())
    }

    fn solve_count(&self) -> u64 {
        self.applies.load(AtomicOrdering::Relaxed)
    }

    fn reset_solve_count(&self) {
        self.applies.store(0, AtomicOrdering::Relaxed);
    }
}

/// Whether a block pinch uses the natural ordering or reverse Cuthill–McKee.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockOrdering {
    Natural,
    Rcm,
}

/// Declarative description of a pinch candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSpec {
    pub block_size: usize,
    pub ordering: BlockOrdering,
}

impl BlockSpec {
    pub fn new(block_size: usize, ordering: BlockOrdering) -> Result<Self> {
        if block_size < 1 {
            return Err(Error::InvalidParameter("block size must be at least 1".into()));
        }
        Ok(BlockSpec {
            block_size,
            ordering,
        })
    }

    pub fn build(&self, a: &CsrMatrix) -> Result<BlockPinch> {
        match self.ordering {
            BlockOrdering::Natural => block_pinch(a, self.block_size),
            BlockOrdering::Rcm => rcm_block_pinch(a, self.block_size),
        }
    }
}

/// Block-diagonal pinch of a sparse matrix, with contiguous blocks
/// `A[mℓ..min(d,(m+1)ℓ), mℓ..min(d,(m+1)ℓ)]`, optionally in a reordered frame.
pub struct BlockPinch {
    dim: usize,
    block_size: usize,
    perm: Option<Permutation>,
    blocks: Vec<Cholesky>,
    applies: AtomicU64,
}

impl core::fmt::Debug for BlockPinch {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("BlockPinch")
            .field("dim", &self.dim)
            .field("block_size", &self.block_size)
            .field("reordered", &self.perm.is_some())
            .finish()
    }
}

fn factor_blocks(a: &CsrMatrix, block_size: usize) -> Result<Vec<Cholesky>> {
    let d = a.dim();
    let mut blocks = Vec::new();
    let mut start = 0;
    let mut m = 0;
    while start < d {
        let len = block_size.min(d - start);
        let block = a.dense_diag_block(start, len);
        let chol =
            Cholesky::factor(&block).ok_or(Error::BlockNotPositiveDefinite { block: m })?;
        blocks.push(chol);
        start += len;
        m += 1;
    }
    Ok(blocks)
}

/// Block-diagonal pinch of `A` with block size `block_size` in the natural
/// ordering. A block size of `dim` or more collapses to the full matrix, so
/// the result applies `A⁻¹` exactly.
pub fn block_pinch(a: &CsrMatrix, block_size: usize) -> Result<BlockPinch> {
    if block_size < 1 {
        return Err(Error::InvalidParameter("block size must be at least 1".into()));
    }
    Ok(BlockPinch {
        dim: a.dim(),
        block_size,
        perm: None,
        blocks: factor_blocks(a, block_size)?,
        applies: AtomicU64::new(0),
    })
}

/// Same pinch, taken after a reverse Cuthill–McKee reordering of the matrix:
/// applies `Pᵀ·pinch(P·A·Pᵀ)⁻¹·P`.
pub fn rcm_block_pinch(a: &CsrMatrix, block_size: usize) -> Result<BlockPinch> {
    if block_size < 1 {
        return Err(Error::InvalidParameter("block size must be at least 1".into()));
    }
    let perm = rcm_ordering(a);
    let reordered = a.permute_symmetric(&perm)?;
    Ok(BlockPinch {
        dim: a.dim(),
        block_size,
        perm: Some(perm),
        blocks: factor_blocks(&reordered, block_size)?,
        applies: AtomicU64::new(0),
    })
}

impl BlockPinch {
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn is_reordered(&self) -> bool {
        self.perm.is_some()
    }

    fn solve_blocks(&self, w: &mut [f64]) {
        let mut start = 0;
        for chol in &self.blocks {
            let len = chol.size();
            chol.solve_in_place(&mut w[start..start + len]);
            start += len;
        }
    }
}

impl Preconditioner for BlockPinch {
    fn dim(&self) -> usize {
        self.dim
    }

    fn label(&self) -> String {
        match self.perm {
            None => alloc::format!("blk_{}", self.block_size),
            Some(_) => alloc::format!("rcm_{}", self.block_size),
        }
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(self.dim, v.len())?;
        match &self.perm {
            None => {
                out.copy_from_slice(v);
                self.solve_blocks(out);
            }
            Some(p) => {
                let mut w = p.gather(v);
                self.solve_blocks(&mut w);
                out.copy_from_slice(&p.scatter(&w));
            }
        }
        self.applies.fetch_add(1, AtomicOrdering::Relaxed);
        Ok(())
    }

    fn solve_count(&self) -> u64 {
        self.applies.load(AtomicOrdering::Relaxed)
    }

    fn reset_solve_count(&self) {
        self.applies.store(0, AtomicOrdering::Relaxed);
    }
}
