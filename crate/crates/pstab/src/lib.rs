//! Sketched estimation of preconditioner stability and candidate selection.
//!
//! The stability `‖I − M⁻¹A‖_F` of a preconditioner `M` for a system matrix
//! `A` forecasts how well `M` will do inside conjugate gradients, but
//! computing it exactly costs as much as solving the system. A Gaussian
//! sketch brings that down to a handful of matrix-vector products and
//! preconditioner solves. This crate provides:
//!
//! - the sketched estimator and its deterministic column-by-column oracle
//!   ([`stability`]);
//! - sample-size formulas turning a relative accuracy and failure
//!   probability into a sketch width;
//! - selection of the minimal-stability candidate, either with one shared
//!   sketch or adaptively with per-round filtering ([`select`]);
//! - block-pinch preconditioners (natural or reverse Cuthill–McKee order)
//!   for sparse systems ([`precond`]);
//! - cluster-permuted block and low-rank-corrected preconditioners for
//!   squared exponential kernel systems ([`kernel`]);
//! - a preconditioned conjugate gradient solver to validate selections end
//!   to end ([`pcg`]).
//!
//! Everything is deterministic given a seed: randomness flows through
//! ChaCha streams ([`rng`]), so estimates, selections and whole experiments
//! reproduce bit-for-bit.
//!
//! The crate is `no_std`-compatible (it requires `alloc`); disable the
//! default `std` feature for embedded or sandboxed use. File formats and the
//! command-line harness live in the companion `pstab-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod dense;
pub mod error;
pub mod kernel;
pub mod operator;
pub mod pcg;
pub mod perm;
pub mod precond;
pub mod rng;
pub mod select;
pub mod sparse;
pub mod stability;

pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use operator::LinearOperator;
pub use pcg::{pcg_solve, SolveResult, StoppingRule};
pub use perm::Permutation;
pub use precond::{
    block_pinch, rcm_block_pinch, rcm_ordering, BlockOrdering, BlockPinch, BlockSpec,
    IdentityPrecond, Preconditioner,
};
pub use select::{
    adaptive_select, select_preconditioner, selection_guarantee_check, SelectionParams,
    SelectionReport, SelectionRound,
};
pub use sparse::CsrMatrix;
pub use stability::{
    exact_stability, sample_size_select, sample_size_stab, stab_estimate, stab_from_sketch,
    SketchedSystem, StabilityEstimate,
};
