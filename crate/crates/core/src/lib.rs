//! Certified inexact dual gradient and dual fast gradient augmented Lagrangian
//! methods for `min ½zᵀHz + qᵀz s.t. Az = b, z ∈ Z` with `Z` a box.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::too_many_arguments)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod certify;
pub mod error;
pub mod geometry;
pub mod inner;
pub mod linalg;
pub mod mpc;
pub mod oracle;
pub mod outer;
pub mod problem;

pub use certify::{Certificate, Scheme};
pub use error::{Error, Result};
pub use geometry::{ActiveBound, BoxSet, NormalConeDistanceResult};
pub use inner::{CriterionKind, InnerConstants, InnerProblem, InnerReference, InnerSolution, StoppingCriterion};
pub use linalg::Matrix;
pub use mpc::{LtiModel, MpcSpec};
pub use outer::{BoundInputs, BoundRecord, IdfgmState, IdgmState, OuterOptions, RunMode, Snapshot};
pub use problem::{AugmentedLagrangianParams, BoundRow, BoundSense, ProblemInstance, SolveReport};
