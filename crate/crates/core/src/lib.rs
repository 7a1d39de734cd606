//! Maximization of monotone, normalized set functions that are only *weakly*
//! submodular, under matroid constraints.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`]: dense symmetric linear algebra (PD inverses, eigenvalues,
//!   sparse minimum eigenvalues, Woodbury updates).
//! * [`set_functions`]: the objectives (R² subset selection, Bayesian
//!   A-optimal design, the indistinguishable-element worst case, modular and
//!   coverage baselines) and the counting/memoizing [`Oracle`].
//! * [`matroids`]: uniform, partition and callback matroids.
//! * [`ratios`]: brute-force submodularity ratios and their spectral bounds.
//! * [`potential`]: the distorted potential `g_phi`, its coefficient table and
//!   its sampled marginal estimator.
//! * [`algorithms`]: residual random greedy, plain local search, exact and
//!   sampled distorted local search, brute force, guarantee curves.
//! * [`verify`]: named property suites that check the theory numerically.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise.

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod error;
pub mod linalg;
pub mod matroids;
pub mod par;
pub mod potential;
pub mod ratios;
pub mod set_functions;
pub mod subset;
pub mod verify;

pub use error::{Error, Result};
pub use matroids::Matroid;
pub use set_functions::{Oracle, SetFunction};
pub use subset::Subset;

/// Threshold below which a pivot or eigenvalue is treated as zero.
pub const TAU_PD: f64 = 1e-10;
