//! Unitary sparsifying operator learning.
//!
//! Given data `P` whose columns admit a sparse representation under some
//! unknown unitary transform, the learner alternates two exact block
//! minimizations of `||W P - Z||_F^2`: hard-thresholding sparse coding of
//! the columns of `Z`, and an SVD-based orthogonal Procrustes update of `W`.
//!
//! The crate provides the learner itself ([`learner`]), a seeded synthesizer
//! for ground-truth models ([`generative`]), and convergence diagnostics
//! ([`analysis`]): contraction factors, initialization radius bounds,
//! per-iteration recursion checks, and Monte Carlo sweeps of the contraction
//! factor over random models.

mod error;
mod matrices;

pub mod analysis;
pub mod generative;
pub mod learner;
pub mod linalg;
pub mod seeding;

pub use error::{Error, Result};
pub use matrices::{SparseCoeffs, TransformMatrix};
