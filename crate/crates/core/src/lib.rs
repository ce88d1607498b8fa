//! Approximate joint triangularization of noisy, nearly commuting matrix sets.
//!
//! The crate computes orthogonal frames that make a family of observed
//! matrices as upper triangular as possible, evaluates first-order a priori
//! and a posteriori bounds on the distance between such a frame and the exact
//! triangularizers of the noiseless family, and applies the machinery to
//! symmetric canonical (CP) tensor decomposition.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the harness and the command
//! line front end use.

// `!(x > y)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the formulas in the numerical kernels.
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod harness;
pub mod io;
pub mod linalg;
mod permutations;
pub mod random;
pub mod scalar;
pub mod tensor;
pub mod triangularizer;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix64 = linalg::Matrix<f64>;
pub type Frame64 = linalg::OrthogonalFrame<f64>;
pub type Skew64 = linalg::SkewDirection<f64>;
