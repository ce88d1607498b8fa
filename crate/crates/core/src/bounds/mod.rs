//! Computable perturbation bounds for approximate joint triangularizers.
//!
//! Ground-truth entry points take a [`GroundTruthModel`]; the a posteriori
//! bound takes only the observed matrices, a frame, a combination and `σ`.

mod estimates;
mod model;
mod operators;
mod report;

pub use estimates::{
    a_posteriori_bound, a_priori_bound, eigenvalue_error_bound, explicit_bound, init_noise_threshold,
    predicted_direction, t_hat, NoiseThreshold,
};
pub use model::{joint_gap, GroundTruthModel};
pub use operators::{assemble_t_tilde, commutator_operator, operator_inverse_norm, OperatorBundle};
pub use report::BoundReport;
