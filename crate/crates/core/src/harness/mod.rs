//! Synthetic ground truth, exact-triangularizer enumeration and seeded
//! Monte Carlo studies of the bounds.
//!
//! Everything here is `f64`. Trial `k` of a study draws from stream `k + 1`
//! of the study seed; stream `0` is reserved for model generation.

mod family;
mod generate;
mod study;

pub use family::{distance_to_nearest, enumerate_exact_triangularizers, TriangularizerFamily, MAX_ENUM_DIM};
pub use generate::{
    gen_components, gen_ground_truth, gen_tensor, noise_matrix, noise_tensor, trial_noise, GeneratorSpec,
    NoiseStyle,
};
pub use study::{
    log_log_slope, nearest_frame, noiseless_sigma_max, run_trial, sigma_sweep, verify_bounds, verify_components,
    ComponentStudy, ComponentTrial, ContainmentCounts, SweepPoint, SweepReport, TrialOutcome, VerifyReport,
    VerifyTrial, ABS_FLOOR, SLACK,
};
