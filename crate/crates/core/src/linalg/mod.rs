//! Dense structured linear algebra.

mod compensated;
mod decomp;
mod eigen;
mod expm;
mod matrix;
mod projector;

pub use compensated::{congruence_entry, low_congruence_norm_sq};
pub use decomp::{determinant, qr, singular_values, solve_checked, svd, symmetric_eigen, Lu, PivotedQr, Svd};
pub use eigen::{
    condition_number, eigenvalues, hessenberg, matrix_metrics, ordered_schur, real_eigen, real_eigenvalues,
    schur_ascending, EigenSystem, MatrixMetrics,
};
pub(crate) use eigen::min_gap;
pub use expm::{expm, orthogonal_log, orthogonality_error, skew_exp, OrthogonalFrame, SkewDirection};
pub use matrix::{norm2, Matrix};
pub use projector::{diag_part, low_norm_sq, low_part, lower_positions, up_part, LowProjector};
