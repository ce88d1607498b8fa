//! Joint triangularization: the loss, its derivatives, separating pencils,
//! the Schur initializer and descent.

mod descent;
mod init;
mod objective;
mod set;

pub use descent::{descend, DescentTrace, IterRecord, OptimizerConfig, Termination};
pub use init::{find_separating_beta, schur_initializer, separation, BetaStrategy, SeparatingBeta};
pub use objective::{gradient, hessian_form, loss};
pub use set::{CombinationVector, MatrixSet};
