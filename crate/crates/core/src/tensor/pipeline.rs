use crate::error::Result;
use crate::linalg::OrthogonalFrame;
use crate::scalar::Real;
use crate::triangularizer::{
    descend, find_separating_beta, schur_initializer, BetaStrategy, CombinationVector, DescentTrace,
    OptimizerConfig,
};

use super::{estimate_components, observable_matrices, recover_scales, ComponentMatrix, Observables, Tensor3};

#[derive(Debug, Clone)]
pub struct Decomposition<T> {
    pub observables: Observables<T>,
    pub beta: CombinationVector<T>,
    pub u_init: OrthogonalFrame<T>,
    pub frame: OrthogonalFrame<T>,
    pub trace: DescentTrace<T>,
    /// Normalized estimate `Y`.
    pub ratios: ComponentMatrix<T>,
    /// Rescaled estimate `Z*`.
    pub components: ComponentMatrix<T>,
}

/// Observable matrices, Schur initialization, descent, diagonal read-out
/// and scale recovery.
pub fn decompose<T: Real>(
    t: &Tensor3<T>,
    d: usize,
    theta: &CombinationVector<T>,
    strategy: BetaStrategy,
    seed: u64,
    config: &OptimizerConfig<T>,
) -> Result<Decomposition<T>> {
    let observables = observable_matrices(t, d, theta)?;
    let beta = find_separating_beta(&observables.set, strategy, seed, 100)?.beta;
    let u_init = schur_initializer(&observables.set, &beta)?;
    let (frame, trace) = descend(&observables.set, &u_init, config)?;
    let ratios = estimate_components(&frame, &observables.set)?;
    let components = recover_scales(&observables.pencil, &ratios, theta)?;
    Ok(Decomposition { observables, beta, u_init, frame, trace, ratios, components })
}
