//! Separating combinations and the Schur initializer.

use crate::error::{Error, Result};
use crate::linalg::{min_gap, real_eigenvalues, schur_ascending, OrthogonalFrame};
use crate::random;
use crate::scalar::Real;

use super::{CombinationVector, MatrixSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaStrategy {
    /// The normalized ones vector first, then seeded random unit vectors.
    Ones,
    /// Seeded random unit vectors only.
    Random,
}

/// A combination whose pencil has real, separated eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatingBeta<T> {
    pub beta: CombinationVector<T>,
    /// Smallest gap between consecutive eigenvalues of `M̂_β`.
    pub gap: T,
}

/// Gap of the pencil `Σβₙ M̂ₙ` if its eigenvalues are real and separated by
/// more than `1e−8·‖M̂_β‖_F`.
pub fn separation<T: Real>(set: &MatrixSet<T>, beta: &CombinationVector<T>) -> Result<Option<T>> {
    let m = set.combine(beta.as_slice())?;
    let vals = match real_eigenvalues(&m) {
        Ok(v) => v,
        Err(Error::ComplexEigenvalues { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let gap = min_gap(&vals);
    let floor = T::tol(1e-8) * m.frobenius_norm();
    Ok((gap > floor).then_some(gap))
}

/// Searches for `β` such that `M̂_β` has real, well separated eigenvalues.
///
/// `max_tries` counts every candidate, including the ones vector.
pub fn find_separating_beta<T: Real>(
    set: &MatrixSet<T>,
    strategy: BetaStrategy,
    seed: u64,
    max_tries: usize,
) -> Result<SeparatingBeta<T>> {
    let n = set.len();
    let mut rng = random::stream(seed, 0);
    for attempt in 0..max_tries {
        let beta = if attempt == 0 && strategy == BetaStrategy::Ones {
            CombinationVector::ones(n)
        } else {
            let v = random::unit_vector(&mut rng, n);
            CombinationVector::normalized(v.into_iter().map(T::c).collect())?
        };
        if let Some(gap) = separation(set, &beta)? {
            return Ok(SeparatingBeta { beta, gap });
        }
    }
    Err(Error::NoSeparatingBeta { tries: max_tries })
}

/// Ordered (ascending) real Schur frame of `M̂_β`.
pub fn schur_initializer<T: Real>(set: &MatrixSet<T>, beta: &CombinationVector<T>) -> Result<OrthogonalFrame<T>> {
    let m = set.combine(beta.as_slice())?;
    Ok(schur_ascending(&m)?.0)
}
