//! Tensor slices and the observable matrices `M̂ₙ = m̂ₙ m̂_w⁻¹`.

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{solve_checked, svd, Matrix};
use crate::scalar::Real;
use crate::triangularizer::{CombinationVector, MatrixSet};

use super::{ReductionPair, Tensor3};

/// `[m̃ₙ]_{bc} = T_{nbc}`.
pub fn slices<T: Real>(t: &Tensor3<T>) -> Vec<Matrix<T>> {
    let n = t.n();
    (0..n).map(|a| Matrix::from_fn(n, n, |b, c| t.get(a, b, c))).collect()
}

/// Pencil weights `w = √N·θ`, so that the unit ones vector gives ones.
pub fn pencil_weights<T: Real>(theta: &CombinationVector<T>) -> Vec<T> {
    let s = T::c(theta.len() as f64).sqrt();
    theta.as_slice().iter().map(|&x| x * s).collect()
}

/// `a · b⁻¹` through a checked solve with `bᵀ`.
pub(crate) fn right_divide<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    Ok(solve_checked(&b.transpose(), &a.transpose(), T::tol(1e-10))?.transpose())
}

fn weighted_sum<T: Real>(mats: &[Matrix<T>], w: &[T]) -> Matrix<T> {
    let mut acc = Matrix::zeros(mats[0].rows(), mats[0].cols());
    for (m, &x) in mats.iter().zip(w) {
        acc = &acc + &m.scale(x);
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observables<T> {
    /// `M̂ₙ`, `d × d`.
    pub set: MatrixSet<T>,
    /// Present when `d < N`.
    pub reduction: Option<ReductionPair<T>>,
    /// Unreduced pencil `Σ wₙ m̃ₙ` (`N × N`).
    pub pencil: Matrix<T>,
    /// `w = √N·θ`.
    pub weights: Vec<T>,
}

/// Builds `M̂ₙ = m̂ₙ m̂_w⁻¹` with `m̂ₙ = U_dᵀ m̃ₙ V_d` (no reduction when
/// `d = N`) and `m̂_w = Σ wₙ m̂ₙ`, so that `Σ wₙ M̂ₙ = I`.
///
/// Fails with `RankDeficient` when the `d`-th singular value of the pencil
/// is below `1e−10` of the largest.
pub fn observable_matrices<T: Real>(t: &Tensor3<T>, d: usize, theta: &CombinationVector<T>) -> Result<Observables<T>> {
    let n = t.n();
    if d == 0 || d > n {
        return Err(dim_mismatch(format!("need 1 <= d <= N, got d = {d}, N = {n}")));
    }
    if theta.len() != n {
        return Err(dim_mismatch(format!("theta has {} entries, expected {n}", theta.len())));
    }
    let raw = slices(t);
    let weights = pencil_weights(theta);
    let pencil = weighted_sum(&raw, &weights);
    let f = svd(&pencil);
    let ratio = if f.s[0] > T::zero() { f.s[d - 1] / f.s[0] } else { T::zero() };
    if !(ratio > T::tol(1e-10)) {
        return Err(Error::RankDeficient { ratio: ratio.to_f64_lossy() });
    }
    let reduction = if d < n {
        Some(ReductionPair::new(f.u.leading_columns(d), f.v.leading_columns(d))?)
    } else {
        None
    };
    let set = reduce_and_normalize(&raw, &weights, reduction.as_ref())?;
    Ok(Observables { set, reduction, pencil, weights })
}

/// `M̂ₙ` for a given (possibly absent) reduction pair.
pub fn reduce_and_normalize<T: Real>(
    raw: &[Matrix<T>],
    weights: &[T],
    reduction: Option<&ReductionPair<T>>,
) -> Result<MatrixSet<T>> {
    let reduced: Vec<Matrix<T>> = match reduction {
        Some(p) => raw.iter().map(|m| p.reduce(m)).collect(),
        None => raw.to_vec(),
    };
    let m_w = weighted_sum(&reduced, weights);
    let mats = reduced.iter().map(|m| right_divide(m, &m_w)).collect::<Result<Vec<_>>>()?;
    MatrixSet::new(mats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::ComponentMatrix;
    use crate::testutil::*;

    fn identity_tensor(n: usize) -> Tensor3<f64> {
        Tensor3::symmetric_cp(&ComponentMatrix::new(Matrix::identity(n)).unwrap())
    }

    #[test]
    fn identity_components_give_unit_slices() {
        let t = identity_tensor(3);
        for (k, s) in slices(&t).iter().enumerate() {
            let mut e = vec![0.0; 3];
            e[k] = 1.0;
            assert_eq!(s, &Matrix::diag(&e));
        }
        let obs = observable_matrices(&t, 3, &CombinationVector::ones(3)).unwrap();
        assert!(obs.reduction.is_none());
        assert!(obs.weights.iter().all(|w| (w - 1.0).abs() < 1e-15));
        for (k, m) in obs.set.iter().enumerate() {
            let mut e = vec![0.0; 3];
            e[k] = 1.0;
            assert!((m - &Matrix::diag(&e)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn slices_reassemble() {
        let mut r = rng(2);
        let data = crate::random::normal_vec(&mut r, 27);
        let t = Tensor3::new(3, data.clone()).unwrap();
        let s = slices(&t);
        let back: Vec<f64> = (0..3).flat_map(|a| (0..3).flat_map(move |b| (0..3).map(move |c| (a, b, c)))).map(|(a, b, c)| s[a][(b, c)]).collect();
        assert_eq!(back, data);
    }

    #[test]
    fn weighted_sum_is_identity() {
        let mut r = rng(5);
        let z = ComponentMatrix::new(&Matrix::identity(4) + &gaussian(&mut r, 4, 4).scale(0.3)).unwrap();
        let noise = Tensor3::new(4, crate::random::normal_vec(&mut r, 64)).unwrap();
        let t = Tensor3::symmetric_cp(&z).add_scaled(&noise, 1e-3).unwrap();
        let theta = CombinationVector::normalized(vec![1.0, 0.5, -0.2, 0.8]).unwrap();
        let obs = observable_matrices(&t, 4, &theta).unwrap();
        let s = obs.set.combine(&obs.weights).unwrap();
        assert!((&s - &Matrix::identity(4)).max_abs() < 1e-10);
    }

    #[test]
    fn zero_component_is_rank_deficient() {
        let mut z = Matrix::<f64>::identity(3);
        z.set_column(2, &[0.0, 0.0, 0.0]);
        let t = Tensor3::symmetric_cp(&ComponentMatrix::new(z).unwrap());
        let err = observable_matrices(&t, 3, &CombinationVector::ones(3)).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { .. }));
    }

    #[test]
    fn full_size_reduction_is_a_similarity() {
        let mut r = rng(8);
        let z = ComponentMatrix::new(&Matrix::identity(3) + &gaussian(&mut r, 3, 3).scale(0.3)).unwrap();
        let t = Tensor3::symmetric_cp(&z);
        let theta = CombinationVector::ones(3);
        let obs = observable_matrices(&t, 3, &theta).unwrap();
        let f = svd(&obs.pencil);
        let pair = ReductionPair::new(f.u.clone(), f.v.clone()).unwrap();
        let reduced = reduce_and_normalize(&slices(&t), &obs.weights, Some(&pair)).unwrap();
        for (a, b) in obs.set.iter().zip(reduced.iter()) {
            assert!((&a.congruence(&f.u) - b).max_abs() <= 1e-12);
        }
    }

    #[test]
    fn reduced_path_has_the_component_spectrum() {
        let mut r = rng(14);
        let z = ComponentMatrix::new(gaussian(&mut r, 5, 3)).unwrap();
        let t = Tensor3::symmetric_cp(&z);
        let theta = CombinationVector::ones(5);
        let obs = observable_matrices(&t, 3, &theta).unwrap();
        assert_eq!(obs.set.d(), 3);
        let sums = z.weighted_column_sums(&obs.weights);
        let mut want: Vec<f64> = (0..3).map(|i| z.matrix()[(0, i)] / sums[i]).collect();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let got = crate::linalg::real_eigenvalues(&obs.set.matrices()[0]).unwrap();
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-10, "{g} vs {w}");
        }
    }
}
