//! Component estimation from a triangularizer, scale recovery, column
//! matching and the first-order component error bound.

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{matrix_metrics, Matrix, OrthogonalFrame, PivotedQr};
use crate::permutations::permutations;
use crate::scalar::Real;
use crate::triangularizer::{CombinationVector, MatrixSet};

use super::first_order::check_components;
use super::observable::pencil_weights;
use super::ComponentMatrix;

/// Ratio matrix `Yₙᵢ = [UᵀM̂ₙU]ᵢᵢ`, an estimate of `Zₙᵢ / [wᵀZ]ᵢ`.
pub fn estimate_components<T: Real>(u: &OrthogonalFrame<T>, set: &MatrixSet<T>) -> Result<ComponentMatrix<T>> {
    if u.dim() != set.d() {
        return Err(dim_mismatch(format!("frame is {0}x{0}, set has d = {1}", u.dim(), set.d())));
    }
    let n = set.len();
    let d = set.d();
    let mut y = Matrix::zeros(n, d);
    for (k, m) in set.iter().enumerate() {
        let a = m.congruence(u.matrix());
        for i in 0..d {
            y[(k, i)] = a[(i, i)];
        }
    }
    ComponentMatrix::new(y).map_err(|_| Error::InvalidInput("estimate needs N >= d".into()))
}

/// Solves `m̂_w = Y diag(s)³ Yᵀ` for the column scales: `sᵢ = ∛[Y⁺ m̂_w Y⁺ᵀ]ᵢᵢ`
/// (real, sign-preserving), and returns `Z* = Y diag(s)`.
///
/// `m_theta_hat` is the unreduced `N × N` pencil `Σ wₙ m̃ₙ`; when `d < N`
/// the pseudo-inverse of the full-column-rank `Y` is used.
pub fn recover_scales<T: Real>(
    m_theta_hat: &Matrix<T>,
    y: &ComponentMatrix<T>,
    theta: &CombinationVector<T>,
) -> Result<ComponentMatrix<T>> {
    let n = y.n();
    if m_theta_hat.rows() != n || m_theta_hat.cols() != n || theta.len() != n {
        return Err(dim_mismatch(format!("pencil and theta must match N = {n}")));
    }
    let qr = PivotedQr::new(y.matrix());
    let tol = T::tol(1e-12);
    let a = qr.solve(m_theta_hat, tol).map_err(|_| Error::SingularY)?; // Y⁺ m
    let c = qr.solve(&a.transpose(), tol).map_err(|_| Error::SingularY)?; // Y⁺ (Y⁺ m)ᵀ
    let s: Vec<T> = (0..y.d()).map(|i| c[(i, i)].cbrt()).collect();
    ComponentMatrix::new(y.matrix().matmul(&Matrix::diag(&s)))
}

/// Column normalization `Zₙᵢ / [wᵀZ]ᵢ` with `w = √N·θ`.
pub fn normalized_components<T: Real>(z: &ComponentMatrix<T>, theta: &CombinationVector<T>) -> Result<ComponentMatrix<T>> {
    let sums = z.weighted_column_sums(&pencil_weights(theta));
    if let Some(i) = sums.iter().position(|s| *s == T::zero()) {
        return Err(Error::ZeroColumnSum { column: i });
    }
    let inv: Vec<T> = sums.iter().map(|&s| T::one() / s).collect();
    ComponentMatrix::new(z.matrix().matmul(&Matrix::diag(&inv)))
}

/// Best column correspondence between an estimate and the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnMatch<T> {
    /// `estimate column perm[i]` is matched with `truth column i`.
    pub perm: Vec<usize>,
    pub total_error: T,
    pub max_error: T,
}

/// Permutation of the estimate's columns minimizing the total entrywise
/// absolute error (exhaustive search, `d ≤ 8`).
pub fn match_columns<T: Real>(estimate: &Matrix<T>, truth: &Matrix<T>) -> Result<ColumnMatch<T>> {
    if estimate.rows() != truth.rows() || estimate.cols() != truth.cols() {
        return Err(dim_mismatch("estimate and truth differ in shape"));
    }
    let d = truth.cols();
    if d > 8 {
        return Err(Error::TooLarge { d, limit: 8 });
    }
    // cost[j][i]: error of estimate column j against truth column i
    let cost: Vec<Vec<T>> = (0..d)
        .map(|j| {
            (0..d)
                .map(|i| estimate.column(j).iter().zip(truth.column(i)).map(|(&a, &b)| (a - b).abs()).sum())
                .collect()
        })
        .collect();
    let mut best: Option<(T, Vec<usize>)> = None;
    for p in permutations(d) {
        let total: T = (0..d).map(|i| cost[p[i]][i]).sum();
        if best.as_ref().is_none_or(|(b, _)| total < *b) {
            best = Some((total, p));
        }
    }
    let (total_error, perm) = best.expect("at least one permutation");
    let mut max_error = T::zero();
    for (i, &j) in perm.iter().enumerate() {
        for (&a, &b) in estimate.column(j).iter().zip(truth.column(i)) {
            max_error = max_error.max((a - b).abs());
        }
    }
    Ok(ColumnMatch { perm, total_error, max_error })
}

/// Constants and value of the first-order entrywise error bound on the
/// normalized components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentBound<T> {
    /// `4Nσ√(d(d−1))κ(Z)⁴/γ·M²W + σW`.
    pub bound: T,
    /// Same expression with `√(d(d−d)) = 0` and no factor `N`, i.e. `σW`.
    pub bound_as_stated: T,
    /// `(1/N)·min_{i≠i'} Σₙ (Zₙᵢ − Zₙᵢ')²`.
    pub gamma: T,
    /// `N κ(Z)² max|Z| / min|1ᵀZ|`.
    pub m_const: T,
    /// `ε √N κ(Z)² / (‖Z‖₂² min|1ᵀZ|) · (1 + M)`.
    pub w_const: T,
}

pub fn component_error_bound<T: Real>(z: &ComponentMatrix<T>, eps: T, sigma: T) -> Result<ComponentBound<T>> {
    let sums = check_components(z)?;
    let zm = z.matrix();
    let (n, d) = (z.n(), z.d());
    let nn = T::c(n as f64);
    let mut gamma = T::infinity();
    for i in 0..d {
        for j in (i + 1)..d {
            let s: T = zm.column(i).iter().zip(zm.column(j)).map(|(&a, &b)| (a - b).powi(2)).sum();
            gamma = gamma.min(s / nn);
        }
    }
    if d > 1 && !(gamma > T::zero()) {
        return Err(Error::DegenerateSpectrum { gamma: gamma.to_f64_lossy() });
    }
    let metrics = matrix_metrics(zm);
    let kappa = metrics.condition;
    let min_sum = sums.iter().fold(T::infinity(), |a, &s| a.min(s.abs()));
    let m_const = nn * kappa.powi(2) * zm.max_abs() / min_sum;
    let w_const = eps * nn.sqrt() * kappa.powi(2) / (metrics.spectral.powi(2) * min_sum) * (T::one() + m_const);
    let dd = T::c(d as f64);
    let lead = if d > 1 {
        T::c(4.0) * nn * sigma * (dd * (dd - T::one())).sqrt() * kappa.powi(4) / gamma * m_const.powi(2) * w_const
    } else {
        T::zero()
    };
    Ok(ComponentBound { bound: lead + sigma * w_const, bound_as_stated: sigma * w_const, gamma, m_const, w_const })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{first_order_model, observable_matrices, Tensor3};
    use crate::testutil::*;
    use crate::triangularizer::{descend, find_separating_beta, schur_initializer, BetaStrategy, OptimizerConfig};

    #[test]
    fn identity_components_round_trip() {
        let theta = CombinationVector::ones(3);
        let y = ComponentMatrix::new(Matrix::<f64>::identity(3)).unwrap();
        let z = recover_scales(&Matrix::identity(3), &y, &theta).unwrap();
        assert!((z.matrix() - &Matrix::identity(3)).max_abs() < 1e-15);
    }

    #[test]
    fn negative_scale_uses_real_cube_root() {
        let theta = CombinationVector::ones(1);
        let y = ComponentMatrix::new(Matrix::<f64>::from_rows(&[[1.0]])).unwrap();
        let z = recover_scales(&Matrix::from_rows(&[[-8.0]]), &y, &theta).unwrap();
        assert!((z.matrix()[(0, 0)] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn singular_ratio_matrix_is_rejected() {
        let theta = CombinationVector::ones(2);
        let y = ComponentMatrix::new(Matrix::<f64>::from_rows(&[[1.0, 1.0], [1.0, 1.0]])).unwrap();
        assert_eq!(recover_scales(&Matrix::identity(2), &y, &theta).unwrap_err(), Error::SingularY);
    }

    #[test]
    fn scalar_set_estimate() {
        let set = MatrixSet::new(vec![Matrix::<f64>::from_rows(&[[1.0]])]).unwrap();
        let y = estimate_components(&OrthogonalFrame::identity(1), &set).unwrap();
        assert_eq!(y.matrix().as_slice(), &[1.0]);
    }

    fn pipeline(z: &Matrix<f64>, d: usize) -> (ComponentMatrix<f64>, ComponentMatrix<f64>) {
        let zc = ComponentMatrix::new(z.clone()).unwrap();
        let t = Tensor3::symmetric_cp(&zc);
        let theta = CombinationVector::ones(z.rows());
        let obs = observable_matrices(&t, d, &theta).unwrap();
        let beta = find_separating_beta(&obs.set, BetaStrategy::Ones, 0, 20).unwrap().beta;
        let u0 = schur_initializer(&obs.set, &beta).unwrap();
        let (u, _) = descend(&obs.set, &u0, &OptimizerConfig::default()).unwrap();
        let y = estimate_components(&u, &obs.set).unwrap();
        (y.clone(), recover_scales(&obs.pencil, &y, &theta).unwrap())
    }

    #[test]
    fn noiseless_pipeline_recovers_scaled_columns() {
        let mut r = rng(3);
        let mut z = &Matrix::identity(4) + &gaussian(&mut r, 4, 4).scale(0.3);
        let col: Vec<f64> = z.column(1).iter().map(|x| x * 2.5).collect();
        z.set_column(1, &col);
        let (y, zs) = pipeline(&z, 4);
        // every column of Y sums to one against the ones weights
        for i in 0..4 {
            assert!((y.matrix().column(i).iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
        let m = match_columns(zs.matrix(), &z).unwrap();
        assert!(m.max_error <= 1e-8, "max error {}", m.max_error);
    }

    #[test]
    fn reduced_pipeline_recovers_components() {
        let mut r = rng(19);
        let z = gaussian(&mut r, 5, 3);
        let (_, zs) = pipeline(&z, 3);
        let m = match_columns(zs.matrix(), &z).unwrap();
        assert!(m.max_error <= 1e-8, "max error {}", m.max_error);
    }

    #[test]
    fn matching_finds_the_permutation() {
        let z = Matrix::<f64>::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]);
        let est = z.select_columns(&[2, 0, 1]);
        let m = match_columns(&est, &z).unwrap();
        assert_eq!(m.perm, vec![1, 2, 0]);
        assert_eq!(m.max_error, 0.0);
    }

    #[test]
    fn bound_constants_agree_with_expansion_bounds() {
        let mut r = rng(23);
        let z = ComponentMatrix::new(&Matrix::identity(3) + &gaussian(&mut r, 3, 3).scale(0.3)).unwrap();
        let e = Tensor3::new(3, crate::random::normal_vec(&mut r, 27)).unwrap();
        let e = e.scale(0.5 / e.norm());
        let fo = first_order_model(&z, &e).unwrap();
        let b = component_error_bound(&z, 0.5, 1e-4).unwrap();
        assert!((b.m_const - fo.m_bound).abs() <= 1e-12 * fo.m_bound);
        assert!((b.w_const - fo.w_bound).abs() <= 1e-12 * fo.w_bound);
        assert_eq!(component_error_bound(&z, 0.5, 0.0).unwrap().bound, 0.0);
        assert!(b.bound > b.bound_as_stated);
    }

    #[test]
    fn identical_components_make_z_singular() {
        let z = ComponentMatrix::new(Matrix::<f64>::from_rows(&[[1.0, 1.0, 0.0], [2.0, 2.0, 1.0], [0.5, 0.5, 3.0]]))
            .unwrap();
        assert_eq!(component_error_bound(&z, 1.0, 1e-3).unwrap_err(), Error::SingularZ);
    }
}
