//! The restricted commutator operators `t̃ₙ`, their Gram sum `T̃`, and the
//! pencil operator `T̂_β`.

use crate::error::{Error, Result};
use crate::linalg::{singular_values, LowProjector, Matrix, OrthogonalFrame};
use crate::scalar::Real;
use crate::triangularizer::{CombinationVector, MatrixSet};

/// Matrix of `L ↦ low([A, L])` on strictly lower triangular `L`, in the
/// coordinates of `P_low`: `P_low (1⊗A − Aᵀ⊗1) P_lowᵀ`.
pub fn commutator_operator<T: Real>(proj: &LowProjector<T>, a: &Matrix<T>) -> Matrix<T> {
    let id = Matrix::identity(proj.d);
    let k = &id.kron(a) - &a.transpose().kron(&id);
    proj.compress(&k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBundle<T> {
    pub t_tilde_list: Vec<Matrix<T>>,
    /// `T̃ = Σₙ t̃ₙᵀ t̃ₙ`.
    pub t_tilde_sum: Matrix<T>,
    pub sigma_min: T,
    pub sigma_max: T,
    /// `Σₙ βₙ t̃ₙ`, present when a combination was supplied.
    pub t_hat_beta: Option<Matrix<T>>,
}

impl<T: Real> OperatorBundle<T> {
    /// `‖T̃⁻¹‖₂`, failing when `σ_min(T̃) < 1e−12·σ_max(T̃)`.
    pub fn inverse_norm(&self) -> Result<T> {
        inverse_norm_from(self.sigma_min, self.sigma_max)
    }
}

pub(crate) fn inverse_norm_from<T: Real>(smin: T, smax: T) -> Result<T> {
    if !(smin >= T::tol(1e-12) * smax) || !(smin > T::zero()) {
        return Err(Error::SingularOperator { sigma_min: smin.to_f64_lossy() });
    }
    Ok(T::one() / smin)
}

/// `‖K⁻¹‖₂` of a square operator via its singular values. An empty operator
/// (`d = 1`) has norm zero.
pub fn operator_inverse_norm<T: Real>(k: &Matrix<T>) -> Result<T> {
    if k.rows() == 0 {
        return Ok(T::zero());
    }
    let s = singular_values(k);
    inverse_norm_from(s[s.len() - 1], s[0])
}

pub fn assemble_t_tilde<T: Real>(
    u: &OrthogonalFrame<T>,
    set: &MatrixSet<T>,
    beta: Option<&CombinationVector<T>>,
) -> Result<OperatorBundle<T>> {
    let d = set.d();
    if u.dim() != d {
        return Err(crate::error::dim_mismatch(format!("frame is {0}x{0}, set has d = {d}", u.dim())));
    }
    if let Some(b) = beta {
        if b.len() != set.len() {
            return Err(crate::error::dim_mismatch("combination length differs from N"));
        }
    }
    let proj = LowProjector::new(d);
    let p = proj.dim();
    let t_tilde_list: Vec<Matrix<T>> =
        set.iter().map(|m| commutator_operator(&proj, &m.congruence(u.matrix()))).collect();
    let mut sum = Matrix::zeros(p, p);
    for t in &t_tilde_list {
        sum = &sum + &t.tr_matmul(t);
    }
    let sum = sum.symmetrize();
    let s = singular_values(&sum);
    let (sigma_min, sigma_max) = match (s.last(), s.first()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (T::infinity(), T::zero()),
    };
    let t_hat_beta = beta.map(|b| {
        let mut acc = Matrix::zeros(p, p);
        for (t, &w) in t_tilde_list.iter().zip(b.as_slice()) {
            acc = &acc + &t.scale(w);
        }
        acc
    });
    Ok(OperatorBundle { t_tilde_list, t_tilde_sum: sum, sigma_min, sigma_max, t_hat_beta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::low_part;
    use crate::testutil::*;

    #[test]
    fn operator_matches_commutator() {
        let mut r = rng(3);
        let a = gaussian(&mut r, 4, 4);
        let proj = LowProjector::new(4);
        let t = commutator_operator(&proj, &a);
        let x: Vec<f64> = (0..proj.dim()).map(|k| 0.3 * k as f64 - 0.7).collect();
        let l = proj.embed(&x);
        let want = proj.project(&low_part(&a.commutator(&l)));
        let got = t.matvec(&x);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-13);
        }
    }

    #[test]
    fn diagonal_model_gives_diagonal_t_tilde() {
        let set = MatrixSet::new(vec![Matrix::diag(&[0.0, 1.0, 3.0]), Matrix::diag(&[1.0, 1.0, 0.0])]).unwrap();
        let b = assemble_t_tilde(&OrthogonalFrame::identity(3), &set, None).unwrap();
        // lower slots (1,0), (2,0), (2,1)
        let want = Matrix::diag(&[1.0, 10.0, 5.0]);
        assert_eq!(b.t_tilde_sum, want);
        assert_eq!(b.sigma_min, 1.0);
        assert_eq!(b.sigma_max, 10.0);
    }

    #[test]
    fn two_by_two_single_matrix() {
        let set = MatrixSet::new(vec![Matrix::<f64>::from_rows(&[[2.0, 5.0], [0.0, -1.5]])]).unwrap();
        let b = assemble_t_tilde(&OrthogonalFrame::identity(2), &set, Some(&CombinationVector::ones(1))).unwrap();
        assert_eq!(b.t_tilde_sum.as_slice(), &[12.25]);
        assert_eq!(b.t_hat_beta.unwrap().as_slice()[0].abs(), 3.5);
    }

    #[test]
    fn t_tilde_is_symmetric_psd() {
        let mut r = rng(17);
        let set = gaussian_set(&mut r, 4, 3);
        let u = orthogonal(&mut r, 4);
        let b = assemble_t_tilde(&u, &set, None).unwrap();
        let t = &b.t_tilde_sum;
        assert!((t - &t.transpose()).max_abs() <= 1e-12);
        let (vals, _) = crate::linalg::symmetric_eigen(t);
        assert!(vals.iter().all(|&v| v >= -1e-10));
    }

    #[test]
    fn singular_operator_is_reported() {
        let set = MatrixSet::new(vec![Matrix::<f64>::identity(3)]).unwrap();
        let b = assemble_t_tilde(&OrthogonalFrame::identity(3), &set, None).unwrap();
        assert!(matches!(b.inverse_norm(), Err(Error::SingularOperator { .. })));
    }
}
