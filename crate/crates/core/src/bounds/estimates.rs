//! First-order bounds on the distance `α` between an approximate joint
//! triangularizer and the exact ones, and the related constants.

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{low_part, LowProjector, OrthogonalFrame, SkewDirection};
use crate::scalar::Real;
use crate::triangularizer::{loss, CombinationVector, MatrixSet};

use super::operators::{assemble_t_tilde, commutator_operator, operator_inverse_norm};
use super::GroundTruthModel;

/// Requires every `low(U∘ᵀMₙU∘)` to vanish within `1e−8` (relative to
/// `max(1, ‖Mₙ‖)`).
fn check_exact<T: Real>(gt: &GroundTruthModel<T>, u: &OrthogonalFrame<T>) -> Result<()> {
    if u.dim() != gt.d() {
        return Err(dim_mismatch(format!("frame is {0}x{0}, model has d = {1}", u.dim(), gt.d())));
    }
    for (k, m) in gt.clean_matrices().iter().enumerate() {
        let r = low_part(&m.congruence(u.matrix())).max_abs();
        if r > T::tol(1e-8) * T::one().max(m.frobenius_norm()) {
            return Err(Error::InvalidInput(format!(
                "frame does not triangularize M{k} (residual {:e})",
                r.to_f64_lossy()
            )));
        }
    }
    Ok(())
}

fn noiseless_inverse_norm<T: Real>(gt: &GroundTruthModel<T>, u_circ: &OrthogonalFrame<T>) -> Result<T> {
    check_exact(gt, u_circ)?;
    if gt.d() == 1 {
        return Ok(T::zero());
    }
    assemble_t_tilde(u_circ, &gt.clean_set(), None)?.inverse_norm()
}

/// `2√2·σ·‖T̃⁻¹‖₂·√(Σ‖Mₙ‖²)·√(Σ‖Wₙ‖²)`, with `T̃` built at the exact
/// triangularizer `U∘`.
pub fn a_priori_bound<T: Real>(gt: &GroundTruthModel<T>, u_circ: &OrthogonalFrame<T>) -> Result<T> {
    let inv = noiseless_inverse_norm(gt, u_circ)?;
    Ok(T::c(8.0).sqrt() * gt.sigma() * inv * gt.clean_sq_sum().sqrt() * gt.noise_sq_sum().sqrt())
}

/// `2σ√(d(d−1))·κ(V)⁴/γ·√(Σ‖Mₙ‖²)·√(Σ‖Wₙ‖²)`. Returns `(bound, γ)`.
pub fn explicit_bound<T: Real>(gt: &GroundTruthModel<T>) -> Result<(T, T)> {
    let gamma = checked_gamma(gt)?;
    let d = T::c(gt.d() as f64);
    if gt.d() == 1 {
        return Ok((T::zero(), gamma));
    }
    let bound = T::c(2.0) * gt.sigma() * (d * (d - T::one())).sqrt() * gt.kappa().powi(4) / gamma
        * gt.clean_sq_sum().sqrt()
        * gt.noise_sq_sum().sqrt();
    Ok((bound, gamma))
}

fn checked_gamma<T: Real>(gt: &GroundTruthModel<T>) -> Result<T> {
    let gamma = gt.gamma();
    let scale = gt.lambda().max_abs().powi(2) * T::c(gt.n() as f64);
    if !(gamma > T::epsilon() * scale) {
        return Err(Error::DegenerateSpectrum { gamma: gamma.to_f64_lossy() });
    }
    Ok(gamma)
}

/// First-order displacement `αX = E − Eᵀ`, `E = mat(P_lowᵀ x)` with
/// `x = −σ T̃⁻¹ Σₙ t̃ₙᵀ P_low vec(U∘ᵀWₙU∘)`.
pub fn predicted_direction<T: Real>(
    gt: &GroundTruthModel<T>,
    u_circ: &OrthogonalFrame<T>,
) -> Result<SkewDirection<T>> {
    check_exact(gt, u_circ)?;
    let d = gt.d();
    if d == 1 {
        return Ok(SkewDirection::zeros(1));
    }
    let bundle = assemble_t_tilde(u_circ, &gt.clean_set(), None)?;
    bundle.inverse_norm()?;
    let proj = LowProjector::new(d);
    let mut rhs = vec![T::zero(); proj.dim()];
    for (t, w) in bundle.t_tilde_list.iter().zip(gt.noise()) {
        let wn = proj.project(&w.congruence(u_circ.matrix()));
        let tw = t.transpose().matvec(&wn);
        for (r, v) in rhs.iter_mut().zip(tw) {
            *r += v;
        }
    }
    let b = crate::linalg::Matrix::from_col_major(rhs.len(), 1, rhs)?;
    let sol = crate::linalg::solve_checked(&bundle.t_tilde_sum, &b, T::tol(1e-10))?;
    let x: Vec<T> = sol.as_slice().iter().map(|&v| -gt.sigma() * v).collect();
    Ok(SkewDirection::from_lower(&proj.embed(&x)))
}

/// `T̂_β`: the restricted commutator operator of `UᵀM̂_βU`.
pub fn t_hat<T: Real>(set: &MatrixSet<T>, u: &OrthogonalFrame<T>, beta: &CombinationVector<T>) -> Result<crate::linalg::Matrix<T>> {
    set.check_frame(u.dim())?;
    let mb = set.combine(beta.as_slice())?;
    Ok(commutator_operator(&LowProjector::new(set.d()), &mb.congruence(u.matrix())))
}

/// `√2·‖β‖·‖T̂_β⁻¹‖₂·(√ℒ(U) + σ√N)`, from observable quantities only.
pub fn a_posteriori_bound<T: Real>(set: &MatrixSet<T>, u: &OrthogonalFrame<T>, beta: &[T], sigma: T) -> Result<T> {
    let beta = CombinationVector::new(beta.to_vec())?;
    if beta.len() != set.len() {
        return Err(dim_mismatch("combination length differs from N"));
    }
    let inv = operator_inverse_norm(&t_hat(set, u, &beta)?)?;
    let l = loss(u, set)?;
    Ok(T::c(2.0).sqrt() * inv * (l.sqrt() + sigma * T::c(set.len() as f64).sqrt()))
}

/// Constants of the certified-initialization noise threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseThreshold<T> {
    pub sigma_max: T,
    /// `α_max` at the model's own `σ`.
    pub alpha_max: T,
    pub epsilon: T,
    pub gamma: T,
    pub a_alpha: T,
    pub a_sigma: T,
    /// `‖T̂_β⁻¹‖₂` at `U_init`.
    pub t_hat_inv_norm: T,
}

impl<T: Real> NoiseThreshold<T> {
    /// `max(0, (2ε − σA_σ)/A_α)`; zero means no certified region at `σ`.
    pub fn alpha_max_at(&self, sigma: T) -> T {
        ((T::c(2.0) * self.epsilon - sigma * self.a_sigma) / self.a_alpha).max(T::zero())
    }
}

/// `σ_max = 2ε/(√(2N)‖T̂_β⁻¹‖₂A_α + A_σ)` with `ε = γ/(2κ(V)⁴)`,
/// `A_α = 32Σ‖Mₙ‖²`, `A_σ = 16√N√(Σ‖Mₙ‖²)`; `T̂_β` is taken from the
/// observed matrices at `U_init`.
pub fn init_noise_threshold<T: Real>(
    gt: &GroundTruthModel<T>,
    beta: &CombinationVector<T>,
    u_init: &OrthogonalFrame<T>,
) -> Result<NoiseThreshold<T>> {
    let gamma = checked_gamma(gt)?;
    let set = gt.observed_set();
    if beta.len() != set.len() {
        return Err(dim_mismatch("combination length differs from N"));
    }
    let inv = operator_inverse_norm(&t_hat(&set, u_init, beta)?)?;
    let n = T::c(gt.n() as f64);
    let msq = gt.clean_sq_sum();
    let epsilon = gamma / (T::c(2.0) * gt.kappa().powi(4));
    let a_alpha = T::c(32.0) * msq;
    let a_sigma = T::c(16.0) * n.sqrt() * msq.sqrt();
    let sigma_max = T::c(2.0) * epsilon / ((T::c(2.0) * n).sqrt() * inv * a_alpha + a_sigma);
    let mut out =
        NoiseThreshold { sigma_max, alpha_max: T::zero(), epsilon, gamma, a_alpha, a_sigma, t_hat_inv_norm: inv };
    out.alpha_max = out.alpha_max_at(gt.sigma());
    Ok(out)
}

/// `2α‖Mₙ‖ + σ‖Wₙ‖`.
pub fn eigenvalue_error_bound<T: Real>(alpha: T, sigma: T, m_norm: T, w_norm: T) -> T {
    T::c(2.0) * alpha * m_norm + sigma * w_norm
}
