//! The joint triangularization loss and its first two derivatives along
//! geodesics `t ↦ U·exp(tX)`.

use crate::error::Result;
use crate::linalg::{low_congruence_norm_sq, low_norm_sq, low_part, Matrix, OrthogonalFrame, SkewDirection};
use crate::scalar::Real;

use super::MatrixSet;

/// `Σₙ ‖low(UᵀM̂ₙU)‖_F²`.
///
/// Subdiagonal entries are formed with compensated arithmetic so that the
/// loss keeps full relative accuracy near a minimizer, where line searches
/// compare values differing far below `ε‖M̂ₙ‖²`.
pub fn loss<T: Real>(u: &OrthogonalFrame<T>, set: &MatrixSet<T>) -> Result<T> {
    set.check_frame(u.dim())?;
    Ok(set.iter().map(|m| low_congruence_norm_sq(m, u.matrix())).sum())
}

/// Riemannian gradient in body coordinates, `∇ℒ = S − Sᵀ` with
/// `S = Σₙ [UᵀM̂ₙᵀU, low(UᵀM̂ₙU)]`.
///
/// Satisfies `⟨X, ∇ℒ⟩ = d/dt ℒ(U·exp(tX))|₀` for every skew `X`.
pub fn gradient<T: Real>(u: &OrthogonalFrame<T>, set: &MatrixSet<T>) -> Result<SkewDirection<T>> {
    set.check_frame(u.dim())?;
    let d = set.d();
    let mut s = Matrix::zeros(d, d);
    for m in set.iter() {
        let a = m.congruence(u.matrix());
        s = &s + &a.transpose().commutator(&low_part(&a));
    }
    Ok(SkewDirection::new_unchecked(&s - &s.transpose()))
}

/// `d²/dt² ℒ(U·exp(tX))|₀ = Σₙ 2‖ġₙ‖² + 2⟨g̈ₙ, gₙ⟩` with `gₙ = low(Aₙ)`,
/// `ġₙ = low([Aₙ, X])`, `g̈ₙ = low([[Aₙ, X], X])`, `Aₙ = UᵀM̂ₙU`.
pub fn hessian_form<T: Real>(u: &OrthogonalFrame<T>, set: &MatrixSet<T>, x: &SkewDirection<T>) -> Result<T> {
    set.check_frame(u.dim())?;
    set.check_frame(x.dim())?;
    let two = T::c(2.0);
    let mut total = T::zero();
    for m in set.iter() {
        let a = m.congruence(u.matrix());
        let a1 = a.commutator(x.matrix());
        let a2 = a1.commutator(x.matrix());
        total += two * low_norm_sq(&a1) + two * low_part(&a2).dot(&low_part(&a));
    }
    Ok(total)
}
