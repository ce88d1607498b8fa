//! First-order expansion `M̂ₙ = Mₙ + σWₙ + O(σ²)` of the observable
//! matrices of a noisy symmetric CP tensor (ones weights, `d = N`).

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{condition_number, matrix_metrics, Matrix};
use crate::scalar::Real;

use super::observable::{right_divide, slices};
use super::{ComponentMatrix, Tensor3};

#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderModel<T> {
    pub m: Vec<Matrix<T>>,
    pub w: Vec<Matrix<T>>,
    /// `d·κ(Z)²·max|Z| / min|1ᵀZ|`.
    pub m_bound: T,
    /// `‖E‖·κ(Z)²·√d / (‖Z‖₂²·min|1ᵀZ|) · (1 + m_bound)`.
    pub w_bound: T,
}

pub(crate) fn check_components<T: Real>(z: &ComponentMatrix<T>) -> Result<Vec<T>> {
    if z.n() != z.d() {
        return Err(dim_mismatch("the first-order model requires N = d"));
    }
    if !condition_number(z.matrix()).is_finite() {
        return Err(Error::SingularZ);
    }
    let sums = z.weighted_column_sums(&vec![T::one(); z.n()]);
    let scale = z.matrix().max_abs();
    for (i, &s) in sums.iter().enumerate() {
        if !(s.abs() > T::tol(1e-12) * scale) {
            return Err(Error::ZeroColumnSum { column: i });
        }
    }
    Ok(sums)
}

/// `Mₙ = Z diag(eₙᵀZ) diag(1ᵀZ)⁻¹ Z⁻¹` and
/// `Wₙ = eₙm⁻¹ − mₙm⁻¹ e m⁻¹`, where `eₙ` are the slices of `noise`,
/// `e = Σeₙ`, `mₙ = Z diag(eₙᵀZ) Zᵀ` and `m = Σmₙ`.
pub fn first_order_model<T: Real>(z: &ComponentMatrix<T>, noise: &Tensor3<T>) -> Result<FirstOrderModel<T>> {
    let sums = check_components(z)?;
    let zm = z.matrix();
    let n = z.n();
    if noise.n() != n {
        return Err(dim_mismatch("noise tensor side differs from N"));
    }
    let zt = zm.transpose();
    let m_full = zm.matmul(&Matrix::diag(&sums)).matmul(&zt);
    let e_slices = slices(noise);
    let mut e_sum = Matrix::zeros(n, n);
    for e in &e_slices {
        e_sum = &e_sum + e;
    }
    let e_over_m = right_divide(&e_sum, &m_full)?;
    let mut ms = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for (k, e_k) in e_slices.iter().enumerate() {
        let row: Vec<T> = (0..n).map(|i| zm[(k, i)]).collect();
        let ratio: Vec<T> = row.iter().zip(&sums).map(|(&a, &b)| a / b).collect();
        // Mₙ = Z diag(ratio) Z⁻¹
        let mk = right_divide(&zm.matmul(&Matrix::diag(&ratio)), zm)?;
        let wk = &right_divide(e_k, &m_full)? - &mk.matmul(&e_over_m);
        ms.push(mk);
        ws.push(wk);
    }
    let metrics = matrix_metrics(zm);
    let kappa2 = metrics.condition.powi(2);
    let min_sum = sums.iter().fold(T::infinity(), |a, &s| a.min(s.abs()));
    let dn = T::c(n as f64);
    let m_bound = dn * kappa2 * zm.max_abs() / min_sum;
    let w_bound = noise.norm() * kappa2 * dn.sqrt() / (metrics.spectral.powi(2) * min_sum) * (T::one() + m_bound);
    Ok(FirstOrderModel { m: ms, w: ws, m_bound, w_bound })
}
