//! Compensated (error-free transformation) kernels for quantities whose
//! differences matter at the roundoff level.

use super::Matrix;
use crate::scalar::Real;

#[inline]
fn two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod<T: Real>(a: T, b: T) -> (T, T) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Entry `(i, j)` of `UᵀMU`, accurate to a few units in the last place of
/// the result (independently of cancellation at the working precision).
pub fn congruence_entry<T: Real>(m: &Matrix<T>, u: &Matrix<T>, i: usize, j: usize) -> T {
    let d = m.rows();
    let ui = u.column(i);
    let uj = u.column(j);
    let (mut hi, mut lo) = (T::zero(), T::zero());
    for q in 0..d {
        // c = Σ_p U_pi M_pq as an unevaluated pair (c_hi + c_lo)
        let (mut c_hi, mut c_lo) = (T::zero(), T::zero());
        let mq = m.column(q);
        for p in 0..d {
            let (prod, e1) = two_prod(ui[p], mq[p]);
            let (s, e2) = two_sum(c_hi, prod);
            c_hi = s;
            c_lo += e1 + e2;
        }
        let (prod, e1) = two_prod(c_hi, uj[q]);
        let (s, e2) = two_sum(hi, prod);
        hi = s;
        lo += e1 + e2 + c_lo * uj[q];
    }
    hi + lo
}

/// `‖low(UᵀMU)‖_F²` with compensated entries.
pub fn low_congruence_norm_sq<T: Real>(m: &Matrix<T>, u: &Matrix<T>) -> T {
    let d = m.rows();
    let mut total = T::zero();
    for j in 0..d {
        for i in (j + 1)..d {
            let a = congruence_entry(m, u, i, j);
            total += a * a;
        }
    }
    total
}
