//! Skew-symmetric directions, orthogonal frames, and the exponential /
//! logarithm pair linking them.

use super::decomp::{determinant, svd};
use super::Matrix;
use crate::error::{dim_mismatch, Error, Result};
use crate::scalar::Real;

/// A tangent direction of the orthogonal group: `X = −Xᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewDirection<T>(Matrix<T>);

impl<T: Real> SkewDirection<T> {
    /// Validates skew symmetry entrywise within `1e−12` (relative to the
    /// largest entry when that exceeds one).
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(dim_mismatch("skew direction must be square"));
        }
        if !m.is_finite() {
            return Err(Error::InvalidInput("skew direction has non-finite entries".into()));
        }
        let tol = T::tol(1e-12) * T::one().max(m.max_abs());
        let d = m.rows();
        for j in 0..d {
            for i in 0..=j {
                if (m[(i, j)] + m[(j, i)]).abs() > tol {
                    return Err(Error::InvalidInput(format!(
                        "matrix is not skew-symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: Matrix<T>) -> Self {
        Self(m)
    }

    /// `(A − Aᵀ) / 2`, exactly skew by construction.
    pub fn skew_part(a: &Matrix<T>) -> Self {
        let half = T::c(0.5);
        Self(Matrix::from_fn(a.rows(), a.cols(), |i, j| (a[(i, j)] - a[(j, i)]) * half))
    }

    /// `E − Eᵀ` where `E = low(a)`.
    pub fn from_lower(a: &Matrix<T>) -> Self {
        Self(Matrix::from_fn(a.rows(), a.cols(), |i, j| {
            if i > j {
                a[(i, j)]
            } else if i < j {
                -a[(j, i)]
            } else {
                T::zero()
            }
        }))
    }

    pub fn zeros(d: usize) -> Self {
        Self(Matrix::zeros(d, d))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    pub fn norm(&self) -> T {
        self.0.frobenius_norm()
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.scale(s))
    }

    /// Unit Frobenius norm copy; zero stays zero.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == T::zero() {
            self.clone()
        } else {
            self.scale(T::one() / n)
        }
    }
}

/// A `d × d` orthogonal matrix, `‖UᵀU − I‖_F ≤ 1e−10`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalFrame<T>(Matrix<T>);

impl<T: Real> OrthogonalFrame<T> {
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(dim_mismatch("orthogonal frame must be square"));
        }
        let err = orthogonality_error(&m);
        if !(err <= T::tol(1e-10)) {
            return Err(Error::InvalidInput(format!(
                "matrix is not orthogonal (‖UᵀU − I‖ = {:e})",
                err.to_f64_lossy()
            )));
        }
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: Matrix<T>) -> Self {
        Self(m)
    }

    pub fn identity(d: usize) -> Self {
        Self(Matrix::identity(d))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    /// `U · skew_exp(X, t)`.
    pub fn retract(&self, x: &SkewDirection<T>, t: T) -> Self {
        Self(self.0.matmul(skew_exp(x, t).matrix()))
    }

    /// `selfᵀ · other`, the relative rotation between two frames.
    pub fn relative_to(&self, other: &Self) -> Self {
        Self(self.0.tr_matmul(&other.0))
    }

    pub fn determinant(&self) -> T {
        determinant(&self.0)
    }

    /// Flips column signs so that every column's first entry of magnitude
    /// above `1e−10` is positive.
    pub fn with_sign_convention(mut self) -> Self {
        normalize_column_signs(&mut self.0);
        self
    }
}

pub fn orthogonality_error<T: Real>(m: &Matrix<T>) -> T {
    (&m.tr_matmul(m) - &Matrix::identity(m.cols())).frobenius_norm()
}

pub(crate) fn normalize_column_signs<T: Real>(m: &mut Matrix<T>) {
    let tol = T::tol(1e-10);
    for j in 0..m.cols() {
        let col = m.column_mut(j);
        let scale = col.iter().fold(T::zero(), |a, &x| a.max(x.abs()));
        if let Some(&first) = col.iter().find(|x| x.abs() > tol * scale) {
            if first < T::zero() {
                for x in col.iter_mut() {
                    *x = -*x;
                }
            }
        }
    }
}

/// `exp(scale · X)` by scaling and squaring with a Taylor kernel.
pub fn skew_exp<T: Real>(x: &SkewDirection<T>, scale: T) -> OrthogonalFrame<T> {
    OrthogonalFrame(expm(&x.matrix().scale(scale)))
}

/// Dense matrix exponential (scaling and squaring, Taylor kernel).
pub fn expm<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    let d = a.rows();
    let norm = a.frobenius_norm();
    let mut squarings = 0i32;
    if norm > T::c(0.25) {
        squarings = (norm / T::c(0.25)).log2().ceil().to_i32().unwrap_or(0).max(0);
    }
    let b = a.scale(T::c(2.0).powi(-squarings));
    let mut result = Matrix::identity(d);
    let mut term = Matrix::identity(d);
    for k in 1..=24 {
        term = term.matmul(&b).scale(T::one() / T::c(k as f64));
        result = &result + &term;
        if term.max_abs() <= T::epsilon() * T::c(1e-3) {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

/// Principal logarithm of a rotation.
///
/// Inverse scaling and squaring: principal square roots (taken as the
/// orthogonal polar factor of `I + Q`) until the iterate is within `0.25` of
/// the identity, then a truncated `log(I + E)` series, rescaled by `2^k`.
pub fn orthogonal_log<T: Real>(q: &OrthogonalFrame<T>) -> Result<SkewDirection<T>> {
    let d = q.dim();
    if d == 0 {
        return Ok(SkewDirection::zeros(0));
    }
    if q.determinant() < T::zero() {
        return Err(Error::NegativeDeterminant);
    }
    // Q is normal, so the singular values of Q + I are |λ + 1|.
    let shifted = q.matrix() + &Matrix::identity(d);
    let dist = svd(&shifted).sigma_min();
    if dist < T::tol(1e-6) {
        return Err(Error::LogBranchAmbiguous { distance: dist.to_f64_lossy() });
    }

    let id = Matrix::identity(d);
    let mut y = q.matrix().clone();
    let mut roots = 0;
    while (&y - &id).frobenius_norm() > T::c(0.25) && roots < 64 {
        let f = svd(&(&y + &id));
        y = f.u.matmul(&f.v.transpose());
        roots += 1;
    }
    let e = &y - &id;
    let mut log = Matrix::zeros(d, d);
    let mut power = Matrix::identity(d);
    for k in 1..=40 {
        power = power.matmul(&e);
        let coef = if k % 2 == 1 { T::one() } else { -T::one() } / T::c(k as f64);
        log = &log + &power.scale(coef);
        if power.max_abs() / T::c(k as f64) <= T::epsilon() * T::c(1e-3) {
            break;
        }
    }
    let log = log.scale(T::c(2.0).powi(roots));
    Ok(SkewDirection::skew_part(&log))
}
