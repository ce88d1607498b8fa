use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{norm2, Matrix};
use crate::scalar::Real;

/// `N` real `d × d` matrices of a common dimension, all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSet<T> {
    d: usize,
    matrices: Vec<Matrix<T>>,
}

impl<T: Real> MatrixSet<T> {
    pub fn new(matrices: Vec<Matrix<T>>) -> Result<Self> {
        let first = matrices.first().ok_or_else(|| Error::InvalidInput("empty matrix set".into()))?;
        let d = first.rows();
        if d == 0 {
            return Err(Error::InvalidInput("matrices must be at least 1x1".into()));
        }
        for (n, m) in matrices.iter().enumerate() {
            if m.rows() != d || m.cols() != d {
                return Err(dim_mismatch(format!(
                    "matrix {n} is {}x{}, expected {d}x{d}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_finite() {
                return Err(Error::InvalidInput(format!("matrix {n} has non-finite entries")));
            }
        }
        Ok(Self { d, matrices })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of matrices `N`.
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[Matrix<T>] {
        &self.matrices
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Matrix<T>> {
        self.matrices.iter()
    }

    /// `Σₙ βₙ Mₙ`.
    pub fn combine(&self, beta: &[T]) -> Result<Matrix<T>> {
        if beta.len() != self.len() {
            return Err(dim_mismatch(format!(
                "combination has {} weights for {} matrices",
                beta.len(),
                self.len()
            )));
        }
        let mut out = Matrix::zeros(self.d, self.d);
        for (m, &b) in self.matrices.iter().zip(beta) {
            out = &out + &m.scale(b);
        }
        Ok(out)
    }

    /// `Σₙ ‖Mₙ‖_F²`.
    pub fn frobenius_sq_sum(&self) -> T {
        self.matrices.iter().map(|m| m.frobenius_norm_sq()).sum()
    }

    pub(crate) fn check_frame(&self, d: usize) -> Result<()> {
        if d != self.d {
            return Err(dim_mismatch(format!("frame is {d}x{d}, set has d = {}", self.d)));
        }
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> MatrixSet<U> {
        MatrixSet { d: self.d, matrices: self.matrices.iter().map(|m| m.cast()).collect() }
    }
}

/// Unit-norm weight vector (within `1e−12`).
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationVector<T>(Vec<T>);

impl<T: Real> CombinationVector<T> {
    pub fn new(beta: Vec<T>) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::InvalidInput("empty combination vector".into()));
        }
        let norm = norm2(&beta);
        if !((norm - T::one()).abs() <= T::tol(1e-12)) {
            return Err(Error::NonUnitBeta { norm: norm.to_f64_lossy() });
        }
        Ok(Self(beta))
    }

    /// `v / ‖v‖`.
    pub fn normalized(v: Vec<T>) -> Result<Self> {
        let norm = norm2(&v);
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::InvalidInput("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(Self(v.into_iter().map(|x| x / norm).collect()))
    }

    /// `1 / √N` in every entry.
    pub fn ones(n: usize) -> Self {
        let v = T::one() / T::c(n as f64).sqrt();
        Self(vec![v; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }
}
