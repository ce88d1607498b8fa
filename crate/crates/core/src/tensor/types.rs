use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{orthogonality_error, Matrix};
use crate::scalar::Real;

/// Order-3 tensor of side `N`; entry `(a, b, c)` at `a·N² + b·N + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Tensor3<T> {
    pub fn new(n: usize, data: Vec<T>) -> Result<Self> {
        if n == 0 || data.len() != n * n * n {
            return Err(dim_mismatch(format!("tensor of side {n} needs {} entries, got {}", n * n * n, data.len())));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("tensor has non-finite entries".into()));
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    data.push(f(a, b, c));
                }
            }
        }
        Self { n, data }
    }

    /// `Σᵢ zᵢ ⊗ zᵢ ⊗ zᵢ` over the columns of `z`.
    pub fn symmetric_cp(z: &ComponentMatrix<T>) -> Self {
        let m = z.matrix();
        Self::from_fn(m.rows(), |a, b, c| (0..m.cols()).map(|i| m[(a, i)] * m[(b, i)] * m[(c, i)]).sum())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> T {
        self.data[(a * self.n + b) * self.n + c]
    }

    pub fn norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &Self, s: T) -> Result<Self> {
        if other.n != self.n {
            return Err(dim_mismatch("tensor sides differ"));
        }
        Ok(Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + s * b).collect() })
    }

    pub fn scale(&self, s: T) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&x| x * s).collect() }
    }

    /// Largest difference between entries related by an index permutation.
    pub fn asymmetry(&self) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let x = self.get(a, b, c);
                    for y in [self.get(a, c, b), self.get(b, a, c), self.get(b, c, a), self.get(c, a, b), self.get(c, b, a)] {
                        worst = worst.max((x - y).abs());
                    }
                }
            }
        }
        worst
    }
}

/// `N × d` matrix whose column `i` is component `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentMatrix<T>(Matrix<T>);

impl<T: Real> ComponentMatrix<T> {
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if m.rows() == 0 || m.cols() == 0 || m.cols() > m.rows() {
            return Err(dim_mismatch(format!("component matrix must be N x d with 1 <= d <= N, got {}x{}", m.rows(), m.cols())));
        }
        if !m.is_finite() {
            return Err(Error::InvalidInput("component matrix has non-finite entries".into()));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn d(&self) -> usize {
        self.0.cols()
    }

    /// `wᵀZ`, one entry per component.
    pub fn weighted_column_sums(&self, w: &[T]) -> Vec<T> {
        (0..self.d()).map(|i| self.0.column(i).iter().zip(w).map(|(&a, &b)| a * b).sum()).collect()
    }
}

/// Column-orthonormal `N × d` pair used to reduce tensor slices.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionPair<T> {
    pub left: Matrix<T>,
    pub right: Matrix<T>,
}

impl<T: Real> ReductionPair<T> {
    pub fn new(left: Matrix<T>, right: Matrix<T>) -> Result<Self> {
        if left.rows() != right.rows() || left.cols() != right.cols() {
            return Err(dim_mismatch("reduction factors differ in shape"));
        }
        if orthogonality_error(&left) > T::tol(1e-10) || orthogonality_error(&right) > T::tol(1e-10) {
            return Err(Error::InvalidInput("reduction factors are not column-orthonormal".into()));
        }
        Ok(Self { left, right })
    }

    /// `leftᵀ · m · right`.
    pub fn reduce(&self, m: &Matrix<T>) -> Matrix<T> {
        self.left.tr_matmul(&m.matmul(&self.right))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_convention() {
        let t = Tensor3::<f64>::new(2, (0..8).map(f64::from).collect()).unwrap();
        assert_eq!(t.get(1, 0, 1), 5.0);
        assert_eq!(t.get(0, 1, 1), 3.0);
        assert!(Tensor3::<f64>::new(2, vec![0.0; 7]).is_err());
    }

    #[test]
    fn cp_tensor_is_symmetric() {
        let z = ComponentMatrix::new(Matrix::<f64>::from_rows(&[[1.0, 0.5], [-0.3, 2.0], [0.7, 0.1]])).unwrap();
        let t = Tensor3::symmetric_cp(&z);
        assert!(t.asymmetry() < 1e-15);
        assert!((t.get(0, 1, 2) - (1.0 * -0.3 * 0.7 + 0.5 * 2.0 * 0.1)).abs() < 1e-15);
    }
}
