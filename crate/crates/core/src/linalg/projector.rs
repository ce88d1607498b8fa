//! Strictly triangular parts and the selector onto vectorized strictly lower
//! triangular matrices.

use super::Matrix;
use crate::scalar::Real;

/// Strictly lower triangular part: entries with `i > j` kept, others zeroed.
pub fn low_part<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    Matrix::from_fn(a.rows(), a.cols(), |i, j| if i > j { a[(i, j)] } else { T::zero() })
}

/// Strictly upper triangular part: entries with `i < j` kept, others zeroed.
pub fn up_part<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    Matrix::from_fn(a.rows(), a.cols(), |i, j| if i < j { a[(i, j)] } else { T::zero() })
}

/// Diagonal part.
pub fn diag_part<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    Matrix::from_fn(a.rows(), a.cols(), |i, j| if i == j { a[(i, j)] } else { T::zero() })
}

/// Squared Frobenius norm of the strictly lower part.
pub fn low_norm_sq<T: Real>(a: &Matrix<T>) -> T {
    let mut s = T::zero();
    for j in 0..a.cols() {
        for i in (j + 1)..a.rows() {
            s += a[(i, j)] * a[(i, j)];
        }
    }
    s
}

/// Strictly lower positions `(i, j)`, `i > j`, in column-major order.
pub fn lower_positions(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|j| ((j + 1)..d).map(move |i| (i, j))).collect()
}

/// The selector `P_low` together with the diagonal masks `Low` and `Up`.
///
/// Rows of `p_low` enumerate strictly lower positions in column-major order,
/// so `P_low vec(A)` lists the subdiagonal entries of `A` column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct LowProjector<T> {
    pub d: usize,
    pub p_low: Matrix<T>,
    pub low_mask: Matrix<T>,
    pub up_mask: Matrix<T>,
    positions: Vec<(usize, usize)>,
}

impl<T: Real> LowProjector<T> {
    pub fn new(d: usize) -> Self {
        let positions = lower_positions(d);
        let mut p_low = Matrix::zeros(positions.len(), d * d);
        for (r, &(i, j)) in positions.iter().enumerate() {
            p_low[(r, i + j * d)] = T::one();
        }
        let low_mask = Matrix::from_fn(d * d, d * d, |a, b| {
            if a == b && a % d > a / d {
                T::one()
            } else {
                T::zero()
            }
        });
        let up_mask = Matrix::from_fn(d * d, d * d, |a, b| {
            if a == b && a % d < a / d {
                T::one()
            } else {
                T::zero()
            }
        });
        Self { d, p_low, low_mask, up_mask, positions }
    }

    /// Number of strictly lower positions, `d(d−1)/2`.
    pub fn dim(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[(usize, usize)] {
        &self.positions
    }

    /// `P_low vec(A)`.
    pub fn project(&self, a: &Matrix<T>) -> Vec<T> {
        self.positions.iter().map(|&(i, j)| a[(i, j)]).collect()
    }

    /// `mat(P_lowᵀ x)`: embeds coordinates as a strictly lower triangular matrix.
    pub fn embed(&self, x: &[T]) -> Matrix<T> {
        assert_eq!(x.len(), self.dim(), "embed length mismatch");
        let mut m = Matrix::zeros(self.d, self.d);
        for (&(i, j), &v) in self.positions.iter().zip(x) {
            m[(i, j)] = v;
        }
        m
    }

    /// Restriction `P_low · K · P_lowᵀ` of an operator on `vec` space.
    pub fn compress(&self, k: &Matrix<T>) -> Matrix<T> {
        let d = self.d;
        let n = self.dim();
        Matrix::from_fn(n, n, |r, c| {
            let (i, j) = self.positions[r];
            let (p, q) = self.positions[c];
            k[(i + j * d, p + q * d)]
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_part_of_two_by_two() {
        let a = Matrix::<f64>::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(low_part(&a), Matrix::from_rows(&[[0.0, 0.0], [3.0, 0.0]]));
        assert_eq!(up_part(&a), Matrix::from_rows(&[[0.0, 2.0], [0.0, 0.0]]));
    }

    #[test]
    fn identity_has_no_off_diagonal_parts() {
        for d in 1..6 {
            let id = Matrix::<f64>::identity(d);
            assert_eq!(low_part(&id).max_abs(), 0.0);
            assert_eq!(up_part(&id).max_abs(), 0.0);
        }
    }

    #[test]
    fn parts_partition_entries() {
        let a = Matrix::<f64>::from_rows(&[[0.3, -1.2, 2.0], [4.5, 0.1, -0.7], [1.9, 2.2, -3.3]]);
        let sum = &(&low_part(&a) + &up_part(&a)) + &diag_part(&a);
        assert_eq!(sum, a);
    }

    #[test]
    fn selector_d4_matches_reference_display() {
        // 6 x 16 selector, ones at column-major indices 1,2,3,6,7,11.
        let p = LowProjector::<f64>::new(4);
        let expected_cols = [1usize, 2, 3, 6, 7, 11];
        assert_eq!(p.p_low.rows(), 6);
        assert_eq!(p.p_low.cols(), 16);
        for r in 0..6 {
            for c in 0..16 {
                let want = if c == expected_cols[r] { 1.0 } else { 0.0 };
                assert_eq!(p.p_low[(r, c)], want, "row {r} col {c}");
            }
        }
        let low_diag: Vec<f64> = (0..16).map(|k| p.low_mask[(k, k)]).collect();
        assert_eq!(
            low_diag,
            vec![0., 1., 1., 1., 0., 0., 1., 1., 0., 0., 0., 1., 0., 0., 0., 0.]
        );
    }

    #[test]
    fn selector_d2_and_d1() {
        let p = LowProjector::<f64>::new(2);
        assert_eq!(p.p_low, Matrix::from_rows(&[[0.0, 1.0, 0.0, 0.0]]));
        let p1 = LowProjector::<f64>::new(1);
        assert_eq!(p1.dim(), 0);
        assert_eq!(p1.p_low.rows(), 0);
        assert_eq!(p1.low_mask.max_abs(), 0.0);
    }

    #[test]
    fn selector_identities() {
        for d in 1..6 {
            let p = LowProjector::<f64>::new(d);
            let ppt = p.p_low.matmul(&p.p_low.transpose());
            assert_eq!(ppt, Matrix::identity(p.dim()));
            let ptp = p.p_low.transpose().matmul(&p.p_low);
            assert_eq!(ptp, p.low_mask);
            let diag_mask = Matrix::from_fn(d * d, d * d, |a, b| {
                if a == b && a % d == a / d {
                    1.0
                } else {
                    0.0
                }
            });
            assert_eq!(&(&p.low_mask + &p.up_mask) + &diag_mask, Matrix::identity(d * d));
        }
    }
}
