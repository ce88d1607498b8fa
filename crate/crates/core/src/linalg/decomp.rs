//! Householder QR (plain and column-pivoted), LU with partial pivoting,
//! one-sided Jacobi SVD and the cyclic Jacobi symmetric eigensolver.

use super::matrix::norm2;
use super::Matrix;
use crate::error::{dim_mismatch, Error, Result};
use crate::scalar::Real;

/// Builds a Householder vector `v` (with `v[0] = 1`) and `tau` such that
/// `(I − tau v vᵀ) x = beta e₁`.
fn householder<T: Real>(x: &[T]) -> (Vec<T>, T, T) {
    let n = x.len();
    let mut v = x.to_vec();
    let alpha = x[0];
    let sigma: T = x[1..].iter().map(|&t| t * t).sum();
    if sigma == T::zero() {
        v[0] = T::one();
        for t in v.iter_mut().skip(1) {
            *t = T::zero();
        }
        return (v, T::zero(), alpha);
    }
    let norm = (alpha * alpha + sigma).sqrt();
    let beta = if alpha <= T::zero() { norm } else { -norm };
    let v0 = alpha - beta;
    for t in v.iter_mut().take(n).skip(1) {
        *t /= v0;
    }
    v[0] = T::one();
    let tau = (beta - alpha) / beta;
    (v, tau, beta)
}

/// Applies `I − tau v vᵀ` from the left to rows `k..` of columns `cols` of `a`.
fn apply_left<T: Real>(a: &mut Matrix<T>, v: &[T], tau: T, k: usize, cols: std::ops::Range<usize>) {
    if tau == T::zero() {
        return;
    }
    for j in cols {
        let col = a.column_mut(j);
        let mut s = T::zero();
        for (i, &vi) in v.iter().enumerate() {
            s += vi * col[k + i];
        }
        s *= tau;
        for (i, &vi) in v.iter().enumerate() {
            col[k + i] -= s * vi;
        }
    }
}

/// Thin Householder QR of an `m × n` matrix with `m ≥ n`: returns `Q` (`m × n`,
/// orthonormal columns) and upper triangular `R` (`n × n`), with the diagonal
/// of `R` normalized to be nonnegative.
pub fn qr<T: Real>(a: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let (m, n) = (a.rows(), a.cols());
    assert!(m >= n, "qr requires rows >= cols");
    let mut work = a.clone();
    let mut reflectors = Vec::with_capacity(n);
    for k in 0..n {
        let x: Vec<T> = work.column(k)[k..].to_vec();
        let (v, tau, _) = householder(&x);
        apply_left(&mut work, &v, tau, k, k..n);
        reflectors.push((v, tau));
    }
    let mut r = Matrix::from_fn(n, n, |i, j| if i <= j { work[(i, j)] } else { T::zero() });
    let mut q = Matrix::from_fn(m, n, |i, j| if i == j { T::one() } else { T::zero() });
    for k in (0..n).rev() {
        let (v, tau) = &reflectors[k];
        apply_left(&mut q, v, *tau, k, 0..n);
    }
    for i in 0..n {
        if r[(i, i)] < T::zero() {
            for j in 0..n {
                r[(i, j)] = -r[(i, j)];
            }
            for x in q.column_mut(i) {
                *x = -*x;
            }
        }
    }
    (q, r)
}

/// Householder QR with column pivoting, used for least-squares and square
/// solves without forming inverses.
#[derive(Debug, Clone)]
pub struct PivotedQr<T> {
    factors: Matrix<T>,
    reflectors: Vec<(Vec<T>, T)>,
    perm: Vec<usize>,
}

impl<T: Real> PivotedQr<T> {
    pub fn new(a: &Matrix<T>) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let steps = m.min(n);
        let mut work = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::with_capacity(steps);
        for k in 0..steps {
            // pivot: remaining column of largest norm
            let mut best = k;
            let mut best_norm = T::neg_infinity();
            for j in k..n {
                let s: T = work.column(j)[k..].iter().map(|&x| x * x).sum();
                if s > best_norm {
                    best_norm = s;
                    best = j;
                }
            }
            if best != k {
                let (ck, cb) = (work.column(k).to_vec(), work.column(best).to_vec());
                work.set_column(k, &cb);
                work.set_column(best, &ck);
                perm.swap(k, best);
            }
            let x: Vec<T> = work.column(k)[k..].to_vec();
            let (v, tau, _) = householder(&x);
            apply_left(&mut work, &v, tau, k, k..n);
            reflectors.push((v, tau));
        }
        Self { factors: work, reflectors, perm }
    }

    /// Diagonal of `R` in pivot order (nonincreasing in magnitude).
    pub fn r_diagonal(&self) -> Vec<T> {
        (0..self.reflectors.len()).map(|i| self.factors[(i, i)]).collect()
    }

    /// `|r_min| / |r_max|`, a cheap rank indicator.
    pub fn rcond_estimate(&self) -> T {
        let d = self.r_diagonal();
        match (d.first(), d.last()) {
            (Some(&a), Some(&b)) if a != T::zero() => b.abs() / a.abs(),
            _ => T::zero(),
        }
    }

    /// Least-squares solution of `A X = B` (exact when `A` is square and
    /// nonsingular). Fails with `SingularOperator` when `R` has a pivot below
    /// `tol · |r₁₁|`.
    pub fn solve(&self, b: &Matrix<T>, tol: T) -> Result<Matrix<T>> {
        let (m, n) = (self.factors.rows(), self.factors.cols());
        if b.rows() != m {
            return Err(dim_mismatch(format!("solve: rhs has {} rows, expected {m}", b.rows())));
        }
        if m < n {
            return Err(dim_mismatch("solve: underdetermined system".to_string()));
        }
        let rc = self.rcond_estimate();
        if !(rc > tol) {
            return Err(Error::SingularOperator { sigma_min: rc.to_f64_lossy() });
        }
        let mut qtb = b.clone();
        for (k, (v, tau)) in self.reflectors.iter().enumerate() {
            apply_left(&mut qtb, v, *tau, k, 0..b.cols());
        }
        let mut x = Matrix::zeros(n, b.cols());
        for c in 0..b.cols() {
            let mut y = vec![T::zero(); n];
            for i in (0..n).rev() {
                let mut s = qtb[(i, c)];
                for j in (i + 1)..n {
                    s -= self.factors[(i, j)] * y[j];
                }
                y[i] = s / self.factors[(i, i)];
            }
            for (k, &p) in self.perm.iter().enumerate() {
                x[(p, c)] = y[k];
            }
        }
        Ok(x)
    }
}

/// Solves `A X = B` for square `A` via column-pivoted QR and verifies the
/// relative residual `‖AX − B‖ ≤ residual_tol · ‖A‖‖X‖` (plus `‖B‖`).
pub fn solve_checked<T: Real>(a: &Matrix<T>, b: &Matrix<T>, residual_tol: T) -> Result<Matrix<T>> {
    if !a.is_square() {
        return Err(dim_mismatch("solve_checked requires a square matrix"));
    }
    let x = PivotedQr::new(a).solve(b, T::epsilon() * T::c(a.rows().max(1) as f64))?;
    let res = (&a.matmul(&x) - b).frobenius_norm();
    let scale = a.frobenius_norm() * x.frobenius_norm() + b.frobenius_norm();
    if !(res <= residual_tol * scale) {
        return Err(Error::SingularOperator { sigma_min: (res / scale).to_f64_lossy() });
    }
    Ok(x)
}

/// LU factorization with partial pivoting. Tiny pivots are replaced by a
/// floor so that the factorization stays usable for inverse iteration.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Matrix<T>,
    piv: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn new_regularized(a: &Matrix<T>, pivot_floor: T) -> Self {
        let n = a.rows();
        let mut lu = a.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            for i in (k + 1)..n {
                if lu[(i, k)].abs() > lu[(p, k)].abs() {
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                piv.swap(k, p);
            }
            if lu[(k, k)].abs() < pivot_floor {
                lu[(k, k)] = if lu[(k, k)] < T::zero() { -pivot_floor } else { pivot_floor };
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                for j in (k + 1)..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Self { lu, piv }
    }

    pub fn solve_vec(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.rows();
        let mut y: Vec<T> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                y[i] = y[i] - l * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let u = self.lu[(i, j)];
                y[i] = y[i] - u * y[j];
            }
            y[i] /= self.lu[(i, i)];
        }
        y
    }

    pub fn determinant(&self) -> T {
        let n = self.lu.rows();
        let mut det = T::one();
        for i in 0..n {
            det *= self.lu[(i, i)];
        }
        // sign of the row permutation
        let mut seen = vec![false; n];
        let mut sign = T::one();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.piv[i];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        det * sign
    }
}

/// Determinant via LU with partial pivoting.
pub fn determinant<T: Real>(a: &Matrix<T>) -> T {
    assert!(a.is_square());
    Lu::new_regularized(a, T::zero()).determinant()
}

/// Singular value decomposition `A = U diag(s) Vᵀ` with singular values in
/// nonincreasing order. `U` is `m × k`, `V` is `n × k`, `k = min(m, n)`.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: Matrix<T>,
    pub s: Vec<T>,
    pub v: Matrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn sigma_max(&self) -> T {
        self.s.first().copied().unwrap_or_else(T::zero)
    }

    pub fn sigma_min(&self) -> T {
        self.s.last().copied().unwrap_or_else(T::zero)
    }
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd<T: Real>(a: &Matrix<T>) -> Svd<T> {
    if a.rows() < a.cols() {
        let t = svd(&a.transpose());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    let (m, n) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut v = Matrix::<T>::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..m {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::c(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = c * x - s * y;
                    w[(i, q)] = s * x + c * y;
                }
                for i in 0..n {
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * x - s * y;
                    v[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<T> = (0..n).map(|j| norm2(w.column(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));
    let mut u = Matrix::zeros(m, n);
    let mut vs = Matrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let sj = norms[j];
        s.push(sj);
        if sj > T::zero() {
            let col: Vec<T> = w.column(j).iter().map(|&x| x / sj).collect();
            u.set_column(k, &col);
        }
        vs.set_column(k, v.column(j));
    }
    Svd { u, s, v: vs }
}

/// Singular values only, nonincreasing.
pub fn singular_values<T: Real>(a: &Matrix<T>) -> Vec<T> {
    svd(a).s
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues ascending; eigenvectors are the columns of the returned matrix.
pub fn symmetric_eigen<T: Real>(a: &Matrix<T>) -> (Vec<T>, Matrix<T>) {
    assert!(a.is_square());
    let n = a.rows();
    let mut m = a.symmetrize();
    let mut v = Matrix::<T>::identity(n);
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|j| (0..n).filter(move |&i| i != j).map(move |i| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off <= T::epsilon() * T::epsilon() * m.frobenius_norm_sq() || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::c(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (T::one() + theta * theta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (x, y) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * x - s * y;
                    m[(k, q)] = s * x + c * y;
                }
                for k in 0..n {
                    let (x, y) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * x - s * y;
                    m[(q, k)] = s * x + c * y;
                }
                for k in 0..n {
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * x - s * y;
                    v[(k, q)] = s * x + c * y;
                }
            }
        }
    }
    let vals = m.diagonal();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap_or(std::cmp::Ordering::Equal));
    let sorted: Vec<T> = order.iter().map(|&i| vals[i]).collect();
    (sorted, v.select_columns(&order))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Matrix<f64> {
        Matrix::from_rows(&[
            [4.0, -2.0, 1.0, 0.5],
            [3.0, 6.0, -4.0, 2.0],
            [2.0, 1.0, 8.0, -1.0],
            [-1.0, 0.3, 2.0, 5.0],
        ])
    }

    #[test]
    fn qr_reconstructs_with_positive_diagonal() {
        let a = sample();
        let (q, r) = qr(&a);
        assert!((&q.matmul(&r) - &a).max_abs() < 1e-13);
        assert!((&q.tr_matmul(&q) - &Matrix::identity(4)).max_abs() < 1e-14);
        assert!(r.diagonal().iter().all(|&x| x >= 0.0));
        for j in 0..4 {
            for i in (j + 1)..4 {
                assert_eq!(r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn pivoted_solve_and_singular_detection() {
        let a = sample();
        let b = Matrix::from_fn(4, 2, |i, j| (i + 2 * j) as f64 - 1.5);
        let x = solve_checked(&a, &b, 1e-12).unwrap();
        assert!((&a.matmul(&x) - &b).max_abs() < 1e-12);

        let sing = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        assert!(matches!(
            solve_checked(&sing, &Matrix::identity(2), 1e-10),
            Err(Error::SingularOperator { .. })
        ));
    }

    #[test]
    fn svd_of_diagonal_and_reconstruction() {
        let d = Matrix::<f64>::diag(&[1.0, -3.0]);
        let s = singular_values(&d);
        assert!((s[0] - 3.0).abs() < 1e-15 && (s[1] - 1.0).abs() < 1e-15);

        let a = sample();
        let f = svd(&a);
        let rec = f.u.matmul(&Matrix::diag(&f.s)).matmul(&f.v.transpose());
        assert!((&rec - &a).max_abs() < 1e-12);
        let rect = Matrix::from_fn(5, 3, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0 + 0.1 * j as f64);
        let f = svd(&rect);
        let rec = f.u.matmul(&Matrix::diag(&f.s)).matmul(&f.v.transpose());
        assert!((&rec - &rect).max_abs() < 1e-12);
        let f = svd(&rect.transpose());
        let rec = f.u.matmul(&Matrix::diag(&f.s)).matmul(&f.v.transpose());
        assert!((&rec - &rect.transpose()).max_abs() < 1e-12);
    }

    #[test]
    fn symmetric_eigen_of_swap() {
        let a = Matrix::<f64>::from_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let (vals, vecs) = symmetric_eigen(&a);
        assert!((vals[0] + 1.0).abs() < 1e-15 && (vals[1] - 1.0).abs() < 1e-15);
        let rec = vecs.matmul(&Matrix::diag(&vals)).matmul(&vecs.transpose());
        assert!((&rec - &a).max_abs() < 1e-14);
    }

    #[test]
    fn determinant_sign() {
        let p = Matrix::<f64>::from_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        assert!((determinant(&p) + 1.0).abs() < 1e-15);
        let a = Matrix::<f64>::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        assert!((determinant(&a) + 2.0).abs() < 1e-14);
    }
}
