//! Real nonsymmetric eigenvalue problem: Householder reduction to upper
//! Hessenberg form, Francis double-shift QR for the eigenvalues, inverse
//! iteration for the eigenvectors. Also the ordered real Schur form for
//! matrices with real simple spectrum.

use super::decomp::{qr, singular_values, Lu};
use super::expm::{normalize_column_signs, OrthogonalFrame};
use super::matrix::norm2;
use super::Matrix;
use crate::error::{dim_mismatch, Error, Result};
use crate::scalar::Real;

/// Eigenvalues (ascending) and unit-norm right eigenvectors (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

impl<T: Real> EigenSystem<T> {
    /// Smallest distance between consecutive eigenvalues.
    pub fn min_gap(&self) -> T {
        min_gap(&self.values)
    }
}

pub(crate) fn min_gap<T: Real>(sorted: &[T]) -> T {
    sorted.windows(2).map(|w| w[1] - w[0]).fold(T::infinity(), T::min)
}

/// Reduces `a` to upper Hessenberg form by Householder similarity transforms.
pub fn hessenberg<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<T> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = x[0];
        let norm = norm2(&x);
        if norm == T::zero() {
            continue;
        }
        let beta = if alpha <= T::zero() { norm } else { -norm };
        let mut v = x;
        v[0] = alpha - beta;
        let vnorm_sq: T = v.iter().map(|&t| t * t).sum();
        if vnorm_sq == T::zero() {
            continue;
        }
        let tau = T::c(2.0) / vnorm_sq;
        // H ← (I − τvvᵀ) H
        for j in 0..n {
            let s: T = v.iter().enumerate().map(|(i, &vi)| vi * h[(k + 1 + i, j)]).sum::<T>() * tau;
            for (i, &vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= s * vi;
            }
        }
        // H ← H (I − τvvᵀ)
        for i in 0..n {
            let s: T = v.iter().enumerate().map(|(j, &vj)| vj * h[(i, k + 1 + j)]).sum::<T>() * tau;
            for (j, &vj) in v.iter().enumerate() {
                h[(i, k + 1 + j)] -= s * vj;
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = T::zero();
        }
    }
    h
}

/// All eigenvalues `(re, im)` of a real matrix, via Francis double-shift QR on
/// the Hessenberg form. Order is unspecified.
pub fn eigenvalues<T: Real>(m: &Matrix<T>) -> Result<Vec<(T, T)>> {
    if !m.is_square() {
        return Err(dim_mismatch("eigenvalues of a non-square matrix"));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = hessenberg(m);
    let eps = T::epsilon();
    let mut anorm = T::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    let mut wr = vec![T::zero(); n];
    let mut wi = vec![T::zero(); n];
    let mut nn = n as isize - 1;
    let mut t = T::zero();
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l > 0 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == T::zero() {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() <= eps * s {
                    a[(l, l - 1)] = T::zero();
                    break;
                }
                l -= 1;
            }
            let mut x = a[(nu, nu)];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = T::zero();
                nn -= 1;
                break;
            }
            let mut y = a[(nu - 1, nu - 1)];
            let mut w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l == nu - 1 {
                let p = T::c(0.5) * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= T::zero() {
                    z = p + if p >= T::zero() { z } else { -z };
                    wr[nu - 1] = x + z;
                    wr[nu] = x + z;
                    if z != T::zero() {
                        wr[nu] = x - w / z;
                    }
                    wi[nu - 1] = T::zero();
                    wi[nu] = T::zero();
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = z;
                    wi[nu] = -z;
                }
                nn -= 2;
                break;
            }
            if its >= 60 {
                return Err(Error::InvalidInput("QR iteration failed to converge".into()));
            }
            if its == 10 || its == 20 || its == 40 {
                // exceptional shift
                t += x;
                for i in 0..=nu {
                    a[(i, i)] -= x;
                }
                let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = T::c(0.75) * s;
                y = x;
                w = T::c(-0.4375) * s * s;
            }
            its += 1;
            let mut mm = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[(mm, mm)];
                let r0 = x - z;
                let s0 = y - z;
                p = (r0 * s0 - w) / a[(mm + 1, mm)] + a[(mm, mm + 1)];
                q = a[(mm + 1, mm + 1)] - z - r0 - s0;
                r = a[(mm + 2, mm + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if mm == l {
                    break;
                }
                let u = a[(mm, mm - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(mm - 1, mm - 1)].abs() + z.abs() + a[(mm + 1, mm + 1)].abs());
                if u <= eps * v {
                    break;
                }
                mm -= 1;
            }
            for i in mm..nu - 1 {
                a[(i + 2, i)] = T::zero();
                if i != mm {
                    a[(i + 2, i - 1)] = T::zero();
                }
            }
            let mut k = mm;
            while k < nu {
                if k != mm {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = T::zero();
                    if k + 1 != nu {
                        r = a[(k + 2, k - 1)];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != T::zero() {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let norm = (p * p + q * q + r * r).sqrt();
                let s = if p >= T::zero() { norm } else { -norm };
                if s != T::zero() {
                    if k == mm {
                        if l != mm {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                        if k + 1 != nu {
                            pp += r * a[(k + 2, j)];
                            a[(k + 2, j)] -= pp * z;
                        }
                        a[(k + 1, j)] -= pp * y;
                        a[(k, j)] -= pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * a[(i, k)] + y * a[(i, k + 1)];
                        if k + 1 != nu {
                            pp += z * a[(i, k + 2)];
                            a[(i, k + 2)] -= pp * r;
                        }
                        a[(i, k + 1)] -= pp * q;
                        a[(i, k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).collect())
}

/// Eigenvalues of `m` if all are real (imaginary parts at most
/// `1e−10·‖M‖`), sorted ascending.
pub fn real_eigenvalues<T: Real>(m: &Matrix<T>) -> Result<Vec<T>> {
    let scale = m.frobenius_norm();
    let ev = eigenvalues(m)?;
    let imag = ev.iter().fold(T::zero(), |a, &(_, im)| a.max(im.abs()));
    if imag > T::tol(1e-10) * scale {
        return Err(Error::ComplexEigenvalues { imag: imag.to_f64_lossy() });
    }
    let mut vals: Vec<T> = ev.into_iter().map(|(re, _)| re).collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(vals)
}

/// Unit right eigenvector for the (real, simple) eigenvalue `lambda`.
fn inverse_iteration<T: Real>(m: &Matrix<T>, lambda: T) -> Vec<T> {
    let n = m.rows();
    let scale = m.frobenius_norm().max(T::min_positive_value());
    let shifted = Matrix::from_fn(n, n, |i, j| if i == j { m[(i, j)] - lambda } else { m[(i, j)] });
    let lu = Lu::new_regularized(&shifted, T::epsilon() * scale);
    let mut best: Option<(T, Vec<T>)> = None;
    for start in 0..3 {
        let mut x: Vec<T> = (0..n)
            .map(|i| T::one() + T::c(((i * (7 + 3 * start) + start) % 11) as f64) / T::c(13.0))
            .collect();
        for _ in 0..4 {
            x = lu.solve_vec(&x);
            let nx = norm2(&x);
            if !(nx > T::zero()) || !nx.is_finite() {
                break;
            }
            for v in x.iter_mut() {
                *v /= nx;
            }
        }
        let mx = m.matvec(&x);
        let res = norm2(&mx.iter().zip(&x).map(|(&a, &b)| a - lambda * b).collect::<Vec<_>>());
        if res.is_finite() && best.as_ref().is_none_or(|(r, _)| res < *r) {
            best = Some((res, x));
        }
        if res <= T::epsilon() * scale * T::c(16.0) {
            break;
        }
    }
    best.map(|(_, x)| x).unwrap_or_else(|| vec![T::zero(); n])
}

/// Full eigen-decomposition of a matrix with real simple spectrum.
///
/// Fails with `ComplexEigenvalues` or, when two eigenvalues are closer than
/// `1e−10·‖M‖`, with `NearDefective`.
pub fn real_eigen<T: Real>(m: &Matrix<T>) -> Result<EigenSystem<T>> {
    let values = real_eigenvalues(m)?;
    let scale = m.frobenius_norm();
    let gap = min_gap(&values);
    if values.len() > 1 && !(gap > T::tol(1e-10) * scale) {
        return Err(Error::NearDefective { gap: gap.to_f64_lossy() });
    }
    let n = m.rows();
    let mut vectors = Matrix::zeros(n, n);
    for (j, &lambda) in values.iter().enumerate() {
        vectors.set_column(j, &inverse_iteration(m, lambda));
    }
    normalize_column_signs(&mut vectors);
    Ok(EigenSystem { values, vectors })
}

/// Ordered real Schur decomposition `UᵀMU = T` for a matrix with real simple
/// spectrum. `order[k]` is the index (into the ascending eigenvalue list) of
/// the eigenvalue placed at diagonal position `k`.
///
/// Built as the QR factorization of the reordered eigenvector matrix; the
/// orthogonal factor follows the first-nonzero-entry-positive convention.
pub fn ordered_schur<T: Real>(m: &Matrix<T>, order: &[usize]) -> Result<(OrthogonalFrame<T>, Matrix<T>)> {
    let n = m.rows();
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&k| k >= n || std::mem::replace(&mut seen[k], true)) {
        return Err(Error::InvalidInput("order is not a permutation".into()));
    }
    let eig = real_eigen(m)?;
    let v = eig.vectors.select_columns(order);
    let (mut q, _) = qr(&v);
    normalize_column_signs(&mut q);
    let t = m.congruence(&q);
    Ok((OrthogonalFrame::new_unchecked(q), t))
}

/// Ordered Schur decomposition with ascending diagonal.
pub fn schur_ascending<T: Real>(m: &Matrix<T>) -> Result<(OrthogonalFrame<T>, Matrix<T>)> {
    let order: Vec<usize> = (0..m.rows()).collect();
    ordered_schur(m, &order)
}

/// Frobenius norm, spectral norm and 2-norm condition number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixMetrics<T> {
    pub frobenius: T,
    pub spectral: T,
    /// `σ_max / σ_min`; `+∞` when the matrix is numerically singular.
    pub condition: T,
}

pub fn matrix_metrics<T: Real>(a: &Matrix<T>) -> MatrixMetrics<T> {
    let s = singular_values(a);
    let smax = s.first().copied().unwrap_or_else(T::zero);
    let smin = s.last().copied().unwrap_or_else(T::zero);
    let condition = if smin <= smax * T::epsilon() || smin == T::zero() { T::infinity() } else { smax / smin };
    MatrixMetrics { frobenius: a.frobenius_norm(), spectral: smax, condition }
}

/// 2-norm condition number.
pub fn condition_number<T: Real>(a: &Matrix<T>) -> T {
    matrix_metrics(a).condition
}
