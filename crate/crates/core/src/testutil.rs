//! Shared fixtures for unit tests.

use crate::linalg::{qr, skew_exp, Matrix, OrthogonalFrame, SkewDirection};
use crate::random::{normal_vec, stream, Stream};
use crate::triangularizer::MatrixSet;

pub fn rng(seed: u64) -> Stream {
    stream(seed, 0)
}

pub fn gaussian(rng: &mut Stream, r: usize, c: usize) -> Matrix<f64> {
    Matrix::from_col_major(r, c, normal_vec(rng, r * c)).unwrap()
}

pub fn orthogonal(rng: &mut Stream, d: usize) -> OrthogonalFrame<f64> {
    let (q, _) = qr(&gaussian(rng, d, d));
    OrthogonalFrame::new(q).unwrap()
}

pub fn unit_skew(rng: &mut Stream, d: usize) -> SkewDirection<f64> {
    SkewDirection::skew_part(&gaussian(rng, d, d)).normalized()
}

pub fn gaussian_set(rng: &mut Stream, d: usize, n: usize) -> MatrixSet<f64> {
    MatrixSet::new((0..n).map(|_| gaussian(rng, d, d)).collect()).unwrap()
}

/// Noiseless commuting set `V diag(Λₙ) V⁻¹` with `V = I + 0.3 G` and the
/// frame that triangularizes it (ascending order of the first matrix).
pub fn commuting_set(rng: &mut Stream, d: usize, n: usize) -> (MatrixSet<f64>, Matrix<f64>) {
    let v = &Matrix::identity(d) + &gaussian(rng, d, d).scale(0.3);
    let vinv = crate::linalg::solve_checked(&v, &Matrix::identity(d), 1e-10).unwrap();
    let mats = (0..n)
        .map(|k| {
            let lam: Vec<f64> = (0..d).map(|i| i as f64 + 0.37 * (k as f64 + 1.0) * ((i * 7 + k) % 5) as f64).collect();
            v.matmul(&Matrix::diag(&lam)).matmul(&vinv)
        })
        .collect();
    (MatrixSet::new(mats).unwrap(), v)
}

pub fn perturb(u: &OrthogonalFrame<f64>, x: &SkewDirection<f64>, t: f64) -> OrthogonalFrame<f64> {
    OrthogonalFrame::new(u.matrix().matmul(skew_exp(x, t).matrix())).unwrap()
}

/// Random model with `V = I + 0.3G`, Gaussian `Λ` and unit-norm noise.
pub fn random_model(rng: &mut Stream, d: usize, n: usize, sigma: f64) -> crate::bounds::GroundTruthModel<f64> {
    let v = &Matrix::identity(d) + &gaussian(rng, d, d).scale(0.3);
    let lambda = gaussian(rng, n, d);
    let noise = (0..n)
        .map(|_| {
            let w = gaussian(rng, d, d);
            let s = 1.0 / w.frobenius_norm();
            w.scale(s)
        })
        .collect();
    crate::bounds::GroundTruthModel::new(v, lambda, noise, sigma).unwrap()
}
