//! Seeded synthetic ground truth: joint-eigenstructure models and
//! symmetric CP tensors.

use crate::bounds::{joint_gap, GroundTruthModel};
use crate::error::{Error, Result};
use crate::linalg::{qr, Matrix};
use crate::random::{self, Stream};
use crate::tensor::{ComponentMatrix, Tensor3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseStyle {
    Dense,
    /// Roughly 30% of entries nonzero (at least one).
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub d: usize,
    pub n: usize,
    pub kappa_target: f64,
    pub gamma_target: f64,
    pub noise_style: NoiseStyle,
    pub seed: u64,
    pub sigma: f64,
}

impl GeneratorSpec {
    pub fn new(d: usize, n: usize, kappa_target: f64, gamma_target: f64, seed: u64) -> Self {
        Self { d, n, kappa_target, gamma_target, noise_style: NoiseStyle::Dense, seed, sigma: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.n == 0 {
            return Err(Error::InvalidInput("d and N must be positive".into()));
        }
        if !(self.kappa_target >= 1.0) || !self.kappa_target.is_finite() {
            return Err(Error::InvalidInput("kappa must be at least 1".into()));
        }
        if !(self.gamma_target > 0.0) || !self.gamma_target.is_finite() {
            return Err(Error::InvalidInput("gamma must be positive".into()));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidInput("sigma must be nonnegative".into()));
        }
        Ok(())
    }
}

fn gaussian(rng: &mut Stream, r: usize, c: usize) -> Matrix<f64> {
    Matrix::from_col_major(r, c, random::normal_vec(rng, r * c)).expect("shape")
}

/// Orthonormal `r × c` factor (`r ≥ c`) from a Gaussian draw.
fn stiefel(rng: &mut Stream, r: usize, c: usize) -> Matrix<f64> {
    qr(&gaussian(rng, r, c)).0
}

/// Singular values `κ^{i/(d−1)}`, geometric from 1 to `κ`.
fn profile(d: usize, kappa: f64) -> Vec<f64> {
    if d == 1 {
        return vec![1.0];
    }
    (0..d).rev().map(|i| kappa.powf(i as f64 / (d - 1) as f64)).collect()
}

/// Noise matrix with unit Frobenius norm.
pub fn noise_matrix(rng: &mut Stream, d: usize, style: NoiseStyle) -> Matrix<f64> {
    loop {
        let mut w = gaussian(rng, d, d);
        if style == NoiseStyle::Sparse {
            let keep: Vec<bool> = (0..d * d).map(|_| random::uniform(rng) < 0.3).collect();
            for (x, k) in w.as_mut_slice().iter_mut().zip(keep) {
                if !k {
                    *x = 0.0;
                }
            }
        }
        let norm = w.frobenius_norm();
        if norm > 1e-8 {
            return w.scale(1.0 / norm);
        }
    }
}

/// Noise directions for trial `trial` (stream `trial + 1` of `seed`).
pub fn trial_noise(d: usize, n: usize, style: NoiseStyle, seed: u64, trial: u64) -> Vec<Matrix<f64>> {
    let mut rng = random::stream(seed, trial + 1);
    (0..n).map(|_| noise_matrix(&mut rng, d, style)).collect()
}

/// `V = Q₁ diag(s) Q₂` with `s` geometric on `[1, κ]`; `Λ` uniform on
/// `[−1, 1]` rescaled so that `γ = gamma_target`; unit-norm `Wₙ`.
pub fn gen_ground_truth(spec: &GeneratorSpec) -> Result<GroundTruthModel<f64>> {
    spec.validate()?;
    let (d, n) = (spec.d, spec.n);
    let mut rng = random::stream(spec.seed, 0);
    let q1 = stiefel(&mut rng, d, d);
    let q2 = stiefel(&mut rng, d, d);
    let v = q1.matmul(&Matrix::diag(&profile(d, spec.kappa_target))).matmul(&q2);
    let lambda = loop {
        let raw = Matrix::from_fn(n, d, |_, _| random::uniform_in(&mut rng, -1.0, 1.0));
        if d == 1 {
            break raw;
        }
        let g = joint_gap(&raw);
        if g > 1e-6 {
            break raw.scale((spec.gamma_target / g).sqrt());
        }
    };
    let noise = (0..n).map(|_| noise_matrix(&mut rng, d, spec.noise_style)).collect();
    GroundTruthModel::new(v, lambda, noise, spec.sigma)
}

/// `N × d` components with condition number `kappa` and column sums
/// bounded away from zero (`min|1ᵀZ| ≥ 0.3·max‖zᵢ‖`).
pub fn gen_components(n: usize, d: usize, kappa: f64, seed: u64) -> Result<ComponentMatrix<f64>> {
    if d == 0 || d > n || !(kappa >= 1.0) {
        return Err(Error::InvalidInput("need 1 <= d <= N and kappa >= 1".into()));
    }
    let mut rng = random::stream(seed, 0);
    for _ in 0..1000 {
        let q1 = stiefel(&mut rng, n, d);
        let q2 = stiefel(&mut rng, d, d);
        let z = q1.matmul(&Matrix::diag(&profile(d, kappa))).matmul(&q2.transpose());
        let sums: Vec<f64> = (0..d).map(|i| z.column(i).iter().sum()).collect();
        let col_max = (0..d).map(|i| crate::linalg::norm2(z.column(i))).fold(0.0, f64::max);
        if sums.iter().all(|s| s.abs() >= 0.3 * col_max) {
            return ComponentMatrix::new(z);
        }
    }
    Err(Error::InvalidInput("could not draw components with separated column sums".into()))
}

/// Gaussian tensor of norm `eps` from stream `stream` of `seed`.
pub fn noise_tensor(n: usize, eps: f64, seed: u64, stream: u64) -> Tensor3<f64> {
    let mut rng = random::stream(seed, stream);
    let e = Tensor3::new(n, random::normal_vec(&mut rng, n * n * n)).expect("shape");
    let norm = e.norm();
    e.scale(if norm > 0.0 { eps / norm } else { 0.0 })
}

/// `Σᵢ zᵢ⊗zᵢ⊗zᵢ + σ𝔼` with `‖𝔼‖ = eps`.
pub fn gen_tensor(z: &ComponentMatrix<f64>, sigma: f64, eps: f64, seed: u64) -> Result<Tensor3<f64>> {
    let ground = Tensor3::symmetric_cp(z);
    ground.add_scaled(&noise_tensor(z.n(), eps, seed, 1), sigma)
}
