use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{condition_number, qr, solve_checked, Matrix, OrthogonalFrame};
use crate::scalar::Real;
use crate::triangularizer::MatrixSet;

/// The generative model `M̂ₙ = V diag(Λₙ) V⁻¹ + σWₙ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthModel<T> {
    v: Matrix<T>,
    v_inv: Matrix<T>,
    /// `N × d`; row `n` holds the eigenvalues of `Mₙ`.
    lambda: Matrix<T>,
    noise: Vec<Matrix<T>>,
    sigma: T,
    clean: Vec<Matrix<T>>,
}

impl<T: Real> GroundTruthModel<T> {
    /// Validates invertibility of `V`, `‖Wₙ‖_F ≤ 1 + 1e−12`, `σ ≥ 0` and
    /// pairwise commutation of the reconstructed `Mₙ`.
    pub fn new(v: Matrix<T>, lambda: Matrix<T>, noise: Vec<Matrix<T>>, sigma: T) -> Result<Self> {
        let d = v.rows();
        let n = lambda.rows();
        if !v.is_square() || d == 0 {
            return Err(dim_mismatch("V must be a nonempty square matrix"));
        }
        if lambda.cols() != d || n == 0 {
            return Err(dim_mismatch(format!("lambda must be N x {d} with N >= 1")));
        }
        if noise.len() != n || noise.iter().any(|w| w.rows() != d || w.cols() != d) {
            return Err(dim_mismatch(format!("expected {n} noise matrices of size {d}x{d}")));
        }
        if !(sigma >= T::zero()) || !sigma.is_finite() {
            return Err(Error::InvalidInput("sigma must be finite and nonnegative".into()));
        }
        if !v.is_finite() || !lambda.is_finite() || noise.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidInput("model has non-finite entries".into()));
        }
        for (k, w) in noise.iter().enumerate() {
            if w.frobenius_norm() > T::one() + T::tol(1e-12) {
                return Err(Error::InvalidInput(format!("noise matrix {k} has norm above 1")));
            }
        }
        if !condition_number(&v).is_finite() {
            return Err(Error::SingularOperator { sigma_min: 0.0 });
        }
        let v_inv = solve_checked(&v, &Matrix::identity(d), T::tol(1e-10))?;
        let clean: Vec<Matrix<T>> = (0..n)
            .map(|k| {
                let row: Vec<T> = (0..d).map(|i| lambda[(k, i)]).collect();
                v.matmul(&Matrix::diag(&row)).matmul(&v_inv)
            })
            .collect();
        for a in 0..n {
            for b in (a + 1)..n {
                let c = clean[a].commutator(&clean[b]).frobenius_norm();
                let scale = clean[a].frobenius_norm() * clean[b].frobenius_norm();
                if c > T::tol(1e-10) * scale {
                    return Err(Error::InvalidInput(format!("M{a} and M{b} do not commute")));
                }
            }
        }
        Ok(Self { v, v_inv, lambda, noise, sigma, clean })
    }

    pub fn d(&self) -> usize {
        self.v.rows()
    }

    pub fn n(&self) -> usize {
        self.lambda.rows()
    }

    pub fn v(&self) -> &Matrix<T> {
        &self.v
    }

    pub fn v_inv(&self) -> &Matrix<T> {
        &self.v_inv
    }

    pub fn lambda(&self) -> &Matrix<T> {
        &self.lambda
    }

    pub fn noise(&self) -> &[Matrix<T>] {
        &self.noise
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// Same model with a different noise level.
    pub fn with_sigma(&self, sigma: T) -> Result<Self> {
        if !(sigma >= T::zero()) || !sigma.is_finite() {
            return Err(Error::InvalidInput("sigma must be finite and nonnegative".into()));
        }
        Ok(Self { sigma, ..self.clone() })
    }

    /// Same model with different noise directions.
    pub fn with_noise(&self, noise: Vec<Matrix<T>>) -> Result<Self> {
        Self::new(self.v.clone(), self.lambda.clone(), noise, self.sigma)
    }

    /// Noiseless `Mₙ`.
    pub fn clean_matrices(&self) -> &[Matrix<T>] {
        &self.clean
    }

    pub fn clean_set(&self) -> MatrixSet<T> {
        MatrixSet::new(self.clean.clone()).expect("validated model")
    }

    /// Observed `M̂ₙ = Mₙ + σWₙ`.
    pub fn observed_set(&self) -> MatrixSet<T> {
        let mats = self.clean.iter().zip(&self.noise).map(|(m, w)| m + &w.scale(self.sigma)).collect();
        MatrixSet::new(mats).expect("validated model")
    }

    pub fn kappa(&self) -> T {
        condition_number(&self.v)
    }

    /// `min_{i<i'} Σₙ (Λₙᵢ − Λₙᵢ')²`; `+∞` when `d = 1`.
    pub fn gamma(&self) -> T {
        joint_gap(&self.lambda)
    }

    /// `Σₙ ‖Mₙ‖_F²`.
    pub fn clean_sq_sum(&self) -> T {
        self.clean.iter().map(|m| m.frobenius_norm_sq()).sum()
    }

    /// `Σₙ ‖Wₙ‖_F²`.
    pub fn noise_sq_sum(&self) -> T {
        self.noise.iter().map(|w| w.frobenius_norm_sq()).sum()
    }

    /// Exact triangularizer from the columns of `V` in the given order:
    /// the `Q` factor (positive `R` diagonal) of `V` with permuted columns.
    pub fn triangularizer_for(&self, order: &[usize]) -> OrthogonalFrame<T> {
        let (q, _) = qr(&self.v.select_columns(order));
        OrthogonalFrame::new(q).expect("QR factor is orthogonal")
    }
}

/// `min_{i<i'} Σₙ (Λₙᵢ − Λₙᵢ')²` over the columns of an `N × d` table.
pub fn joint_gap<T: Real>(lambda: &Matrix<T>) -> T {
    let d = lambda.cols();
    let mut g = T::infinity();
    for i in 0..d {
        for j in (i + 1)..d {
            let s: T = (0..lambda.rows()).map(|n| (lambda[(n, i)] - lambda[(n, j)]).powi(2)).sum();
            g = g.min(s);
        }
    }
    g
}
