use crate::error::Result;
use crate::linalg::{OrthogonalFrame, SkewDirection};
use crate::scalar::Real;
use crate::triangularizer::CombinationVector;

use super::estimates::{
    a_posteriori_bound, a_priori_bound, eigenvalue_error_bound, explicit_bound, init_noise_threshold,
    predicted_direction,
};
use super::GroundTruthModel;

/// Every bound quantity for one model, candidate frame and combination.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<T> {
    pub alpha_apriori: T,
    pub alpha_explicit: T,
    pub alpha_aposteriori: T,
    pub gamma: T,
    pub epsilon: T,
    pub a_alpha: T,
    pub a_sigma: T,
    pub alpha_max: T,
    pub sigma_max: T,
    /// First-order displacement `αX` from the exact frame.
    pub predicted_direction: SkewDirection<T>,
    /// `maxₙ 2α‖Mₙ‖ + σ‖Wₙ‖` with `α` the a priori bound.
    pub eigenvalue_error: T,
    pub observed_alpha: Option<T>,
}

impl<T: Real> BoundReport<T> {
    /// `u` is the candidate frame, `u_circ` the exact triangularizer it is
    /// compared with and `u_init` the frame the descent started from.
    pub fn evaluate(
        gt: &GroundTruthModel<T>,
        u: &OrthogonalFrame<T>,
        u_circ: &OrthogonalFrame<T>,
        beta: &CombinationVector<T>,
        u_init: &OrthogonalFrame<T>,
        observed_alpha: Option<T>,
    ) -> Result<Self> {
        let alpha_apriori = a_priori_bound(gt, u_circ)?;
        let (alpha_explicit, _) = explicit_bound(gt)?;
        let alpha_aposteriori = a_posteriori_bound(&gt.observed_set(), u, beta.as_slice(), gt.sigma())?;
        let th = init_noise_threshold(gt, beta, u_init)?;
        let eigenvalue_error = gt
            .clean_matrices()
            .iter()
            .zip(gt.noise())
            .map(|(m, w)| eigenvalue_error_bound(alpha_apriori, gt.sigma(), m.frobenius_norm(), w.frobenius_norm()))
            .fold(T::zero(), T::max);
        Ok(Self {
            alpha_apriori,
            alpha_explicit,
            alpha_aposteriori,
            gamma: th.gamma,
            epsilon: th.epsilon,
            a_alpha: th.a_alpha,
            a_sigma: th.a_sigma,
            alpha_max: th.alpha_max,
            sigma_max: th.sigma_max,
            predicted_direction: predicted_direction(gt, u_circ)?,
            eigenvalue_error,
            observed_alpha,
        })
    }

    /// Scalar fields by name, in a fixed order.
    pub fn scalars(&self) -> Vec<(&'static str, T)> {
        let mut v = vec![
            ("alpha_apriori", self.alpha_apriori),
            ("alpha_explicit", self.alpha_explicit),
            ("alpha_aposteriori", self.alpha_aposteriori),
            ("gamma", self.gamma),
            ("epsilon", self.epsilon),
            ("a_alpha", self.a_alpha),
            ("a_sigma", self.a_sigma),
            ("alpha_max", self.alpha_max),
            ("sigma_max", self.sigma_max),
            ("eigenvalue_error", self.eigenvalue_error),
        ];
        if let Some(a) = self.observed_alpha {
            v.push(("observed_alpha", a));
        }
        v
    }
}
