//! Seeded Monte Carlo studies: σ-sweeps of the first-order bounds and
//! containment counts across independent noise draws.

use rayon::prelude::*;

use crate::bounds::{init_noise_threshold, BoundReport, GroundTruthModel};
use crate::error::{Error, Result};
use crate::linalg::{orthogonal_log, OrthogonalFrame};
use crate::tensor::{component_error_bound, decompose, match_columns, normalized_components, ComponentMatrix};
use crate::triangularizer::{
    descend, find_separating_beta, schur_initializer, BetaStrategy, CombinationVector, OptimizerConfig,
};

use super::family::{distance_to_nearest, enumerate_exact_triangularizers, TriangularizerFamily};
use super::generate::{noise_tensor, trial_noise, NoiseStyle};

/// Multiplicative slack applied to every bound in containment checks.
pub const SLACK: f64 = 1.1;
/// Absolute floor below which an observed error counts as roundoff.
pub const ABS_FLOOR: f64 = 1e-9;
const BETA_TRIES: usize = 100;

fn contained(observed: f64, bound: f64) -> bool {
    observed <= SLACK * bound + ABS_FLOOR
}

/// One run of Schur initialization and descent on a noisy model, compared
/// with the nearest exact triangularizer.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub sigma: f64,
    pub final_loss: f64,
    pub iterations: usize,
    pub termination: &'static str,
    /// Index of the nearest frame in the family.
    pub frame_index: usize,
    pub observed_alpha: f64,
    /// `‖αX_observed − αX_predicted‖_F`.
    pub direction_residual: f64,
    pub alpha_apriori: f64,
    pub alpha_explicit: f64,
    pub alpha_aposteriori: f64,
    /// `max |[UᵀM̂ₙU]ᵢᵢ − [U∘ᵀMₙU∘]ᵢᵢ|` over `n, i`.
    pub eigenvalue_observed: f64,
    pub eigenvalue_bound: f64,
}

/// Runs the pipeline on `gt` (noise and `σ` as stored in the model).
pub fn run_trial(
    gt: &GroundTruthModel<f64>,
    family: &TriangularizerFamily<f64>,
    trial: usize,
    seed: u64,
    config: &OptimizerConfig<f64>,
) -> Result<TrialOutcome> {
    let set = gt.observed_set();
    let beta = find_separating_beta(&set, BetaStrategy::Ones, seed, BETA_TRIES)?.beta;
    let u_init = schur_initializer(&set, &beta)?;
    let (u, trace) = descend(&set, &u_init, config)?;
    let (observed_alpha, frame_index) = distance_to_nearest(&u, family)?;
    let u_circ = &family.frames[frame_index];
    let report = BoundReport::evaluate(gt, &u, u_circ, &beta, &u_init, Some(observed_alpha))?;
    let observed_dir = orthogonal_log(&u_circ.relative_to(&u))?;
    let direction_residual = (observed_dir.matrix() - report.predicted_direction.matrix()).frobenius_norm();
    let mut eigenvalue_observed: f64 = 0.0;
    for (m_hat, m) in set.iter().zip(gt.clean_matrices()) {
        let a = m_hat.congruence(u.matrix());
        let b = m.congruence(u_circ.matrix());
        for (x, y) in a.diagonal().into_iter().zip(b.diagonal()) {
            eigenvalue_observed = eigenvalue_observed.max((x - y).abs());
        }
    }
    Ok(TrialOutcome {
        trial,
        sigma: gt.sigma(),
        final_loss: trace.final_loss().unwrap_or(f64::NAN),
        iterations: trace.iterations(),
        termination: trace.termination.tag(),
        frame_index,
        observed_alpha,
        direction_residual,
        alpha_apriori: report.alpha_apriori,
        alpha_explicit: report.alpha_explicit,
        alpha_aposteriori: report.alpha_aposteriori,
        eigenvalue_observed,
        eigenvalue_bound: report.eigenvalue_error,
    })
}

/// `σ_max` of the certified initialization for the noiseless model: the
/// Schur frame of the noiseless pencil stands in for `U_init`.
pub fn noiseless_sigma_max(gt: &GroundTruthModel<f64>, seed: u64) -> Result<f64> {
    let clean = gt.with_sigma(0.0)?;
    let set = clean.observed_set();
    let beta = find_separating_beta(&set, BetaStrategy::Ones, seed, BETA_TRIES)?.beta;
    let u_init = schur_initializer(&set, &beta)?;
    Ok(init_noise_threshold(&clean, &beta, &u_init)?.sigma_max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub sigma: f64,
    /// Means over trials.
    pub observed_alpha: f64,
    pub direction_residual: f64,
    pub alpha_apriori: f64,
    pub alpha_explicit: f64,
    pub alpha_aposteriori: f64,
    pub runs: Vec<TrialOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub sigmas: Vec<f64>,
    pub points: Vec<SweepPoint>,
    /// Log-log slope of the mean observed `α` against `σ`.
    pub alpha_slope: Option<f64>,
    /// Log-log slope of the mean direction residual against `σ`.
    pub residual_slope: Option<f64>,
    pub sigma_max: Option<f64>,
    pub warnings: Vec<String>,
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// points or a nonpositive value.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.len() != y.len() || x.iter().chain(y).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, k) = v.fold((0.0, 0usize), |(s, k), x| (s + x, k + 1));
    s / k as f64
}

/// For each `σ` of a strictly decreasing grid, runs `trials` noise draws.
///
/// Trial `k` uses the same noise directions at every `σ` (stream `k + 1` of
/// `seed`), so the sweep isolates the dependence on `σ`. A `σ` at or above
/// the noiseless `σ_max` is run anyway and reported in `warnings`.
pub fn sigma_sweep(
    gt: &GroundTruthModel<f64>,
    sigmas: &[f64],
    trials: usize,
    seed: u64,
    config: &OptimizerConfig<f64>,
) -> Result<SweepReport> {
    if sigmas.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::InvalidInput("sigma grid must be strictly decreasing".into()));
    }
    if sigmas.iter().any(|&s| !(s >= 0.0) || !s.is_finite()) {
        return Err(Error::InvalidInput("sigma must be finite and nonnegative".into()));
    }
    let empty = SweepReport {
        sigmas: vec![],
        points: vec![],
        alpha_slope: None,
        residual_slope: None,
        sigma_max: None,
        warnings: vec![],
    };
    if sigmas.is_empty() {
        return Ok(empty);
    }
    if trials == 0 {
        return Err(Error::InvalidInput("a sweep needs at least one trial".into()));
    }
    let family = enumerate_exact_triangularizers(gt)?;
    let sigma_max = noiseless_sigma_max(gt, seed)?;
    let warnings = sigmas
        .iter()
        .filter(|&&s| !(s > 0.0 && s < sigma_max))
        .map(|s| format!("sigma {s:e} outside the certified range (0, {sigma_max:e})"))
        .collect();
    let noises: Vec<_> = (0..trials).map(|k| trial_noise(gt.d(), gt.n(), NoiseStyle::Dense, seed, k as u64)).collect();
    let mut points = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let runs = noises
            .par_iter()
            .enumerate()
            .map(|(k, w)| run_trial(&gt.with_noise(w.clone())?.with_sigma(sigma)?, &family, k, seed, config))
            .collect::<Result<Vec<_>>>()?;
        points.push(SweepPoint {
            sigma,
            observed_alpha: mean(runs.iter().map(|r| r.observed_alpha)),
            direction_residual: mean(runs.iter().map(|r| r.direction_residual)),
            alpha_apriori: mean(runs.iter().map(|r| r.alpha_apriori)),
            alpha_explicit: mean(runs.iter().map(|r| r.alpha_explicit)),
            alpha_aposteriori: mean(runs.iter().map(|r| r.alpha_aposteriori)),
            runs,
        });
    }
    let alphas: Vec<f64> = points.iter().map(|p| p.observed_alpha).collect();
    let residuals: Vec<f64> = points.iter().map(|p| p.direction_residual).collect();
    Ok(SweepReport {
        sigmas: sigmas.to_vec(),
        alpha_slope: log_log_slope(sigmas, &alphas),
        residual_slope: log_log_slope(sigmas, &residuals),
        points,
        sigma_max: Some(sigma_max),
        warnings,
    })
}

/// Pass/fail of every bound for one trial; a trial whose pipeline failed
/// carries the error name and fails every check.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyTrial {
    pub trial: usize,
    pub outcome: Option<TrialOutcome>,
    pub error: Option<&'static str>,
    pub apriori: bool,
    pub explicit: bool,
    pub aposteriori: bool,
    pub eigenvalue: bool,
    pub apriori_le_explicit: bool,
}

impl VerifyTrial {
    fn from_result(trial: usize, r: Result<TrialOutcome>) -> Self {
        match r {
            Ok(o) => Self {
                trial,
                apriori: contained(o.observed_alpha, o.alpha_apriori),
                explicit: contained(o.observed_alpha, o.alpha_explicit),
                aposteriori: contained(o.observed_alpha, o.alpha_aposteriori),
                eigenvalue: contained(o.eigenvalue_observed, o.eigenvalue_bound),
                apriori_le_explicit: o.alpha_apriori <= o.alpha_explicit,
                outcome: Some(o),
                error: None,
            },
            Err(e) => Self {
                trial,
                outcome: None,
                error: Some(e.name()),
                apriori: false,
                explicit: false,
                aposteriori: false,
                eigenvalue: false,
                apriori_le_explicit: false,
            },
        }
    }
}

/// Containment counts; `merge` pools studies over several models.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ContainmentCounts {
    pub trials: usize,
    pub errors: usize,
    pub apriori: usize,
    pub explicit: usize,
    pub aposteriori: usize,
    pub eigenvalue: usize,
    pub apriori_le_explicit: usize,
}

impl ContainmentCounts {
    pub fn merge(&mut self, other: &Self) {
        self.trials += other.trials;
        self.errors += other.errors;
        self.apriori += other.apriori;
        self.explicit += other.explicit;
        self.aposteriori += other.aposteriori;
        self.eigenvalue += other.eigenvalue;
        self.apriori_le_explicit += other.apriori_le_explicit;
    }

    /// `count / trials`; `None` when there were no trials.
    pub fn fraction(&self, count: usize) -> Option<f64> {
        (self.trials > 0).then(|| count as f64 / self.trials as f64)
    }

    /// Named fractions in a fixed order; empty when there were no trials.
    pub fn fractions(&self) -> Vec<(&'static str, f64)> {
        [
            ("apriori", self.apriori),
            ("explicit", self.explicit),
            ("aposteriori", self.aposteriori),
            ("eigenvalue", self.eigenvalue),
            ("apriori_le_explicit", self.apriori_le_explicit),
        ]
        .into_iter()
        .filter_map(|(k, c)| self.fraction(c).map(|f| (k, f)))
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub sigma: f64,
    pub records: Vec<VerifyTrial>,
    pub counts: ContainmentCounts,
}

/// Draws fresh noise per trial (stream `trial + 1` of `seed`), runs the
/// pipeline at `σ` and checks every bound with slack [`SLACK`].
pub fn verify_bounds(
    gt: &GroundTruthModel<f64>,
    sigma: f64,
    trials: usize,
    seed: u64,
    config: &OptimizerConfig<f64>,
) -> Result<VerifyReport> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidInput("sigma must be finite and nonnegative".into()));
    }
    if trials == 0 {
        return Ok(VerifyReport { sigma, records: vec![], counts: ContainmentCounts::default() });
    }
    let family = enumerate_exact_triangularizers(gt)?;
    let records: Vec<VerifyTrial> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let w = trial_noise(gt.d(), gt.n(), NoiseStyle::Dense, seed, k as u64);
            let r = gt
                .with_noise(w)
                .and_then(|g| g.with_sigma(sigma))
                .and_then(|g| run_trial(&g, &family, k, seed, config));
            VerifyTrial::from_result(k, r)
        })
        .collect();
    let mut counts = ContainmentCounts { trials, ..Default::default() };
    for r in &records {
        counts.errors += r.error.is_some() as usize;
        counts.apriori += r.apriori as usize;
        counts.explicit += r.explicit as usize;
        counts.aposteriori += r.aposteriori as usize;
        counts.eigenvalue += r.eigenvalue as usize;
        counts.apriori_le_explicit += r.apriori_le_explicit as usize;
    }
    Ok(VerifyReport { sigma, records, counts })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentTrial {
    pub trial: usize,
    /// Entrywise max error of the normalized components after column
    /// matching.
    pub observed: Option<f64>,
    pub bound: f64,
    pub bound_as_stated: f64,
    pub error: Option<&'static str>,
    pub contained: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentStudy {
    pub sigma: f64,
    pub eps: f64,
    pub records: Vec<ComponentTrial>,
    pub passed: usize,
}

/// Decomposes `Σzᵢ⊗zᵢ⊗zᵢ + σ𝔼` (`‖𝔼‖ = eps`, stream `trial + 1`) with
/// `θ = 1/√N` and checks the first-order component bound.
pub fn verify_components(
    z: &ComponentMatrix<f64>,
    sigma: f64,
    eps: f64,
    trials: usize,
    seed: u64,
    config: &OptimizerConfig<f64>,
) -> Result<ComponentStudy> {
    let theta = CombinationVector::ones(z.n());
    let bound = component_error_bound(z, eps, sigma)?;
    let truth = normalized_components(z, &theta)?;
    let ground = crate::tensor::Tensor3::symmetric_cp(z);
    let records: Vec<ComponentTrial> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let observed = ground
                .add_scaled(&noise_tensor(z.n(), eps, seed, k as u64 + 1), sigma)
                .and_then(|t| decompose(&t, z.d(), &theta, BetaStrategy::Ones, seed, config))
                .and_then(|dec| match_columns(dec.ratios.matrix(), truth.matrix()))
                .map(|m| m.max_error);
            let (observed, error) = match observed {
                Ok(v) => (Some(v), None),
                Err(e) => (None, Some(e.name())),
            };
            ComponentTrial {
                trial: k,
                observed,
                bound: bound.bound,
                bound_as_stated: bound.bound_as_stated,
                error,
                contained: observed.is_some_and(|v| contained(v, bound.bound)),
            }
        })
        .collect();
    let passed = records.iter().filter(|r| r.contained).count();
    Ok(ComponentStudy { sigma, eps, records, passed })
}

/// Exact frame nearest to `u`, for callers that only need the frame.
pub fn nearest_frame(
    u: &OrthogonalFrame<f64>,
    family: &TriangularizerFamily<f64>,
) -> Result<(f64, OrthogonalFrame<f64>)> {
    let (alpha, k) = distance_to_nearest(u, family)?;
    Ok((alpha, family.frames[k].clone()))
}
