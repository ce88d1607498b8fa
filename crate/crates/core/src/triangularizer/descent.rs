//! First-order descent on the orthogonal group with Armijo backtracking.
//!
//! Iterates `Uₖ₊₁ = Uₖ·exp(−t Gₖ/‖Gₖ‖)`. The first trial step is a
//! Barzilai–Borwein estimate capped at `initial_step`; it is halved (by
//! `backtrack_factor`) until the Armijo condition holds.

use crate::error::{Error, Result};
use crate::linalg::{OrthogonalFrame, SkewDirection};
use crate::scalar::Real;

use super::{gradient, loss, MatrixSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig<T> {
    pub max_iters: usize,
    pub grad_tol: T,
    pub armijo_c: T,
    pub backtrack_factor: T,
    pub initial_step: T,
}

impl<T: Real> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self {
            max_iters: 500,
            grad_tol: T::tol(1e-12),
            armijo_c: T::c(1e-4),
            backtrack_factor: T::c(0.5),
            initial_step: T::one(),
        }
    }
}

impl<T: Real> OptimizerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |x: T| x > T::zero() && x < T::one();
        if !(self.grad_tol > T::zero()) {
            return Err(Error::InvalidInput("grad_tol must be positive".into()));
        }
        if !open_unit(self.armijo_c) || !open_unit(self.backtrack_factor) {
            return Err(Error::InvalidInput("armijo_c and backtrack_factor must lie in (0, 1)".into()));
        }
        if !(self.initial_step > T::zero()) || !self.initial_step.is_finite() {
            return Err(Error::InvalidInput("initial_step must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIters,
}

impl Termination {
    pub fn tag(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIters => "max_iters",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord<T> {
    pub loss: T,
    pub grad_norm: T,
    /// Accepted step; zero for the starting point.
    pub step: T,
}

/// Records start at the initial frame and gain one entry per accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentTrace<T> {
    pub records: Vec<IterRecord<T>>,
    pub termination: Termination,
}

impl<T: Real> DescentTrace<T> {
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn final_loss(&self) -> Option<T> {
        self.records.last().map(|r| r.loss)
    }

    pub fn final_grad_norm(&self) -> Option<T> {
        self.records.last().map(|r| r.grad_norm)
    }
}

pub fn descend<T: Real>(
    set: &MatrixSet<T>,
    u_init: &OrthogonalFrame<T>,
    config: &OptimizerConfig<T>,
) -> Result<(OrthogonalFrame<T>, DescentTrace<T>)> {
    config.validate()?;
    let mut u = u_init.clone();
    let mut f = loss(&u, set)?;
    let mut g = gradient(&u, set)?;
    let mut gnorm = g.norm();
    let mut records = vec![IterRecord { loss: f, grad_norm: gnorm, step: T::zero() }];
    if config.max_iters == 0 {
        return Ok((u, DescentTrace { records, termination: Termination::MaxIters }));
    }
    let min_step = T::c(1e-16);
    // previous (step · direction, gradient) for the Barzilai–Borwein estimate
    let mut prev: Option<(SkewDirection<T>, SkewDirection<T>)> = None;

    for iteration in 0..config.max_iters {
        if gnorm <= config.grad_tol {
            return Ok((u, DescentTrace { records, termination: Termination::Converged }));
        }
        let dir = g.scale(-T::one() / gnorm);
        let mut t = config.initial_step;
        if let Some((s, g_old)) = &prev {
            let y = g.matrix() - g_old.matrix();
            let sy = s.matrix().dot(&y);
            let ss = s.matrix().dot(s.matrix());
            if sy > T::zero() {
                t = (ss / sy * gnorm).min(config.initial_step);
            }
        }
        loop {
            let trial = u.retract(&dir, t);
            let f_new = loss(&trial, set)?;
            let armijo = f_new <= f - config.armijo_c * t * gnorm;
            let (g_new, accept) = if armijo {
                (None, true)
            } else if f_new <= f {
                // Near a minimizer the predicted decrease drops below the
                // roundoff of ℒ; still accept a non-increasing step that
                // shrinks the gradient.
                let gn = gradient(&trial, set)?;
                let ok = gn.norm() < gnorm;
                (Some(gn), ok)
            } else {
                (None, false)
            };
            if accept {
                let g_new = match g_new {
                    Some(gn) => gn,
                    None => gradient(&trial, set)?,
                };
                prev = Some((dir.scale(t), g));
                u = trial;
                f = f_new;
                g = g_new;
                gnorm = g.norm();
                records.push(IterRecord { loss: f, grad_norm: gnorm, step: t });
                break;
            }
            t *= config.backtrack_factor;
            if t < min_step {
                return Err(Error::LineSearchStalled { iteration, grad_norm: gnorm.to_f64_lossy() });
            }
        }
    }
    let termination = if gnorm <= config.grad_tol { Termination::Converged } else { Termination::MaxIters };
    Ok((u, DescentTrace { records, termination }))
}
