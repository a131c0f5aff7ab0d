use alloc::boxed::Box;
use alloc::vec::Vec;

use super::{norm2, solve_linear, SparseMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Absolute tolerance on the Euclidean residual norm.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Step contraction factor applied per backtrack.
    pub contraction: f64,
    pub max_backtracks: usize,
    /// Number of amplitude stages used by continuation fallbacks.
    pub continuation_steps: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            tolerance: 1e-9,
            max_iterations: 50,
            contraction: 0.5,
            max_backtracks: 8,
            continuation_steps: 4,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParams("Newton tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParams("max_iterations must be at least 1"));
        }
        if !(self.contraction > 0.0 && self.contraction < 1.0) {
            return Err(Error::InvalidParams("contraction must lie in (0, 1)"));
        }
        if self.continuation_steps == 0 {
            return Err(Error::InvalidParams("continuation_steps must be at least 1"));
        }
        Ok(())
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NewtonReport {
    pub converged: bool,
    pub iterations: usize,
    /// Residual norm at the start and after every iteration.
    pub residual_history: Vec<f64>,
    /// Iterations in which the full step was shortened.
    pub line_search_activations: usize,
}

impl NewtonReport {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }

    /// Appends the iterations of a later stage.
    pub fn absorb(&mut self, other: &NewtonReport) {
        self.iterations += other.iterations;
        self.line_search_activations += other.line_search_activations;
        self.residual_history.extend_from_slice(&other.residual_history);
        self.converged = other.converged;
    }
}

/// Damped Newton iteration for `residual(x) = 0`.
///
/// Each step solves `J dx = -residual` with the sparse direct solver and
/// halves the step (by `cfg.contraction`) until the residual norm
/// decreases or `cfg.max_backtracks` is reached. Residual evaluation
/// failures (e.g. a collapsed element) during the line search count as no
/// decrease.
pub fn newton_solve<R, J>(
    mut residual: R,
    mut jacobian: J,
    x0: Vec<f64>,
    cfg: &NewtonConfig,
) -> Result<(Vec<f64>, NewtonReport)>
where
    R: FnMut(&[f64]) -> Result<Vec<f64>>,
    J: FnMut(&[f64]) -> Result<SparseMatrix>,
{
    cfg.validate()?;
    let mut x = x0;
    let mut res = residual(&x)?;
    if res.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: res.len(),
        });
    }
    let mut norm = norm2(&res);
    let mut report = NewtonReport {
        residual_history: alloc::vec![norm],
        ..NewtonReport::default()
    };

    while !(norm <= cfg.tolerance) {
        if report.iterations >= cfg.max_iterations || !norm.is_finite() {
            return Err(Error::MaxIterationsExceeded { report });
        }
        report.iterations += 1;
        let jac = jacobian(&x)?;
        let rhs: Vec<f64> = res.iter().map(|r| -r).collect();
        let dx = match solve_linear(&jac, &rhs) {
            Ok(dx) => dx,
            Err(e) => {
                return Err(Error::LinearSolveFailed {
                    iteration: report.iterations,
                    source: Box::new(e),
                    report,
                })
            }
        };

        let mut step = 1.0;
        let mut accepted: Option<(Vec<f64>, Vec<f64>, f64)> = None;
        let mut fallback: Option<(Vec<f64>, Vec<f64>, f64)> = None;
        for attempt in 0..=cfg.max_backtracks {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(xi, d)| xi + step * d).collect();
            if let Ok(r) = residual(&trial) {
                let n = norm2(&r);
                if n < norm {
                    if attempt > 0 {
                        report.line_search_activations += 1;
                    }
                    accepted = Some((trial, r, n));
                    break;
                }
                if n.is_finite() {
                    fallback = Some((trial, r, n));
                }
            }
            step *= cfg.contraction;
        }
        match accepted.or_else(|| {
            report.line_search_activations += 1;
            fallback
        }) {
            Some((xn, rn, nn)) => {
                x = xn;
                res = rn;
                norm = nn;
            }
            None => {
                report.residual_history.push(f64::NAN);
                return Err(Error::MaxIterationsExceeded { report });
            }
        }
        report.residual_history.push(norm);
    }
    report.converged = true;
    Ok((x, report))
}
