//! Exact check of the one-step recurrence
//! `E[Y_{t+1} | w_t] ≤ Y_t − 2η_t(1 − η_t L) E_t + 2η_t² N`.

use super::EngineError;
use crate::linalg;
use crate::objectives::{Objective, ReferenceSolution};

/// Additive slack allowed on the right-hand side.
pub const RECURRENCE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceReport {
    pub checked: usize,
    pub violations: usize,
    /// Smallest `rhs + slack − lhs` seen; negative means a violation.
    pub worst_margin: f64,
    /// Iteration index of the worst margin.
    pub worst_t: u64,
}

/// `trajectory` holds `(t, w_t)` pairs and `step(t)` returns `η_t`.
/// The conditional expectation is averaged exactly over all components.
pub fn recurrence_check(
    objective: &Objective,
    reference: &ReferenceSolution,
    smoothness: f64,
    step: impl Fn(u64) -> f64,
    trajectory: &[(u64, Vec<f64>)],
) -> Result<RecurrenceReport, EngineError> {
    if !(smoothness > 0.0 && smoothness.is_finite()) {
        return Err(EngineError::Config(format!("smoothness constant {smoothness} must be positive and finite")));
    }
    if !objective.has_unique_minimizer() {
        return Err(EngineError::Config("recurrence check needs a unique minimizer".into()));
    }
    let n = objective.component_count();
    let n_const = reference.noise_constant;
    let mut grad = vec![0.0; objective.dim()];
    let mut next = vec![0.0; objective.dim()];
    let mut report = RecurrenceReport { checked: 0, violations: 0, worst_margin: f64::INFINITY, worst_t: 0 };

    for (t, w) in trajectory {
        let eta = step(*t);
        if !(eta >= 0.0 && eta <= 1.0 / smoothness) {
            return Err(EngineError::Config(format!("η_{t} = {eta} exceeds 1/L = {}", 1.0 / smoothness)));
        }
        let objective_err = |source| EngineError::Objective { iteration: *t, source };
        let mut expected = 0.0;
        for i in 0..n {
            objective.component_gradient_into(i, w, &mut grad).map_err(objective_err)?;
            next.copy_from_slice(w);
            linalg::axpy(-eta, &grad, &mut next);
            expected += reference.distance_sq(&next);
        }
        expected /= n as f64;
        let y = reference.distance_sq(w);
        let e = reference.gap(objective, w).map_err(objective_err)?;
        let rhs = y - 2.0 * eta * (1.0 - eta * smoothness) * e + 2.0 * eta * eta * n_const;
        let margin = rhs + RECURRENCE_SLACK - expected;
        report.checked += 1;
        if margin < 0.0 {
            report.violations += 1;
        }
        if margin < report.worst_margin {
            report.worst_margin = margin;
            report.worst_t = *t;
        }
    }
    Ok(report)
}
