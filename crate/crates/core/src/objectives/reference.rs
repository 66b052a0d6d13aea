//! Reference minimizer by deterministic full-gradient descent with Armijo
//! backtracking.

use super::objective::Objective;
use super::ObjectiveError;
use crate::linalg;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 1_000_000;
const ARMIJO_C: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub w_star: Vec<f64>,
    /// `F(w_star)`
    pub f_min: f64,
    /// `N = (1/n) Σ_i ‖∇f_i(w_star)‖²`
    pub noise_constant: f64,
    /// `‖∇F(w_star)‖`
    pub gradient_norm: f64,
    pub iterations: usize,
}

impl ReferenceSolution {
    /// `F(w) − F_min`
    pub fn gap(&self, objective: &Objective, w: &[f64]) -> Result<f64, ObjectiveError> {
        Ok(objective.value(w)? - self.f_min)
    }

    /// `‖w − w_star‖²`
    pub fn distance_sq(&self, w: &[f64]) -> f64 {
        linalg::dist_sq(w, &self.w_star)
    }
}

/// Solves to `‖∇F‖ ≤ tolerance` with the default iteration cap.
pub fn solve_reference(objective: &Objective, tolerance: f64) -> Result<ReferenceSolution, ObjectiveError> {
    solve_reference_with(objective, tolerance, DEFAULT_MAX_ITERATIONS)
}

pub fn solve_reference_with(
    objective: &Objective,
    tolerance: f64,
    max_iterations: usize,
) -> Result<ReferenceSolution, ObjectiveError> {
    if !(tolerance > 0.0) {
        return Err(ObjectiveError::InvalidParameter(format!("tolerance must be positive, got {tolerance}")));
    }
    if !objective.has_unique_minimizer() {
        return Err(ObjectiveError::NonUniqueMinimizer);
    }

    let mut w = vec![0.0; objective.dim()];
    let mut f = objective.value(&w)?;
    let mut g = objective.gradient(&w)?;
    let mut g_norm_sq = linalg::norm_sq(&g);
    let mut step = 1.0_f64;
    let mut trial = vec![0.0; w.len()];
    let mut iterations = 0;

    while g_norm_sq.sqrt() > tolerance {
        if iterations >= max_iterations {
            return Err(ObjectiveError::NonConvergence { iterations, gradient_norm: g_norm_sq.sqrt() });
        }
        // In exact arithmetic any step ≤ 1/L satisfies the Armijo condition, so
        // backtracking stops there; this also keeps progress once F differences
        // fall below rounding.
        let local_l = objective.smoothness_bound(linalg::norm_inf(&w) + 1.0);
        let floor = if local_l > 0.0 { 1.0 / local_l } else { 0.0 };
        step = (2.0 * step).max(floor);
        let f_trial = loop {
            trial.copy_from_slice(&w);
            linalg::axpy(-step, &g, &mut trial);
            let f_trial = match objective.value(&trial) {
                Ok(v) if v.is_finite() => v,
                Ok(_) | Err(ObjectiveError::Overflow { .. }) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            if f_trial <= f - ARMIJO_C * step * g_norm_sq || step <= floor {
                break f_trial;
            }
            step *= 0.5;
            if step < f64::MIN_POSITIVE {
                return Err(ObjectiveError::NonConvergence { iterations, gradient_norm: g_norm_sq.sqrt() });
            }
        };
        if !f_trial.is_finite() {
            return Err(ObjectiveError::NonFinite);
        }
        std::mem::swap(&mut w, &mut trial);
        f = f_trial;
        g = objective.gradient(&w)?;
        g_norm_sq = linalg::norm_sq(&g);
        iterations += 1;
    }

    let n = objective.component_count();
    let mut buf = vec![0.0; w.len()];
    let mut noise = 0.0;
    for i in 0..n {
        objective.component_gradient_into(i, &w, &mut buf)?;
        noise += linalg::norm_sq(&buf);
    }
    Ok(ReferenceSolution {
        f_min: f,
        noise_constant: noise / n as f64,
        gradient_norm: g_norm_sq.sqrt(),
        w_star: w,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{composite_objective, Dataset, LabeledExample, Loss, Regularizer};
    use std::sync::Arc;

    fn ls(points: &[(f64, f64)]) -> Objective {
        let ex = points.iter().map(|&(a, b)| LabeledExample::dense(vec![a], b)).collect();
        Objective::new(Loss::LeastSquares, Arc::new(Dataset::new(ex, 1).unwrap())).unwrap()
    }

    #[test]
    fn one_dimensional_root() {
        let sol = solve_reference(&ls(&[(1.0, 3.0)]), 1e-10).unwrap();
        assert!((sol.w_star[0] - 3.0).abs() < 1e-10);
        assert!(sol.f_min.abs() < 1e-20);
        assert!(sol.noise_constant < 1e-18);
    }

    #[test]
    fn two_component_noise_constant() {
        // f_1 = (w-1)², f_2 = (w+1)²: gradients -2 and 2 at w* = 0.
        let sol = solve_reference(&ls(&[(1.0, 1.0), (1.0, -1.0)]), 1e-12).unwrap();
        assert!(sol.w_star[0].abs() < 1e-12);
        assert!((sol.noise_constant - 4.0).abs() < 1e-10);
        assert!((sol.f_min - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_tolerance_met_and_deterministic() {
        let ex = vec![
            LabeledExample::dense(vec![1.0, 0.5], 1.0),
            LabeledExample::dense(vec![-0.3, 2.0], -2.0),
            LabeledExample::dense(vec![0.7, 0.1], 0.5),
        ];
        let base = Objective::new(Loss::LeastSquares, Arc::new(Dataset::new(ex, 2).unwrap())).unwrap();
        let obj = composite_objective(base, Regularizer::Norm2Squared, 0.1).unwrap();
        let a = solve_reference(&obj, 1e-10).unwrap();
        assert!(a.gradient_norm <= 1e-10);
        let b = solve_reference(&obj, 1e-10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn quartic_regularizer_only() {
        let obj = Objective::regularizer_only(2, Regularizer::ExpCosh, 1.0).unwrap();
        let sol = solve_reference(&obj, 1e-10).unwrap();
        assert_eq!(sol.w_star, vec![0.0, 0.0]);
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn non_unique_and_bad_tolerance() {
        let ex = vec![LabeledExample::dense(vec![1.0], 1.0), LabeledExample::dense(vec![2.0], 1.0)];
        let plain = Objective::new(Loss::Logistic, Arc::new(Dataset::new(ex, 1).unwrap())).unwrap();
        assert!(matches!(solve_reference(&plain, 1e-10), Err(ObjectiveError::NonUniqueMinimizer)));
        assert!(solve_reference(&ls(&[(1.0, 3.0)]), 0.0).is_err());
    }

    #[test]
    fn iteration_cap_reported() {
        let ex = vec![LabeledExample::dense(vec![1.0, 0.0], 1.0), LabeledExample::dense(vec![0.0, 1e-3], 1.0)];
        let obj = Objective::new(Loss::LeastSquares, Arc::new(Dataset::new(ex, 2).unwrap())).unwrap();
        assert!(matches!(
            solve_reference_with(&obj, 1e-14, 3),
            Err(ObjectiveError::NonConvergence { iterations: 3, .. })
        ));
    }
}
