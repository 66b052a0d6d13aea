//! Desk-scale benchmark problems with known curvature.

use crate::engine::RunConfig;
use crate::io::{synthesize_dataset, IoError, SyntheticKind, SyntheticSpec};
use crate::objectives::{
    composite_objective, solve_reference, Loss, Objective, ReferenceSolution, Regularizer, DEFAULT_TOLERANCE,
};
use crate::omega::OmegaSpec;
use crate::schedule::{ScheduleSpec, Shift};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub name: &'static str,
    pub objective: Arc<Objective>,
    pub reference: Arc<ReferenceSolution>,
    /// Certified curvature exponent and constant.
    pub h: f64,
    pub mu: f64,
    /// `β` of `v(η) = βhη^{1−h}` for `r = ∞`.
    pub beta: f64,
    /// Smoothness bound on the region.
    pub smoothness: f64,
    pub region: f64,
    pub w0: Vec<f64>,
    /// The curvature-optimal schedule for this problem.
    pub schedule: ScheduleSpec,
}

impl Benchmark {
    fn assemble(
        name: &'static str,
        objective: Objective,
        region: f64,
        w0: Vec<f64>,
        shift: Shift,
    ) -> Result<Self, IoError> {
        let cert = objective
            .curvature_certificate()
            .ok_or_else(|| IoError::Config(format!("{name}: objective has no curvature certificate")))?;
        let beta = OmegaSpec::curvature(cert.h, f64::INFINITY, cert.mu)
            .map_err(|e| IoError::Config(e.to_string()))?
            .beta();
        let smoothness = objective.smoothness_bound(region);
        let schedule = ScheduleSpec::paper_optimal(cert.h, beta, smoothness, f64::INFINITY, shift)?;
        let reference = Arc::new(solve_reference(&objective, DEFAULT_TOLERANCE)?);
        Ok(Self {
            name,
            objective: Arc::new(objective),
            reference,
            h: cert.h,
            mu: cert.mu,
            beta,
            smoothness,
            region,
            w0,
            schedule,
        })
    }

    pub fn config(&self, schedule: ScheduleSpec, iterations: u64, stride: u64) -> RunConfig {
        RunConfig {
            objective: self.objective.clone(),
            reference: Some(self.reference.clone()),
            schedule,
            seed: 0,
            iterations,
            record_stride: stride,
            region_radius: self.region,
            w0: Some(self.w0.clone()),
            keep_iterates: false,
        }
    }
}

/// Ridge least squares: `d = 10`, `n = 1000`, features `N(0, 0.3·I)`, noise 1,
/// `λ = 6` on `½‖w‖²` (so `h = 1`, `μ = 6`), started at the origin.
pub fn ridge_benchmark() -> Result<Benchmark, IoError> {
    let data = synthesize_dataset(&SyntheticSpec {
        n: 1000,
        d: 10,
        seed: 0,
        kind: SyntheticKind::Linear { feature_var: 3.0, noise: 1.0 },
    })?;
    let base = Objective::new(Loss::LeastSquares, Arc::new(data))?;
    let objective = composite_objective(base, Regularizer::Norm2Squared, 6.0)?;
    Benchmark::assemble("ridge", objective, 10.0, vec![0.0; 10], Shift::Paper)
}

/// Linear loss on antithetic pairs plus `λG`: `d = 2`, `n = 200`, `σ = 3`,
/// `λ = 10`, region `‖w‖∞ ≤ 2`, started at `(1, 1)`. The data term has zero
/// curvature, so the problem has curvature exactly `1/2` at `w_* = 0`. The
/// schedule uses the capped shift so that `η_0 = 1/(2L)`.
pub fn g_benchmark() -> Result<Benchmark, IoError> {
    let data = synthesize_dataset(&SyntheticSpec {
        n: 200,
        d: 2,
        seed: 0,
        kind: SyntheticKind::Symmetric { sigma: 3.0 },
    })?;
    let base = Objective::new(Loss::Linear, Arc::new(data))?;
    let objective = composite_objective(base, Regularizer::ExpCosh, 10.0)?;
    Benchmark::assemble("exp-cosh", objective, 2.0, vec![1.0, 1.0], Shift::Capped)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ridge_constants() {
        let b = ridge_benchmark().unwrap();
        assert_eq!((b.h, b.mu, b.beta), (1.0, 6.0, 3.0));
        let p = b.schedule.as_paper_optimal().unwrap();
        assert!((b.schedule.step(0) - 0.5 / b.smoothness).abs() < 1e-15);
        assert!((p.delta() - 8.0 * b.smoothness / 6.0).abs() < 1e-9);
    }

    #[test]
    fn g_constants() {
        let b = g_benchmark().unwrap();
        assert_eq!(b.h, 0.5);
        assert!((b.mu - 10.0 / 18.0).abs() < 1e-15);
        assert!((b.beta - b.mu).abs() < 1e-15);
        assert!(b.reference.w_star.iter().all(|w| w.abs() < 1e-12));
        assert!((b.schedule.step(0) * 2.0 * b.smoothness - 1.0).abs() < 1e-12);
    }
}
