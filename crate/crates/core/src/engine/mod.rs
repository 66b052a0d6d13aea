//! The SGD loop, multi-seed sweeps and trace analysis.
//!
//! # Randomness
//!
//! A run with seed `s` draws its component indices from
//! `ChaCha8Rng::seed_from_u64(s)`: the index used at iteration `k` is the
//! `(k+1)`-th call of `random_range(0..n)` on that generator, and nothing else
//! consumes it. Sweeps give every seed its own generator, so results do not
//! depend on thread scheduling.

mod analysis;
mod recurrence;
mod sweep;

pub use analysis::{moving_mean, rate_slope_fit, tail_average_series, MIN_SLOPE_POINTS, MOVING_MEAN_WINDOW};
pub use recurrence::{recurrence_check, RecurrenceReport, RECURRENCE_SLACK};
pub use sweep::{multi_seed_sweep, thread_limit, MeanRecord, SweepResult, THREADS_ENV};

use crate::linalg;
use crate::objectives::{Objective, ObjectiveError, ReferenceSolution};
use crate::schedule::{ScheduleError, ScheduleSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error("non-finite iterate at iteration {iteration} (step {eta:e}); aborting")]
    NonFinite { iteration: u64, eta: f64 },
    #[error("objective evaluation failed at iteration {iteration}: {source}")]
    Objective { iteration: u64, source: ObjectiveError },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("{0}")]
    InsufficientData(String),
    #[error("seed {seed} failed: {source}")]
    Seed { seed: u64, source: Box<EngineError> },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub objective: Arc<Objective>,
    /// Enables `E_t` and `Y_t`.
    pub reference: Option<Arc<ReferenceSolution>>,
    pub schedule: ScheduleSpec,
    pub seed: u64,
    pub iterations: u64,
    pub record_stride: u64,
    /// Radius `R` of the box `‖w‖∞ ≤ R` that iterates are expected to stay in.
    pub region_radius: f64,
    /// Starting point; the zero vector when `None`.
    pub w0: Option<Vec<f64>>,
    /// Store the iterate at every record (for [`recurrence_check`]).
    pub keep_iterates: bool,
}

impl RunConfig {
    pub fn new(objective: Arc<Objective>, schedule: ScheduleSpec, iterations: u64) -> Self {
        Self {
            objective,
            reference: None,
            schedule,
            seed: 0,
            iterations,
            record_stride: 1,
            region_radius: crate::objectives::DEFAULT_REGION_RADIUS,
            w0: None,
            keep_iterates: false,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.iterations == 0 {
            return Err(EngineError::Config("iterations must be at least 1".into()));
        }
        if self.record_stride == 0 {
            return Err(EngineError::Config("record stride must be at least 1".into()));
        }
        if !(self.region_radius > 0.0) {
            return Err(EngineError::Config("region radius must be positive".into()));
        }
        if self.objective.component_count() == 0 {
            return Err(EngineError::Config("objective has no components".into()));
        }
        if let Some(w0) = &self.w0 {
            if w0.len() != self.objective.dim() {
                return Err(EngineError::Config(format!(
                    "w0 has dimension {}, objective {}",
                    w0.len(),
                    self.objective.dim()
                )));
            }
            if w0.iter().any(|x| !x.is_finite()) {
                return Err(EngineError::Config("w0 must be finite".into()));
            }
        }
        if let Some(r) = &self.reference {
            if r.w_star.len() != self.objective.dim() {
                return Err(EngineError::Config("reference dimension does not match objective".into()));
            }
        }
        Ok(())
    }

    /// Recorded iteration indices: `0, stride, 2·stride, …, ≤ iterations`.
    pub fn record_times(&self) -> impl Iterator<Item = u64> {
        (0..=self.iterations).step_by(self.record_stride as usize)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub t: u64,
    /// Step used for the update out of `w_t`.
    pub eta: f64,
    /// `F(w_t)`
    pub value: f64,
    /// `E_t = F(w_t) − F_min`
    pub gap: Option<f64>,
    /// `Y_t = ‖w_t − w_*‖²`
    pub distance_sq: Option<f64>,
    /// `‖w_t‖∞ > R`
    pub region_violation: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub seed: u64,
    pub records: Vec<TraceRecord>,
    /// `w_t` at each record, when requested.
    pub iterates: Option<Vec<Vec<f64>>>,
    /// Number of iterates (recorded or not) outside the region.
    pub region_violations: u64,
    pub final_w: Vec<f64>,
}

fn record(config: &RunConfig, t: u64, w: &[f64]) -> Result<TraceRecord, EngineError> {
    let value = config.objective.value(w).map_err(|source| EngineError::Objective { iteration: t, source })?;
    Ok(TraceRecord {
        t,
        eta: config.schedule.step(t),
        value,
        gap: config.reference.as_ref().map(|r| value - r.f_min),
        distance_sq: config.reference.as_ref().map(|r| r.distance_sq(w)),
        region_violation: linalg::norm_inf(w) > config.region_radius,
    })
}

/// Runs `w_{t+1} = w_t − η_t ∇f_{ξ_t}(w_t)` for `config.iterations` steps.
pub fn sgd_run(config: &RunConfig) -> Result<RunTrace, EngineError> {
    config.validate()?;
    let objective = &config.objective;
    let n = objective.component_count();
    let mut w = config.w0.clone().unwrap_or_else(|| vec![0.0; objective.dim()]);
    let mut grad = vec![0.0; w.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let stride = config.record_stride;

    let capacity = (config.iterations / stride + 1) as usize;
    let mut records = Vec::with_capacity(capacity);
    let mut iterates = config.keep_iterates.then(|| Vec::with_capacity(capacity));
    let mut violations = 0u64;

    for t in 0..=config.iterations {
        if linalg::norm_inf(&w) > config.region_radius {
            violations += 1;
        }
        if t % stride == 0 {
            records.push(record(config, t, &w)?);
            if let Some(it) = iterates.as_mut() {
                it.push(w.clone());
            }
        }
        if t == config.iterations {
            break;
        }
        let eta = config.schedule.step(t);
        let i = rng.random_range(0..n);
        objective
            .component_gradient_into(i, &w, &mut grad)
            .map_err(|source| EngineError::Objective { iteration: t, source })?;
        linalg::axpy(-eta, &grad, &mut w);
        if w.iter().any(|x| !x.is_finite()) {
            return Err(EngineError::NonFinite { iteration: t + 1, eta });
        }
    }

    Ok(RunTrace { seed: config.seed, records, iterates, region_violations: violations, final_w: w })
}
