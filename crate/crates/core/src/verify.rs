//! Self-contained invariant suite behind `curvesgd verify`.
//!
//! Every check draws its inputs from a seeded generator and synthetic data,
//! so the suite needs no files or network access. `quick` shrinks the sample
//! sizes by roughly an order of magnitude.

use crate::engine::{recurrence_check, sgd_run, RunConfig};
use crate::io::{synthesize_dataset, SyntheticKind, SyntheticSpec};
use crate::linalg;
use crate::objectives::{
    composite_objective, regularizer_g_gradient, regularizer_g_value, solve_reference, Loss, Objective,
    ObjectiveError, Regularizer, DEFAULT_TOLERANCE,
};
use crate::omega::{c_alpha, c_alpha_brute_force, v_closed_form, v_numeric, OmegaSpec};
use crate::schedule::{c_bar, c_of_t, m_closed_form, m_quadrature, ode_residual, ScheduleSpec, Shift};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::{Duration, Instant};

/// Slack on the G inequality.
pub const G_INEQUALITY_SLACK: f64 = 1e-12;
/// Relative tolerance between the closed-form and bisected `v(η)`.
pub const V_TOLERANCE: f64 = 1e-8;
/// Absolute tolerance between closed-form and brute-force `c_α`.
pub const C_ALPHA_TOLERANCE: f64 = 1e-4;
pub const ODE_TOLERANCE: f64 = 1e-9;
pub const STEP_MISMATCH_TOLERANCE: f64 = 1e-10;
/// Absolute tolerance between quadrature and closed-form `M(t)`.
pub const M_TOLERANCE: f64 = 1e-6;
/// Relative slack on co-coercivity.
pub const COCOERCIVITY_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VerifyOptions {
    pub quick: bool,
    pub seed: u64,
}


/// Count of samples that broke an inequality, with the worst excess found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViolationCount {
    pub samples: usize,
    pub violations: usize,
    /// Largest `lhs − rhs`; negative when every sample holds strictly.
    pub worst: f64,
}

impl ViolationCount {
    fn new() -> Self {
        Self { samples: 0, violations: 0, worst: f64::NEG_INFINITY }
    }

    fn record(&mut self, excess: f64, slack: f64) {
        self.samples += 1;
        if !(excess <= slack) {
            self.violations += 1;
        }
        if excess > self.worst || excess.is_nan() {
            self.worst = excess;
        }
    }
}

fn box_point(rng: &mut ChaCha8Rng, d: usize, radius: f64) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(-radius..=radius)).collect()
}

/// `G(w) − G(w') − ⟨∇G(w'), w − w'⟩ − ‖w − w'‖⁴/(36d)`, nonnegative on
/// `‖·‖∞ ≤ 3`.
pub fn g_inequality_margin(w: &[f64], w_prime: &[f64]) -> Result<f64, ObjectiveError> {
    if w.len() != w_prime.len() {
        return Err(ObjectiveError::DimensionMismatch { expected: w_prime.len(), found: w.len() });
    }
    let d = w.len() as f64;
    let diff = linalg::sub(w, w_prime);
    let grad = regularizer_g_gradient(w_prime)?;
    let gamma = 1.0 / (36.0 * d);
    Ok(regularizer_g_value(w)? - regularizer_g_value(w_prime)? - linalg::dot(&grad, &diff)
        - gamma * linalg::norm_sq(&diff).powi(2))
}

/// Samples `pairs` uniform pairs in `‖·‖∞ ≤ radius` and counts failures of
/// the G inequality beyond [`G_INEQUALITY_SLACK`].
pub fn g_inequality_check(d: usize, pairs: usize, radius: f64, seed: u64) -> Result<ViolationCount, ObjectiveError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut count = ViolationCount::new();
    for _ in 0..pairs {
        let w = box_point(&mut rng, d, radius);
        let wp = box_point(&mut rng, d, radius);
        count.record(-g_inequality_margin(&w, &wp)?, G_INEQUALITY_SLACK);
    }
    Ok(count)
}

/// Checks `⟨∇f_i(w) − ∇f_i(w'), w − w'⟩ ≥ ‖∇f_i(w) − ∇f_i(w')‖²/L` for
/// random components and pairs in the box of the given radius.
pub fn cocoercivity_check(
    objective: &Objective,
    radius: f64,
    pairs: usize,
    seed: u64,
) -> Result<ViolationCount, ObjectiveError> {
    let l = objective.smoothness_bound(radius);
    if !(l > 0.0 && l.is_finite()) {
        return Err(ObjectiveError::InvalidParameter(format!("no finite smoothness bound on radius {radius}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut count = ViolationCount::new();
    let d = objective.dim();
    for _ in 0..pairs {
        let i = rng.random_range(0..objective.component_count());
        let w = box_point(&mut rng, d, radius);
        let wp = box_point(&mut rng, d, radius);
        let dg = linalg::sub(&objective.component_gradient(i, &w)?, &objective.component_gradient(i, &wp)?);
        let inner = linalg::dot(&dg, &linalg::sub(&w, &wp));
        let lower = linalg::norm_sq(&dg) / l;
        let scale = inner.abs().max(lower).max(1.0);
        count.record((lower - inner) / scale, COCOERCIVITY_SLACK);
    }
    Ok(count)
}

/// Largest relative gap between [`v_closed_form`] and [`v_numeric`] over
/// `h ∈ {0.1, …, 0.9}`, `μ ∈ {0.1, 1, 10}`, `r ∈ {1, 10}` and `etas` step
/// sizes log-spaced on `[1e-4·r, r]`.
pub fn v_grid_max_error(etas: usize) -> Result<f64, crate::omega::OmegaError> {
    let mut worst: f64 = 0.0;
    for hi in 1..=9 {
        let h = hi as f64 / 10.0;
        for mu in [0.1, 1.0, 10.0] {
            for r in [1.0, 10.0] {
                let spec = OmegaSpec::curvature(h, r, mu)?;
                for eta in crate::stats::log_space(1e-4 * r, r, etas) {
                    let closed = v_closed_form(&spec, eta)?;
                    let numeric = v_numeric(&spec, eta)?;
                    worst = worst.max(((closed - numeric) / closed).abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Largest `|c_α − brute force|` over `samples` random `(h, τ, r, μ, α)`
/// with `α ≤ r/2`.
pub fn c_alpha_max_error(samples: usize, grid_points: usize, seed: u64) -> Result<f64, crate::omega::OmegaError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let h = rng.random_range(0.05..=1.0);
        let mu = 10f64.powf(rng.random_range(-1.0..=1.0));
        let r = if rng.random_bool(0.25) { f64::INFINITY } else { 10f64.powf(rng.random_range(-1.0..=1.0)) };
        let tau = if rng.random_bool(0.25) { 0.0 } else { 10f64.powf(rng.random_range(-2.0..=1.0)) };
        let top = if r.is_finite() { r / 2.0 } else { 10.0 };
        let alpha = top * 10f64.powf(rng.random_range(-3.0..=0.0));
        let spec = OmegaSpec::offset(h, r, mu, tau)?;
        let diff = c_alpha(&spec, alpha)? - c_alpha_brute_force(&spec, alpha, grid_points)?;
        worst = worst.max(diff.abs());
    }
    Ok(worst)
}

/// Paper-optimal schedules for `h ∈ {0.25, 0.5, 0.75, 1}` with `β = 1`, `L = 1`.
pub fn reference_schedules() -> Vec<ScheduleSpec> {
    [0.25, 0.5, 0.75, 1.0]
        .iter()
        .map(|&h| ScheduleSpec::paper_optimal(h, 1.0, 1.0, f64::INFINITY, Shift::Paper).expect("valid constants"))
        .collect()
}

/// Worst relative ODE residual and worst step mismatch over `times`.
pub fn ode_max_error(times: &[f64]) -> Result<(f64, f64), crate::schedule::ScheduleError> {
    let mut worst = (0.0f64, 0.0f64);
    for spec in reference_schedules() {
        for &t in times {
            let c = ode_residual(&spec, t)?;
            worst = (worst.0.max(c.relative_residual), worst.1.max(c.step_mismatch));
        }
    }
    Ok(worst)
}

/// Envelope comparison at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeSample {
    pub h: f64,
    pub t: f64,
    pub c: f64,
    pub c_bar: f64,
    pub m_quadrature: f64,
    pub m_closed: f64,
}

pub fn envelope_samples(times: &[f64]) -> Result<Vec<EnvelopeSample>, crate::schedule::ScheduleError> {
    let mut out = Vec::new();
    for spec in reference_schedules() {
        let p = *spec.as_paper_optimal()?;
        let rate = p.rate();
        for &t in times {
            out.push(EnvelopeSample {
                h: p.h,
                t,
                c: c_of_t(&spec, &rate, t)?,
                c_bar: c_bar(&spec, t)?,
                m_quadrature: m_quadrature(&spec, &rate, t)?,
                m_closed: m_closed_form(&p, t),
            });
        }
    }
    Ok(out)
}

/// Ten-component ridge problem used by the recurrence oracle.
pub fn recurrence_problem() -> Result<Objective, crate::io::IoError> {
    let data = synthesize_dataset(&SyntheticSpec {
        n: 10,
        d: 3,
        seed: 7,
        kind: SyntheticKind::Linear { feature_var: 3.0, noise: 0.5 },
    })?;
    Ok(composite_objective(Objective::new(Loss::LeastSquares, Arc::new(data))?, Regularizer::Norm2Squared, 0.5)?)
}

/// Runs `steps` SGD iterations on [`recurrence_problem`] with the capped
/// curvature-optimal schedule and checks the exact one-step recurrence at each.
pub fn recurrence_oracle(steps: u64, seed: u64) -> anyhow::Result<crate::engine::RecurrenceReport> {
    let objective = Arc::new(recurrence_problem()?);
    let reference = Arc::new(solve_reference(&objective, DEFAULT_TOLERANCE)?);
    let radius = 10.0;
    let l = objective.smoothness_bound(radius);
    let cert = objective.curvature_certificate().expect("ridge carries a certificate");
    let beta = OmegaSpec::curvature(cert.h, f64::INFINITY, cert.mu)?.beta();
    let schedule = ScheduleSpec::paper_optimal(cert.h, beta, l, f64::INFINITY, Shift::Capped)?;
    let config = RunConfig {
        objective: objective.clone(),
        reference: Some(reference.clone()),
        schedule,
        seed,
        iterations: steps,
        record_stride: 1,
        region_radius: radius,
        w0: Some(vec![2.0; objective.dim()]),
        keep_iterates: true,
    };
    let trace = sgd_run(&config)?;
    let trajectory: Vec<(u64, Vec<f64>)> =
        trace.records.iter().map(|r| r.t).zip(trace.iterates.unwrap_or_default()).filter(|(t, _)| *t < steps).collect();
    Ok(recurrence_check(&objective, &reference, l, |t| schedule.step(t), &trajectory)?)
}

/// `ω(a(w)) ≥ b(w)` on `λG` with `ω(x) = (2/(μh))x^{1/2}`, `μ = λ/(9d)`,
/// sampled uniformly in `‖w‖∞ ≤ 3`.
pub fn separability_check(d: usize, lambda: f64, samples: usize, seed: u64) -> anyhow::Result<ViolationCount> {
    let objective = Objective::regularizer_only(d, Regularizer::ExpCosh, lambda)?;
    let cert = objective.curvature_certificate().expect("λG carries a certificate");
    let spec = OmegaSpec::curvature(cert.h, f64::INFINITY, cert.mu)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut count = ViolationCount::new();
    for _ in 0..samples {
        let w = box_point(&mut rng, d, 3.0);
        let gap = objective.value(&w)?;
        let dist = linalg::norm_sq(&w);
        let bound = crate::omega::omega_eval(&spec, gap)?;
        count.record((dist - bound) / dist.max(1e-300), 1e-12);
    }
    Ok(count)
}

fn outcome(name: &'static str, start: Instant, result: anyhow::Result<(bool, String)>) -> CheckOutcome {
    let (passed, detail) = result.unwrap_or_else(|e| (false, format!("error: {e:#}")));
    CheckOutcome { name, passed, detail, elapsed: start.elapsed() }
}

fn violations_detail(c: &ViolationCount) -> (bool, String) {
    (c.violations == 0, format!("{} violations in {} samples, worst excess {:.3e}", c.violations, c.samples, c.worst))
}

/// Runs every check and returns one outcome per check, in a fixed order.
pub fn run_all(options: VerifyOptions) -> Vec<CheckOutcome> {
    let scale = if options.quick { 10 } else { 1 };
    let seed = options.seed;
    let mut out = Vec::new();

    let start = Instant::now();
    out.push(outcome(
        "co-coercivity",
        start,
        (|| {
            let mut total = ViolationCount::new();
            for objective in cocoercivity_objectives()? {
                let c = cocoercivity_check(&objective, 3.0, 20_000 / scale, seed)?;
                total.samples += c.samples;
                total.violations += c.violations;
                total.worst = total.worst.max(c.worst);
            }
            Ok(violations_detail(&total))
        })(),
    ));

    let start = Instant::now();
    out.push(outcome(
        "G-inequality",
        start,
        (|| {
            let mut total = ViolationCount::new();
            for d in [1, 2, 5, 10] {
                let c = g_inequality_check(d, 100_000 / scale, 3.0, seed.wrapping_add(d as u64))?;
                total.samples += c.samples;
                total.violations += c.violations;
                total.worst = total.worst.max(c.worst);
            }
            Ok(violations_detail(&total))
        })(),
    ));

    let start = Instant::now();
    out.push(outcome(
        "v closed form vs numeric",
        start,
        (|| {
            let err = v_grid_max_error(20)?;
            Ok((err <= V_TOLERANCE, format!("max relative error {err:.3e} (tolerance {V_TOLERANCE:e})")))
        })(),
    ));

    let start = Instant::now();
    out.push(outcome(
        "c_alpha",
        start,
        (|| {
            let err = c_alpha_max_error(50 / scale.min(5), 200_000 / scale, seed)?;
            Ok((err <= C_ALPHA_TOLERANCE, format!("max |diff| {err:.3e} (tolerance {C_ALPHA_TOLERANCE:e})")))
        })(),
    ));

    let start = Instant::now();
    out.push(outcome(
        "ODE residual",
        start,
        (|| {
            let (res, mismatch) = ode_max_error(&[0.0, 1.0, 10.0, 1e2, 1e3, 1e4, 1e5])?;
            Ok((
                res <= ODE_TOLERANCE && mismatch <= STEP_MISMATCH_TOLERANCE,
                format!("relative residual {res:.3e}, step mismatch {mismatch:.3e}"),
            ))
        })(),
    ));

    let start = Instant::now();
    out.push(outcome(
        "C <= C_bar",
        start,
        (|| {
            let times: &[f64] = if options.quick { &[1.0, 10.0, 1e2, 1e3] } else { &[1.0, 10.0, 1e2, 1e3, 1e4] };
            let samples = envelope_samples(times)?;
            let dominated = samples.iter().all(|s| s.c <= s.c_bar);
            let m_err = samples.iter().map(|s| (s.m_quadrature - s.m_closed).abs()).fold(0.0, f64::max);
            let ratio = samples.iter().map(|s| s.c / s.c_bar).fold(0.0, f64::max);
            Ok((
                dominated && m_err <= M_TOLERANCE,
                format!("max C/C_bar {ratio:.4}, max |M quadrature − closed| {m_err:.3e}"),
            ))
        })(),
    ));

    let start = Instant::now();
    out.push(outcome(
        "recurrence oracle",
        start,
        (|| {
            let r = recurrence_oracle(10_000 / scale as u64, seed)?;
            Ok((
                r.violations == 0 && r.checked > 0,
                format!("{} violations in {} steps, worst margin {:.3e}", r.violations, r.checked, r.worst_margin),
            ))
        })(),
    ));

    let start = Instant::now();
    out.push(outcome(
        "omega separability",
        start,
        (|| {
            let mut total = ViolationCount::new();
            for d in [1, 2, 5] {
                let c = separability_check(d, 1.0, 10_000, seed.wrapping_add(100 + d as u64))?;
                total.samples += c.samples;
                total.violations += c.violations;
                total.worst = total.worst.max(c.worst);
            }
            Ok(violations_detail(&total))
        })(),
    ));

    out
}

/// Smooth convex objectives covered by the co-coercivity check.
pub fn cocoercivity_objectives() -> anyhow::Result<Vec<Objective>> {
    let blobs = Arc::new(synthesize_dataset(&SyntheticSpec {
        n: 50,
        d: 3,
        seed: 1,
        kind: SyntheticKind::Blobs { separation: 2.0 },
    })?);
    let linear = Arc::new(synthesize_dataset(&SyntheticSpec {
        n: 50,
        d: 3,
        seed: 2,
        kind: SyntheticKind::Linear { feature_var: 3.0, noise: 1.0 },
    })?);
    Ok(vec![
        Objective::new(Loss::Logistic, blobs.clone())?,
        composite_objective(Objective::new(Loss::Logistic, blobs.clone())?, Regularizer::ExpCosh, 0.1)?,
        Objective::new(Loss::LeastSquares, linear.clone())?,
        composite_objective(Objective::new(Loss::LeastSquares, linear.clone())?, Regularizer::Norm2Squared, 2.0)?,
        composite_objective(Objective::new(Loss::Linear, linear)?, Regularizer::ExpCosh, 1.0)?,
        Objective::regularizer_only(3, Regularizer::ExpCosh, 1.0)?,
    ])
}
