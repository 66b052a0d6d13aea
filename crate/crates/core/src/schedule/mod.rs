//! Step-size rules and their rate companions.
//!
//! Throughout, `n(x)` is the step used at (continuous) iteration index `x ≥ 0`.
//! For the power law the engine evaluates `η` at `t = x + 1`, so
//! `n(x) = scale·(x+1)^{−1/(2−h)}`; the other families use `n(x) = η_x`.
//!
//! Given a rate function `v`, the contraction exponent is
//! `M(t) = ∫_0^t n(x) v(n(x)) dx` and the variance integral is
//! `C(t) = ∫_0^t exp(M(x) − M(t)) n(x)² dx`. For the curvature-optimal schedule
//! `C̄(t) = c (t+Δ)^{−h/(2−h)}` solves `C̄ = 2n/v(n)` with `n = √(−C̄')`.

pub mod quadrature;
mod text;

use crate::omega::{v_closed_form, OmegaSpec};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScheduleError {
    #[error("invalid schedule: {0}")]
    Invalid(String),
    #[error("cannot parse schedule: {0}")]
    Parse(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("operation requires a curvature-optimal schedule")]
    WrongKind,
}

/// How the curvature-optimal schedule is shifted in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Shift {
    /// `Δ = 2 max{2L, 1/r} / (β(2−h))`, giving `η_0 = min{1/(2L), r}^{1/(2−h)}`.
    #[default]
    Paper,
    /// `Δ = (2/(β(2−h))) max{2L, 1/r}^{2−h}`, giving `η_0 = min{1/(2L), r}`.
    Capped,
}

/// `η_t = (2/(β(2−h)))^{1/(2−h)} (t+Δ)^{−1/(2−h)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaperOptimal {
    pub h: f64,
    pub beta: f64,
    pub l: f64,
    pub r: f64,
    pub shift: Shift,
}

impl PaperOptimal {
    pub fn new(h: f64, beta: f64, l: f64, r: f64) -> Result<Self, ScheduleError> {
        if !(h > 0.0 && h <= 1.0) {
            return Err(ScheduleError::Invalid(format!("h = {h} not in (0, 1]")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(ScheduleError::Invalid(format!("beta = {beta} must be positive")));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(ScheduleError::Invalid(format!("L = {l} must be positive")));
        }
        if !(r > 0.0) || r.is_nan() {
            return Err(ScheduleError::Invalid(format!("r = {r} must be positive")));
        }
        Ok(Self { h, beta, l, r, shift: Shift::Paper })
    }

    pub fn with_shift(self, shift: Shift) -> Self {
        Self { shift, ..self }
    }

    /// `min{1/(2L), r}`
    pub fn step_cap(&self) -> f64 {
        (0.5 / self.l).min(self.r)
    }

    fn prefactor(&self) -> f64 {
        2.0 / (self.beta * (2.0 - self.h))
    }

    pub fn delta(&self) -> f64 {
        let m = (2.0 * self.l).max(1.0 / self.r);
        match self.shift {
            Shift::Paper => self.prefactor() * m,
            Shift::Capped => self.prefactor() * m.powf(2.0 - self.h),
        }
    }

    /// `c` in `C̄(t) = c (t+Δ)^{−h/(2−h)}`:
    /// `(1/h) [1/(2−h)]^{h/(2−h)} (2/β)^{2/(2−h)}`, the fixed point of
    /// `c = (2/(βh)) [c h/(2−h)]^{h/2}`.
    pub fn envelope_constant(&self) -> f64 {
        let h = self.h;
        (1.0 / (2.0 - h)).powf(h / (2.0 - h)) * (2.0 / self.beta).powf(2.0 / (2.0 - h)) / h
    }

    pub fn eta(&self, t: f64) -> f64 {
        let p = 1.0 / (2.0 - self.h);
        self.prefactor().powf(p) * (t + self.delta()).powf(-p)
    }

    /// The rate function this schedule was derived for: `v(η) = βhη^{1−h}`.
    pub fn rate(&self) -> RateFunction {
        RateFunction::Power { beta: self.beta, h: self.h }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleSpec {
    Constant { eta: f64 },
    /// `η_t = scale · t^{−1/(2−h)}`, `t ≥ 1`; `h = 0` is allowed here.
    PowerLaw { scale: f64, h: f64 },
    PaperOptimal(PaperOptimal),
}

impl ScheduleSpec {
    pub fn constant(eta: f64) -> Result<Self, ScheduleError> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(ScheduleError::Invalid(format!("constant step {eta} must be positive")));
        }
        Ok(Self::Constant { eta })
    }

    pub fn power_law(scale: f64, h: f64) -> Result<Self, ScheduleError> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(ScheduleError::Invalid(format!("scale = {scale} must be positive")));
        }
        if !(0.0..=1.0).contains(&h) {
            return Err(ScheduleError::Invalid(format!("h = {h} not in [0, 1]")));
        }
        Ok(Self::PowerLaw { scale, h })
    }

    pub fn paper_optimal(h: f64, beta: f64, l: f64, r: f64, shift: Shift) -> Result<Self, ScheduleError> {
        Ok(Self::PaperOptimal(PaperOptimal::new(h, beta, l, r)?.with_shift(shift)))
    }

    pub fn as_paper_optimal(&self) -> Result<&PaperOptimal, ScheduleError> {
        match self {
            Self::PaperOptimal(p) => Ok(p),
            _ => Err(ScheduleError::WrongKind),
        }
    }

    /// `η_t` in the schedule's own time variable (`t ≥ 1` for the power law).
    pub fn eta(&self, t: f64) -> Result<f64, ScheduleError> {
        match *self {
            Self::Constant { eta } if t >= 0.0 => Ok(eta),
            Self::PowerLaw { scale, h } if t >= 1.0 => Ok(scale * t.powf(-1.0 / (2.0 - h))),
            Self::PaperOptimal(p) if t >= 0.0 => Ok(p.eta(t)),
            _ => Err(ScheduleError::InvalidArgument(format!("t = {t} outside the schedule's domain"))),
        }
    }

    /// `n(x)`: the step at iteration index `x ≥ 0`.
    pub fn step_at(&self, x: f64) -> f64 {
        match *self {
            Self::Constant { eta } => eta,
            Self::PowerLaw { scale, h } => scale * (x + 1.0).powf(-1.0 / (2.0 - h)),
            Self::PaperOptimal(p) => p.eta(x),
        }
    }

    /// The step used by SGD at iteration `k`.
    pub fn step(&self, k: u64) -> f64 {
        self.step_at(k as f64)
    }

    /// `n(x) = a (x+s)^{−p}` for the decaying families.
    fn power_form(&self) -> Option<(f64, f64, f64)> {
        match *self {
            Self::Constant { .. } => None,
            Self::PowerLaw { scale, h } => Some((scale, 1.0, 1.0 / (2.0 - h))),
            Self::PaperOptimal(p) => {
                let e = 1.0 / (2.0 - p.h);
                Some((p.prefactor().powf(e), p.delta(), e))
            }
        }
    }
}

/// The map `η ↦ v(η)` entering `M` and `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateFunction {
    /// `v(η) = βhη^{1−h}`
    Power { beta: f64, h: f64 },
    /// `v(η) = cη`
    Linear { c: f64 },
    /// `v` from an ω spec with `τ = 0`, including its saturation past the breakpoint.
    Omega(OmegaSpec),
}

impl RateFunction {
    pub fn v(&self, eta: f64) -> f64 {
        match *self {
            Self::Power { beta, h } => beta * h * eta.powf(1.0 - h),
            Self::Linear { c } => c * eta,
            Self::Omega(spec) => v_closed_form(&spec, eta).unwrap_or(f64::NAN),
        }
    }
}

/// `∫_{x0}^{x1} coef·(x+s)^{−q} dx`
fn power_integral(coef: f64, s: f64, q: f64, x0: f64, x1: f64) -> f64 {
    if (q - 1.0).abs() < 1e-15 {
        coef * ((x1 + s) / (x0 + s)).ln()
    } else {
        coef * ((x1 + s).powf(1.0 - q) - (x0 + s).powf(1.0 - q)) / (1.0 - q)
    }
}

/// `∫_{x0}^{x1} n v(n) dx` in closed form, when the pair admits one.
fn contraction_closed(spec: &ScheduleSpec, rate: &RateFunction, x0: f64, x1: f64) -> Option<f64> {
    if let ScheduleSpec::Constant { eta } = *spec {
        let v = rate.v(eta);
        return v.is_finite().then_some(eta * v * (x1 - x0));
    }
    let (a, s, p) = spec.power_form()?;
    match *rate {
        RateFunction::Power { beta, h } => Some(power_integral(beta * h * a.powf(2.0 - h), s, p * (2.0 - h), x0, x1)),
        RateFunction::Linear { c } => Some(power_integral(c * a * a, s, 2.0 * p, x0, x1)),
        RateFunction::Omega(_) => None,
    }
}

fn contraction(spec: &ScheduleSpec, rate: &RateFunction, x0: f64, x1: f64) -> Result<f64, ScheduleError> {
    match contraction_closed(spec, rate, x0, x1) {
        Some(m) => Ok(m),
        None => quadrature::integrate(
            |x| {
                let n = spec.step_at(x);
                n * rate.v(n)
            },
            x0,
            x1,
            quadrature::ABS_TOLERANCE,
        ),
    }
}

fn check_time(t: f64) -> Result<(), ScheduleError> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(ScheduleError::InvalidArgument(format!("t = {t} must be finite and nonnegative")))
    }
}

/// `M(t)`: closed form when the schedule/rate pair has one, else quadrature.
pub fn m_of_t(spec: &ScheduleSpec, rate: &RateFunction, t: f64) -> Result<f64, ScheduleError> {
    check_time(t)?;
    contraction(spec, rate, 0.0, t)
}

/// `M(t)` by adaptive trapezoid quadrature only.
pub fn m_quadrature(spec: &ScheduleSpec, rate: &RateFunction, t: f64) -> Result<f64, ScheduleError> {
    check_time(t)?;
    quadrature::integrate(
        |x| {
            let n = spec.step_at(x);
            n * rate.v(n)
        },
        0.0,
        t,
        quadrature::ABS_TOLERANCE,
    )
}

/// `M(t) = (2h/(2−h)) ln((t+Δ)/Δ)` for the curvature-optimal schedule with its own rate.
pub fn m_closed_form(p: &PaperOptimal, t: f64) -> f64 {
    2.0 * p.h / (2.0 - p.h) * (t / p.delta()).ln_1p()
}

/// `C(t) = ∫_0^t exp(M(x) − M(t)) n(x)² dx` by quadrature.
pub fn c_of_t(spec: &ScheduleSpec, rate: &RateFunction, t: f64) -> Result<f64, ScheduleError> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    if contraction_closed(spec, rate, 0.0, 1.0).is_some() {
        let m_t = contraction(spec, rate, 0.0, t)?;
        quadrature::integrate(
            |x| {
                let n = spec.step_at(x);
                let m_x = contraction_closed(spec, rate, 0.0, x).unwrap_or(f64::NAN);
                (m_x - m_t).exp() * n * n
            },
            0.0,
            t,
            quadrature::ABS_TOLERANCE,
        )
    } else {
        let failure = std::cell::RefCell::new(None);
        let value = quadrature::integrate(
            |x| {
                let n = spec.step_at(x);
                match contraction(spec, rate, x, t) {
                    Ok(m) => (-m).exp() * n * n,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        0.0
                    }
                }
            },
            0.0,
            t,
            quadrature::ABS_TOLERANCE,
        )?;
        match failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(value),
        }
    }
}

/// `C̄(t) = c (t+Δ)^{−h/(2−h)}`
pub fn c_bar(spec: &ScheduleSpec, t: f64) -> Result<f64, ScheduleError> {
    let p = spec.as_paper_optimal()?;
    check_time(t)?;
    Ok(p.envelope_constant() * (t + p.delta()).powf(-p.h / (2.0 - p.h)))
}

/// `C̄'(t)`
pub fn c_bar_derivative(spec: &ScheduleSpec, t: f64) -> Result<f64, ScheduleError> {
    let p = spec.as_paper_optimal()?;
    check_time(t)?;
    let e = p.h / (2.0 - p.h);
    Ok(-e * p.envelope_constant() * (t + p.delta()).powf(-e - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeCheck {
    /// `C̄(t) − 2n/v(n)` with `n = √(−C̄'(t))`
    pub residual: f64,
    /// `|residual| / C̄(t)`
    pub relative_residual: f64,
    pub n: f64,
    pub eta: f64,
    /// `|n − η_t| / η_t`
    pub step_mismatch: f64,
}

pub fn ode_residual(spec: &ScheduleSpec, t: f64) -> Result<OdeCheck, ScheduleError> {
    let p = spec.as_paper_optimal()?;
    let cb = c_bar(spec, t)?;
    let n = (-c_bar_derivative(spec, t)?).sqrt();
    let v = p.rate().v(n);
    let residual = cb - 2.0 * n / v;
    let eta = p.eta(t);
    Ok(OdeCheck { residual, relative_residual: residual.abs() / cb, n, eta, step_mismatch: (n - eta).abs() / eta })
}

/// Constants of the expected-distance bound:
/// `A = (2N+1) exp(n(0))`, `B = (2N+1) exp(M(1)) n(0)² + E[Y_0]`.
pub fn envelope_constants(spec: &ScheduleSpec, noise: f64, initial_distance_sq: f64) -> Result<(f64, f64), ScheduleError> {
    let p = spec.as_paper_optimal()?;
    let n0 = p.eta(0.0);
    let a = (2.0 * noise + 1.0) * n0.exp();
    let b = (2.0 * noise + 1.0) * m_closed_form(p, 1.0).exp() * n0 * n0 + initial_distance_sq;
    Ok((a, b))
}

/// `A·C̄(t) + B·exp(−M(t))`
pub fn rate_bound(spec: &ScheduleSpec, a: f64, b: f64, t: f64) -> Result<f64, ScheduleError> {
    if !(a >= 0.0 && b >= 0.0) {
        return Err(ScheduleError::InvalidArgument("A and B must be nonnegative".into()));
    }
    let p = spec.as_paper_optimal()?;
    Ok(a * c_bar(spec, t)? + b * (-m_closed_form(p, t)).exp())
}

/// First `t` in `grid` where `C(t) ≥ C̄(t)/2`.
pub fn crossover(spec: &ScheduleSpec, grid: &[f64]) -> Result<Option<f64>, ScheduleError> {
    let p = spec.as_paper_optimal()?;
    let rate = p.rate();
    for &t in grid {
        if c_of_t(spec, &rate, t)? >= 0.5 * c_bar(spec, t)? {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// One row of `η_t, M(t), C(t), C̄(t), exp(−M(t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeRow {
    pub t: f64,
    pub eta: f64,
    pub m: f64,
    pub c: f64,
    /// Present for curvature-optimal schedules only.
    pub c_bar: Option<f64>,
    pub exp_neg_m: f64,
}

/// Tabulates the rate envelope at the given times (iteration indices).
pub fn rate_envelope(spec: &ScheduleSpec, rate: &RateFunction, times: &[f64]) -> Result<Vec<EnvelopeRow>, ScheduleError> {
    times
        .iter()
        .map(|&t| {
            let m = m_of_t(spec, rate, t)?;
            Ok(EnvelopeRow {
                t,
                eta: spec.step_at(t),
                m,
                c: c_of_t(spec, rate, t)?,
                c_bar: c_bar(spec, t).ok(),
                exp_neg_m: (-m).exp(),
            })
        })
        .collect()
}
