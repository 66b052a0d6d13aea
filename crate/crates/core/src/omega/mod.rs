//! The ω-convexity calculus.
//!
//! An objective is ω-convex when `ω(F(w) − F_min) ≥ ‖w − w_*‖²` for a strictly
//! increasing concave `ω`. This module implements the family
//!
//! ```text
//!            ⎧ τ + k (x/r)^h                   x ≤ r
//!   ω(x) =   ⎨
//!            ⎩ τ + k + k h (x/r − 1)           x > r   (tangent continuation)
//! ```
//!
//! in its two parameterizations: the curvature form `k = 2/(μh)` (with `τ = 0`
//! by default) and the offset form `k = 2/μ`. With `r = ∞` the breakpoint
//! disappears and `r^h` is absorbed into `μ`, leaving `ω(x) = τ + k x^h`.
//!
//! On top of `ω` it provides `v(η)` (closed form and by numeric inversion of
//! `η = ω(x)/ω'(x) − x`), the doubling constant `c_α`, and the empirical
//! minimal-ω estimator in [`delta`].

pub mod delta;

pub use delta::{
    estimate_delta, fit_curvature, upper_concave_envelope, CurvatureFit, DeltaEstimate, GapFunctions, SampleRegion,
    Sampling, BAND_HALF_WIDTH, DEFAULT_SAMPLES,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OmegaError {
    #[error("invalid ω parameters: {0}")]
    InvalidSpec(String),
    #[error("argument {value} outside the domain {domain}")]
    OutOfDomain { value: f64, domain: &'static str },
    #[error("no closed form for v(η) when τ > 0")]
    NoClosedForm,
    #[error("root of η = ω(x)/ω'(x) − x not bracketed for η = {eta}")]
    RootNotBracketed { eta: f64 },
    #[error("δ estimation failed: {0}")]
    Estimation(String),
    #[error(transparent)]
    Objective(#[from] crate::objectives::ObjectiveError),
}

/// Which of the two ω parameterizations a spec uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parameterization {
    /// `ω_{h,r,μ}`: leading factor `2/(μh)`.
    #[default]
    Curvature,
    /// `ω_{h,r,μ,τ}`: leading factor `2/μ`.
    Offset,
}

/// Parameters `(h, r, μ, τ)` of an ω function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaSpec {
    pub h: f64,
    /// Breakpoint; `f64::INFINITY` selects the pure power law.
    pub r: f64,
    pub mu: f64,
    pub tau: f64,
    pub form: Parameterization,
}

impl OmegaSpec {
    /// `ω_{h,r,μ}` in the curvature form with `τ = 0`.
    pub fn curvature(h: f64, r: f64, mu: f64) -> Result<Self, OmegaError> {
        Self { h, r, mu, tau: 0.0, form: Parameterization::Curvature }.validated()
    }

    /// `ω_{h,r,μ,τ}` in the offset form.
    pub fn offset(h: f64, r: f64, mu: f64, tau: f64) -> Result<Self, OmegaError> {
        Self { h, r, mu, tau, form: Parameterization::Offset }.validated()
    }

    pub fn with_tau(self, tau: f64) -> Result<Self, OmegaError> {
        Self { tau, ..self }.validated()
    }

    fn validated(self) -> Result<Self, OmegaError> {
        if !(self.h > 0.0 && self.h <= 1.0) {
            return Err(OmegaError::InvalidSpec(format!("h = {} not in (0, 1]", self.h)));
        }
        if !(self.r > 0.0) || self.r.is_nan() {
            return Err(OmegaError::InvalidSpec(format!("r = {} must be positive", self.r)));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(OmegaError::InvalidSpec(format!("μ = {} must be positive", self.mu)));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(OmegaError::InvalidSpec(format!("τ = {} must be nonnegative", self.tau)));
        }
        Ok(self)
    }

    /// Leading coefficient `k` of `(x/r)^h`.
    pub fn coefficient(&self) -> f64 {
        match self.form {
            Parameterization::Curvature => 2.0 / (self.mu * self.h),
            Parameterization::Offset => 2.0 / self.mu,
        }
    }

    fn has_breakpoint(&self) -> bool {
        self.r.is_finite()
    }

    /// `x/r`, or `x` itself when `r = ∞`.
    fn scaled(&self, x: f64) -> f64 {
        if self.has_breakpoint() {
            x / self.r
        } else {
            x
        }
    }

    /// `r^h`, or 1 when `r = ∞`.
    fn r_pow_h(&self) -> f64 {
        if self.has_breakpoint() {
            self.r.powf(self.h)
        } else {
            1.0
        }
    }

    /// `β` such that `v(η) = β h η^{1−h}` on the power-law part of `v`;
    /// `(μ/2) h^{−h} (1−h)^{−(1−h)} r^h` in the curvature form.
    pub fn beta(&self) -> f64 {
        let h = self.h;
        // 0^0 = 1 covers h = 1.
        self.r_pow_h() * h.powf(-h) * (1.0 - h).powf(-(1.0 - h)) / (self.coefficient() * h)
    }

    /// Largest `η` for which `v(η) = β h η^{1−h}`: `r (1−h)/h`. Beyond it the
    /// maximizing `x` sits on the linear branch and `v` stays at `1/ω'(r)`.
    pub fn power_law_limit(&self) -> f64 {
        if !self.has_breakpoint() {
            return f64::INFINITY;
        }
        self.r * (1.0 - self.h) / self.h
    }
}

/// `ω(x)` for `x ≥ 0`.
pub fn omega_eval(spec: &OmegaSpec, x: f64) -> Result<f64, OmegaError> {
    if !(x >= 0.0) {
        return Err(OmegaError::OutOfDomain { value: x, domain: "x >= 0" });
    }
    let k = spec.coefficient();
    let u = spec.scaled(x);
    Ok(if !spec.has_breakpoint() || u <= 1.0 {
        spec.tau + k * u.powf(spec.h)
    } else {
        spec.tau + k + k * spec.h * (u - 1.0)
    })
}

/// `ω'(x)` for `x > 0`; `(2/(μr))(x/r)^{h−1}` below `r` in the curvature form.
pub fn omega_derivative(spec: &OmegaSpec, x: f64) -> Result<f64, OmegaError> {
    if !(x > 0.0) {
        return Err(OmegaError::OutOfDomain { value: x, domain: "x > 0" });
    }
    let k = spec.coefficient();
    let u = spec.scaled(x);
    let inner = if spec.has_breakpoint() { 1.0 / spec.r } else { 1.0 };
    Ok(if !spec.has_breakpoint() || u <= 1.0 {
        k * spec.h * u.powf(spec.h - 1.0) * inner
    } else {
        k * spec.h * inner
    })
}

/// `v(η) = β h η^{1−h}` for `τ = 0`, saturating at `1/ω'(r)` once
/// `η > r(1−h)/h` (which only happens inside `(0, r]` when `h > 1/2`).
/// For `h = 1` this is the constant `μr/2` (curvature form).
pub fn v_closed_form(spec: &OmegaSpec, eta: f64) -> Result<f64, OmegaError> {
    if spec.tau != 0.0 {
        return Err(OmegaError::NoClosedForm);
    }
    if !(eta > 0.0 && eta <= spec.r) {
        return Err(OmegaError::OutOfDomain { value: eta, domain: "0 < eta <= r" });
    }
    let h = spec.h;
    let power = spec.beta() * h * eta.powf(1.0 - h);
    if spec.has_breakpoint() {
        let saturated = spec.r / (spec.coefficient() * h);
        Ok(power.min(saturated))
    } else {
        Ok(power)
    }
}

/// `η(x) = ω(x)/ω'(x) − x`, nondecreasing in `x`.
fn eta_of_x(spec: &OmegaSpec, x: f64) -> Result<f64, OmegaError> {
    Ok(omega_eval(spec, x)? / omega_derivative(spec, x)? - x)
}

/// `v(η)` by bisection on `η = ω(x)/ω'(x) − x`, returning `1/ω'(x)`.
/// Uses only [`omega_eval`] and [`omega_derivative`].
pub fn v_numeric(spec: &OmegaSpec, eta: f64) -> Result<f64, OmegaError> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(OmegaError::OutOfDomain { value: eta, domain: "eta > 0" });
    }
    // Past the breakpoint (or everywhere when h = 1) η(x) is constant and so is ω'.
    let flat = |x: f64| spec.h == 1.0 || (spec.has_breakpoint() && x >= spec.r);

    let start = if spec.has_breakpoint() { spec.r.min(1.0) } else { 1.0 };
    let mut hi = start;
    let mut expansions = 0;
    while eta_of_x(spec, hi)? < eta {
        if flat(hi) {
            return Ok(1.0 / omega_derivative(spec, hi)?);
        }
        hi *= 2.0;
        expansions += 1;
        if expansions > 2100 || !hi.is_finite() {
            return Err(OmegaError::RootNotBracketed { eta });
        }
    }
    let mut lo = hi;
    let mut contractions = 0;
    while eta_of_x(spec, lo)? > eta {
        lo *= 0.5;
        contractions += 1;
        if contractions > 2100 || lo == 0.0 {
            return Err(OmegaError::RootNotBracketed { eta });
        }
    }
    if flat(lo) {
        // η(lo) ≤ η on the flat part means every x ≥ lo is admissible.
        return Ok(1.0 / omega_derivative(spec, lo)?);
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eta_of_x(spec, mid)? <= eta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // The supremum of 1/ω' over {x : η(x) ≤ η} is attained at the largest such x.
    Ok(1.0 / omega_derivative(spec, lo)?)
}

/// `c_α = 1 + (2^h − 1)/((τ/k)(r/α)^h + 1)`, i.e. `1 + (2^h−1)/((μτ/2)(r/α)^h + 1)`
/// in the offset form. Requires `0 < α ≤ r/2`.
pub fn c_alpha(spec: &OmegaSpec, alpha: f64) -> Result<f64, OmegaError> {
    if !(alpha > 0.0 && alpha <= spec.r / 2.0) {
        return Err(OmegaError::OutOfDomain { value: alpha, domain: "0 < alpha <= r/2" });
    }
    let k = spec.coefficient();
    let offset = spec.tau / k * spec.scaled(alpha).powf(-spec.h);
    Ok(1.0 + (2.0_f64.powf(spec.h) - 1.0) / (offset + 1.0))
}

/// `sup_{e ≥ α} inf_{x ∈ [α, e]} ω(2x)/ω(x)` on a log grid of `points` values
/// spanning `[α, max(100α, 8r)]`.
pub fn c_alpha_brute_force(spec: &OmegaSpec, alpha: f64, points: usize) -> Result<f64, OmegaError> {
    if !(alpha > 0.0) {
        return Err(OmegaError::OutOfDomain { value: alpha, domain: "alpha > 0" });
    }
    let top = if spec.has_breakpoint() { (100.0 * alpha).max(8.0 * spec.r) } else { 100.0 * alpha };
    let grid = crate::stats::log_space(alpha, top, points.max(2));
    let mut best = f64::NEG_INFINITY;
    let mut running_inf = f64::INFINITY;
    for &x in &grid {
        let ratio = omega_eval(spec, 2.0 * x)? / omega_eval(spec, x)?;
        // inf over [α, e] for e = x
        running_inf = running_inf.min(ratio);
        best = best.max(running_inf);
    }
    Ok(best)
}
