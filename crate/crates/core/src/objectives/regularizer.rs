//! Regularizers, including the exp-cosh regularizer
//! `G(w) = Σ_i (e^{w_i} + e^{−w_i} − 2 − w_i²)`.

use super::ObjectiveError;

/// Largest `|w_i|` accepted by `G`; beyond this `e^{|w_i|}` approaches `f64::MAX`.
pub const G_MAX_ABS_COORDINATE: f64 = 700.0;

// Below this magnitude the per-coordinate terms are summed from their Taylor
// series, avoiding the cancellation in `e^w + e^{-w} - 2 - w²`.
const SERIES_CUTOFF: f64 = 0.5;

fn check_range(w: &[f64]) -> Result<(), ObjectiveError> {
    match w.iter().position(|x| x.abs() > G_MAX_ABS_COORDINATE || x.is_nan()) {
        Some(index) => Err(ObjectiveError::Overflow { index, value: w[index] }),
        None => Ok(()),
    }
}

/// `e^x + e^{-x} - 2 - x² = Σ_{k≥2} 2 x^{2k} / (2k)!`
fn g_term(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        let mut term = 2.0 * x2 * x2 / 24.0;
        let mut sum = 0.0;
        let mut k = 2.0_f64;
        loop {
            sum += term;
            if term <= 1e-18 * sum || term == 0.0 {
                break;
            }
            term *= x2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
            k += 1.0;
        }
        sum
    } else {
        x.exp() + (-x).exp() - 2.0 - x * x
    }
}

/// `e^x - e^{-x} - 2x = Σ_{k≥1} 2 x^{2k+1} / (2k+1)!`
fn g_derivative(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        let mut term = 2.0 * x * x2 / 6.0;
        let mut sum = 0.0;
        let mut k = 1.0_f64;
        loop {
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() || term == 0.0 {
                break;
            }
            term *= x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
            k += 1.0;
        }
        sum
    } else {
        x.exp() - (-x).exp() - 2.0 * x
    }
}

/// `G(w)`. Always nonnegative.
pub fn regularizer_g_value(w: &[f64]) -> Result<f64, ObjectiveError> {
    check_range(w)?;
    Ok(w.iter().map(|&x| g_term(x)).sum())
}

/// `∇G(w)_i = e^{w_i} − e^{−w_i} − 2 w_i`
pub fn regularizer_g_gradient(w: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
    check_range(w)?;
    Ok(w.iter().map(|&x| g_derivative(x)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regularizer {
    None,
    /// `‖w‖`
    Norm2,
    /// `½‖w‖²`, so that `λ·R` adds `λI` to the Hessian.
    Norm2Squared,
    /// The exp-cosh regularizer `G`.
    ExpCosh,
}

impl Regularizer {
    pub fn value(self, w: &[f64]) -> Result<f64, ObjectiveError> {
        match self {
            Regularizer::None => Ok(0.0),
            Regularizer::Norm2 => Ok(crate::linalg::norm(w)),
            Regularizer::Norm2Squared => Ok(0.5 * crate::linalg::norm_sq(w)),
            Regularizer::ExpCosh => regularizer_g_value(w),
        }
    }

    /// `out ← out + scale · ∇R(w)`. `‖w‖` uses the zero subgradient at the origin.
    pub fn add_gradient(self, w: &[f64], scale: f64, out: &mut [f64]) -> Result<(), ObjectiveError> {
        match self {
            Regularizer::None => {}
            Regularizer::Norm2 => {
                let n = crate::linalg::norm(w);
                if n > 0.0 {
                    crate::linalg::axpy(scale / n, w, out);
                }
            }
            Regularizer::Norm2Squared => crate::linalg::axpy(scale, w, out),
            Regularizer::ExpCosh => {
                check_range(w)?;
                for (o, &x) in out.iter_mut().zip(w) {
                    *o += scale * g_derivative(x);
                }
            }
        }
        Ok(())
    }

    /// Hessian spectral-norm bound of `R` on `{‖w‖∞ ≤ radius}`.
    /// `‖w‖` has no such bound near the origin and reports infinity.
    pub fn hessian_bound(self, radius: f64) -> f64 {
        match self {
            Regularizer::None => 0.0,
            Regularizer::Norm2 => f64::INFINITY,
            Regularizer::Norm2Squared => 1.0,
            Regularizer::ExpCosh => radius.exp() + (-radius).exp() - 2.0,
        }
    }

    /// Strictly convex regularizers make every regularized objective have a unique minimizer.
    pub fn is_strictly_convex(self) -> bool {
        matches!(self, Regularizer::Norm2Squared | Regularizer::ExpCosh)
    }

    pub fn name(self) -> &'static str {
        match self {
            Regularizer::None => "plain",
            Regularizer::Norm2 => "norm2",
            Regularizer::Norm2Squared => "norm2_squared",
            Regularizer::ExpCosh => "exp_cosh_G",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "plain" | "none" => Regularizer::None,
            "norm2" => Regularizer::Norm2,
            "norm2_squared" => Regularizer::Norm2Squared,
            "exp_cosh_G" | "exp_cosh_g" | "G" => Regularizer::ExpCosh,
            _ => return None,
        })
    }
}
