//! Per-example losses: logistic, least squares and the linear loss.

use super::data::LabeledExample;
use super::ObjectiveError;

/// `log(1 + e^z)` without overflow for large `|z|`.
#[inline]
pub fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Standard logistic sigmoid, evaluated on the branch that cannot overflow.
#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn check_dim(example: &LabeledExample, w: &[f64]) -> Result<(), ObjectiveError> {
    let need = example.features.required_dim();
    let ok = match &example.features {
        super::data::Features::Dense(v) => v.len() == w.len(),
        super::data::Features::Sparse { .. } => need <= w.len(),
    };
    if ok {
        Ok(())
    } else {
        Err(ObjectiveError::DimensionMismatch { expected: need, found: w.len() })
    }
}

/// `log(1 + exp(−y⟨x, w⟩))`
pub fn logistic_component_value(example: &LabeledExample, w: &[f64]) -> Result<f64, ObjectiveError> {
    check_dim(example, w)?;
    Ok(log1p_exp(-example.label * example.features.dot(w)))
}

/// `−y · σ(−y⟨x, w⟩) · x`
pub fn logistic_component_gradient(
    example: &LabeledExample,
    w: &[f64],
) -> Result<Vec<f64>, ObjectiveError> {
    check_dim(example, w)?;
    let mut g = vec![0.0; w.len()];
    let y = example.label;
    let coef = -y * sigmoid(-y * example.features.dot(w));
    example.features.add_scaled_to(coef, &mut g);
    Ok(g)
}

/// Value and gradient of `(⟨a, w⟩ − b)²`.
pub fn least_squares_component(
    example: &LabeledExample,
    w: &[f64],
) -> Result<(f64, Vec<f64>), ObjectiveError> {
    check_dim(example, w)?;
    let r = example.features.dot(w) - example.label;
    let mut g = vec![0.0; w.len()];
    example.features.add_scaled_to(2.0 * r, &mut g);
    Ok((r * r, g))
}

/// Data-fitting term of a finite-sum objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    /// `log(1 + exp(−y⟨x, w⟩))`, labels ±1.
    Logistic,
    /// `(⟨a, w⟩ − b)²`
    LeastSquares,
    /// `−y⟨x, w⟩`: convex with zero curvature, used to inject gradient noise
    /// into otherwise regularizer-only problems.
    Linear,
    /// No data term; the objective consists of its regularizer alone (`n = 1`).
    Zero,
}

impl Loss {
    pub(crate) fn value(self, example: &LabeledExample, w: &[f64]) -> f64 {
        let z = example.features.dot(w);
        match self {
            Loss::Logistic => log1p_exp(-example.label * z),
            Loss::LeastSquares => {
                let r = z - example.label;
                r * r
            }
            Loss::Linear => -example.label * z,
            Loss::Zero => 0.0,
        }
    }

    /// `out ← out + scale · ∇ℓ(w)`
    pub(crate) fn add_gradient(self, example: &LabeledExample, w: &[f64], scale: f64, out: &mut [f64]) {
        let coef = match self {
            Loss::Logistic => {
                let y = example.label;
                -y * sigmoid(-y * example.features.dot(w))
            }
            Loss::LeastSquares => 2.0 * (example.features.dot(w) - example.label),
            Loss::Linear => -example.label,
            Loss::Zero => return,
        };
        example.features.add_scaled_to(scale * coef, out);
    }

    /// Upper bound on the per-component Hessian spectral norm, valid everywhere.
    pub(crate) fn hessian_bound(self, max_feature_norm_sq: f64) -> f64 {
        match self {
            Loss::Logistic => max_feature_norm_sq / 4.0,
            Loss::LeastSquares => 2.0 * max_feature_norm_sq,
            Loss::Linear | Loss::Zero => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Loss::Logistic => "logistic",
            Loss::LeastSquares => "least_squares",
            Loss::Linear => "linear",
            Loss::Zero => "zero",
        }
    }
}
