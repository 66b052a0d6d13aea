//! Finite-sum objectives `F(w) = (1/n) Σ_i f_i(w)` with
//! `f_i(w) = scale · (ℓ_i(w) + λ R(w))`.

use std::sync::Arc;

use super::data::Dataset;
use super::loss::Loss;
use super::regularizer::Regularizer;
use super::ObjectiveError;

/// Curvature `h` together with the `μ` of `ω(x) = (2/(μh)) x^h`, for
/// objectives where it is known analytically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureCertificate {
    pub h: f64,
    pub mu: f64,
}

/// Immutable objective; cheap to clone (the dataset is shared).
#[derive(Debug, Clone)]
pub struct Objective {
    loss: Loss,
    data: Option<Arc<Dataset>>,
    dim: usize,
    regularizer: Regularizer,
    lambda: f64,
    scale: f64,
}

impl Objective {
    /// Unregularized finite sum over `data`.
    pub fn new(loss: Loss, data: Arc<Dataset>) -> Result<Self, ObjectiveError> {
        if loss == Loss::Zero {
            return Err(ObjectiveError::InvalidParameter(
                "the zero loss has no data; use Objective::regularizer_only".into(),
            ));
        }
        if loss == Loss::Logistic && !data.has_binary_labels() {
            return Err(ObjectiveError::InvalidParameter(
                "logistic loss requires labels in {-1, +1}".into(),
            ));
        }
        Ok(Self { loss, dim: data.dim(), data: Some(data), regularizer: Regularizer::None, lambda: 0.0, scale: 1.0 })
    }

    /// `F(w) = λ R(w)` with a single component.
    pub fn regularizer_only(dim: usize, regularizer: Regularizer, lambda: f64) -> Result<Self, ObjectiveError> {
        if dim == 0 {
            return Err(ObjectiveError::InvalidParameter("dimension must be positive".into()));
        }
        composite_objective(
            Self { loss: Loss::Zero, data: None, dim, regularizer: Regularizer::None, lambda: 0.0, scale: 1.0 },
            regularizer,
            lambda,
        )
    }

    /// The same objective multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self, ObjectiveError> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(ObjectiveError::InvalidParameter(format!("scale factor must be positive, got {factor}")));
        }
        Ok(Self { scale: self.scale * factor, ..self.clone() })
    }

    pub fn loss(&self) -> Loss {
        self.loss
    }

    pub fn regularizer(&self) -> Regularizer {
        self.regularizer
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dataset(&self) -> Option<&Arc<Dataset>> {
        self.data.as_ref()
    }

    pub fn component_count(&self) -> usize {
        self.data.as_ref().map_or(1, |d| d.len())
    }

    fn check(&self, w: &[f64]) -> Result<(), ObjectiveError> {
        if w.len() != self.dim {
            return Err(ObjectiveError::DimensionMismatch { expected: self.dim, found: w.len() });
        }
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<(), ObjectiveError> {
        let n = self.component_count();
        if i >= n {
            return Err(ObjectiveError::InvalidParameter(format!("component {i} out of range (n = {n})")));
        }
        Ok(())
    }

    fn loss_value(&self, i: usize, w: &[f64]) -> f64 {
        match &self.data {
            Some(d) => self.loss.value(d.example(i), w),
            None => 0.0,
        }
    }

    /// `f_i(w)`
    pub fn component_value(&self, i: usize, w: &[f64]) -> Result<f64, ObjectiveError> {
        self.check(w)?;
        self.check_index(i)?;
        let reg = self.regularizer.value(w)?;
        Ok(self.scale * (self.loss_value(i, w) + self.lambda * reg))
    }

    /// Writes `∇f_i(w)` into `out` (overwriting it).
    pub fn component_gradient_into(&self, i: usize, w: &[f64], out: &mut [f64]) -> Result<(), ObjectiveError> {
        self.check(w)?;
        self.check_index(i)?;
        if out.len() != self.dim {
            return Err(ObjectiveError::DimensionMismatch { expected: self.dim, found: out.len() });
        }
        out.fill(0.0);
        if let Some(d) = &self.data {
            self.loss.add_gradient(d.example(i), w, self.scale, out);
        }
        if self.lambda != 0.0 {
            self.regularizer.add_gradient(w, self.scale * self.lambda, out)?;
        }
        Ok(())
    }

    pub fn component_gradient(&self, i: usize, w: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
        let mut g = vec![0.0; self.dim];
        self.component_gradient_into(i, w, &mut g)?;
        Ok(g)
    }

    /// `F(w)`
    pub fn value(&self, w: &[f64]) -> Result<f64, ObjectiveError> {
        self.check(w)?;
        let data_term = match &self.data {
            Some(d) => d.examples().iter().map(|e| self.loss.value(e, w)).sum::<f64>() / d.len() as f64,
            None => 0.0,
        };
        let reg = if self.lambda != 0.0 { self.lambda * self.regularizer.value(w)? } else { 0.0 };
        Ok(self.scale * (data_term + reg))
    }

    /// `∇F(w)`
    pub fn gradient(&self, w: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
        self.check(w)?;
        let mut g = vec![0.0; self.dim];
        if let Some(d) = &self.data {
            let s = self.scale / d.len() as f64;
            for e in d.examples() {
                self.loss.add_gradient(e, w, s, &mut g);
            }
        }
        if self.lambda != 0.0 {
            self.regularizer.add_gradient(w, self.scale * self.lambda, &mut g)?;
        }
        Ok(g)
    }

    /// Strong-convexity constant, when known analytically: `λ` for `(λ/2)‖w‖²`.
    pub fn known_mu(&self) -> Option<f64> {
        match self.regularizer {
            Regularizer::Norm2Squared if self.lambda > 0.0 => Some(self.scale * self.lambda),
            _ => None,
        }
    }

    /// Analytic curvature: `h = 1` with `μ = λ` for `(λ/2)‖w‖²`, and `h = 1/2`
    /// with `μ = λ/(9d)` for `λG` (valid for any convex data term).
    pub fn curvature_certificate(&self) -> Option<CurvatureCertificate> {
        if self.lambda <= 0.0 {
            return None;
        }
        match self.regularizer {
            Regularizer::Norm2Squared => Some(CurvatureCertificate { h: 1.0, mu: self.scale * self.lambda }),
            Regularizer::ExpCosh => Some(CurvatureCertificate {
                h: 0.5,
                mu: self.scale * self.lambda / (9.0 * self.dim as f64),
            }),
            _ => None,
        }
    }

    /// Upper bound `L` on every component's Hessian spectral norm on `{‖w‖∞ ≤ radius}`.
    pub fn smoothness_bound(&self, radius: f64) -> f64 {
        let data = match &self.data {
            Some(d) => self.loss.hessian_bound(d.max_feature_norm_sq()),
            None => 0.0,
        };
        let reg = if self.lambda > 0.0 { self.lambda * self.regularizer.hessian_bound(radius) } else { 0.0 };
        self.scale * (data + reg)
    }

    /// Whether the minimizer is certified unique: a strictly convex regularizer
    /// with `λ > 0`, or least squares with a positive-definite Gram matrix.
    pub fn has_unique_minimizer(&self) -> bool {
        if self.lambda > 0.0 && self.regularizer.is_strictly_convex() {
            return true;
        }
        match (&self.data, self.loss) {
            (Some(d), Loss::LeastSquares) => gram_is_positive_definite(d),
            _ => false,
        }
    }
}

fn gram_is_positive_definite(data: &Dataset) -> bool {
    let d = data.dim();
    let mut gram = vec![0.0; d * d];
    for e in data.examples() {
        let x = e.features.to_dense(d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                gram[i * d + j] += x[i] * x[j];
            }
        }
    }
    let n = data.len() as f64;
    gram.iter_mut().for_each(|v| *v /= n);
    crate::linalg::cholesky_in_place(&mut gram, d)
}

/// `base + λ·regularizer`. The base must not already carry a regularizer.
pub fn composite_objective(base: Objective, regularizer: Regularizer, lambda: f64) -> Result<Objective, ObjectiveError> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(ObjectiveError::InvalidParameter(format!("regularization weight must be >= 0, got {lambda}")));
    }
    if base.regularizer != Regularizer::None && base.lambda != 0.0 {
        return Err(ObjectiveError::InvalidParameter("base objective is already regularized".into()));
    }
    Ok(Objective { regularizer, lambda, ..base })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::data::LabeledExample;

    fn logistic_single(x: Vec<f64>) -> Objective {
        let d = x.len();
        let data = Dataset::new(vec![LabeledExample::dense(x, 1.0)], d).unwrap();
        Objective::new(Loss::Logistic, Arc::new(data)).unwrap()
    }

    #[test]
    fn smoothness_examples() {
        assert_eq!(logistic_single(vec![2.0, 0.0]).smoothness_bound(3.0), 1.0);
        let data = Dataset::new(vec![LabeledExample::dense(vec![1.0], 5.0)], 1).unwrap();
        let ls = Objective::new(Loss::LeastSquares, Arc::new(data)).unwrap();
        assert_eq!(ls.smoothness_bound(0.1), 2.0);
        assert_eq!(ls.smoothness_bound(100.0), 2.0);
        let g = Objective::regularizer_only(3, Regularizer::ExpCosh, 2.0).unwrap();
        assert_eq!(g.smoothness_bound(0.0), 0.0);
        let r = 3.0_f64;
        assert!((g.smoothness_bound(r) - 2.0 * (r.exp() + (-r).exp() - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn ridge_known_mu() {
        let obj = composite_objective(logistic_single(vec![1.0, 1.0]), Regularizer::Norm2Squared, 1e-3).unwrap();
        assert_eq!(obj.known_mu(), Some(1e-3));
        assert_eq!(obj.curvature_certificate(), Some(CurvatureCertificate { h: 1.0, mu: 1e-3 }));
        // Ridge term adds exactly λ to the bound.
        assert!((obj.smoothness_bound(3.0) - (2.0 / 4.0 + 1e-3)).abs() < 1e-15);
    }

    #[test]
    fn g_certificate() {
        let obj = Objective::regularizer_only(10, Regularizer::ExpCosh, 0.9).unwrap();
        let c = obj.curvature_certificate().unwrap();
        assert_eq!(c.h, 0.5);
        assert!((c.mu - 0.01).abs() < 1e-15);
        assert!(obj.known_mu().is_none());
    }

    #[test]
    fn negative_lambda_rejected() {
        assert!(composite_objective(logistic_single(vec![1.0]), Regularizer::ExpCosh, -1.0).is_err());
    }

    #[test]
    fn logistic_requires_binary_labels() {
        let data = Dataset::new(vec![LabeledExample::dense(vec![1.0], 2.0)], 1).unwrap();
        assert!(Objective::new(Loss::Logistic, Arc::new(data.clone())).is_err());
        assert!(Objective::new(Loss::LeastSquares, Arc::new(data)).is_ok());
    }

    #[test]
    fn full_gradient_is_mean_of_components() {
        let data = Dataset::new(
            vec![LabeledExample::dense(vec![1.0, 2.0], 1.0), LabeledExample::dense(vec![-0.5, 0.3], -1.0)],
            2,
        )
        .unwrap();
        let obj = composite_objective(
            Objective::new(Loss::Logistic, Arc::new(data)).unwrap(),
            Regularizer::ExpCosh,
            0.1,
        )
        .unwrap();
        let w = [0.4, -0.7];
        let g = obj.gradient(&w).unwrap();
        let g0 = obj.component_gradient(0, &w).unwrap();
        let g1 = obj.component_gradient(1, &w).unwrap();
        for k in 0..2 {
            assert!((g[k] - 0.5 * (g0[k] + g1[k])).abs() < 1e-15);
        }
        let f = obj.value(&w).unwrap();
        let mean = 0.5 * (obj.component_value(0, &w).unwrap() + obj.component_value(1, &w).unwrap());
        assert!((f - mean).abs() < 1e-15);
    }

    #[test]
    fn uniqueness_certification() {
        let plain = logistic_single(vec![1.0, 0.0]);
        assert!(!plain.has_unique_minimizer());
        let ridge = composite_objective(plain.clone(), Regularizer::Norm2Squared, 1e-3).unwrap();
        assert!(ridge.has_unique_minimizer());
        let norm = composite_objective(plain, Regularizer::Norm2, 1e-3).unwrap();
        assert!(!norm.has_unique_minimizer());
        let data = Dataset::new(
            vec![LabeledExample::dense(vec![1.0, 0.0], 1.0), LabeledExample::dense(vec![0.0, 1.0], 2.0)],
            2,
        )
        .unwrap();
        assert!(Objective::new(Loss::LeastSquares, Arc::new(data)).unwrap().has_unique_minimizer());
        let rank1 = Dataset::new(
            vec![LabeledExample::dense(vec![1.0, 1.0], 1.0), LabeledExample::dense(vec![2.0, 2.0], 2.0)],
            2,
        )
        .unwrap();
        assert!(!Objective::new(Loss::LeastSquares, Arc::new(rank1)).unwrap().has_unique_minimizer());
    }
}
