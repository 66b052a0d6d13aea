//! Labeled examples and datasets.

use super::ObjectiveError;

/// Feature vector of one example, either dense or sparse (sorted indices).
#[derive(Debug, Clone, PartialEq)]
pub enum Features {
    Dense(Vec<f64>),
    Sparse { indices: Vec<usize>, values: Vec<f64> },
}

impl Features {
    pub fn sparse(indices: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert_eq!(indices.len(), values.len());
        Features::Sparse { indices, values }
    }

    /// Smallest dimension able to hold these features.
    pub fn required_dim(&self) -> usize {
        match self {
            Features::Dense(v) => v.len(),
            Features::Sparse { indices, .. } => indices.last().map_or(0, |&i| i + 1),
        }
    }

    /// `⟨x, w⟩`. The caller guarantees `required_dim() <= w.len()`.
    #[inline]
    pub fn dot(&self, w: &[f64]) -> f64 {
        match self {
            Features::Dense(v) => crate::linalg::dot(v, w),
            Features::Sparse { indices, values } => {
                indices.iter().zip(values).map(|(&i, &x)| x * w[i]).sum()
            }
        }
    }

    /// `out ← out + alpha · x`
    #[inline]
    pub fn add_scaled_to(&self, alpha: f64, out: &mut [f64]) {
        match self {
            Features::Dense(v) => crate::linalg::axpy(alpha, v, out),
            Features::Sparse { indices, values } => {
                for (&i, &x) in indices.iter().zip(values) {
                    out[i] += alpha * x;
                }
            }
        }
    }

    pub fn norm_sq(&self) -> f64 {
        match self {
            Features::Dense(v) => crate::linalg::norm_sq(v),
            Features::Sparse { values, .. } => crate::linalg::norm_sq(values),
        }
    }

    /// Expands into a dense vector of length `dim`.
    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        match self {
            Features::Dense(v) => {
                let mut out = v.clone();
                out.resize(dim, 0.0);
                out
            }
            Features::Sparse { indices, values } => {
                let mut out = vec![0.0; dim];
                for (&i, &x) in indices.iter().zip(values) {
                    out[i] = x;
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub features: Features,
    pub label: f64,
}

impl LabeledExample {
    pub fn dense(features: Vec<f64>, label: f64) -> Self {
        Self { features: Features::Dense(features), label }
    }
}

/// A finite training set. Every example fits in `dim` dimensions and `n ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    examples: Vec<LabeledExample>,
    dim: usize,
}

impl Dataset {
    pub fn new(examples: Vec<LabeledExample>, dim: usize) -> Result<Self, ObjectiveError> {
        if examples.is_empty() {
            return Err(ObjectiveError::EmptyDataset);
        }
        if dim == 0 {
            return Err(ObjectiveError::InvalidParameter("dataset dimension must be positive".into()));
        }
        for (index, ex) in examples.iter().enumerate() {
            let req = ex.features.required_dim();
            let dense_len = match &ex.features {
                Features::Dense(v) => Some(v.len()),
                Features::Sparse { .. } => None,
            };
            if req > dim || dense_len.is_some_and(|l| l != dim) {
                return Err(ObjectiveError::InvalidExample {
                    index,
                    reason: format!("features need dimension {req}, dataset has {dim}"),
                });
            }
            if !ex.label.is_finite() {
                return Err(ObjectiveError::InvalidExample { index, reason: "non-finite label".into() });
            }
        }
        Ok(Self { examples, dim })
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn example(&self, i: usize) -> &LabeledExample {
        &self.examples[i]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// True when every label is exactly ±1.
    pub fn has_binary_labels(&self) -> bool {
        self.examples.iter().all(|e| e.label == 1.0 || e.label == -1.0)
    }

    pub fn max_feature_norm_sq(&self) -> f64 {
        self.examples.iter().map(|e| e.features.norm_sq()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_and_dense_agree() {
        let sparse = Features::sparse(vec![0, 2], vec![0.5, -2.0]);
        let dense = Features::Dense(vec![0.5, 0.0, -2.0]);
        let w = [1.0, 3.0, 0.25];
        assert_eq!(sparse.dot(&w), dense.dot(&w));
        assert_eq!(sparse.norm_sq(), dense.norm_sq());
        assert_eq!(sparse.to_dense(3), vec![0.5, 0.0, -2.0]);
        let mut a = vec![0.0; 3];
        let mut b = vec![0.0; 3];
        sparse.add_scaled_to(2.0, &mut a);
        dense.add_scaled_to(2.0, &mut b);
        assert_eq!(a, b);
    }

    #[test]
    fn dataset_rejects_out_of_range_features() {
        let ex = LabeledExample { features: Features::sparse(vec![4], vec![1.0]), label: 1.0 };
        assert!(Dataset::new(vec![ex.clone()], 3).is_err());
        assert!(Dataset::new(vec![ex], 5).is_ok());
        assert!(matches!(Dataset::new(vec![], 3), Err(ObjectiveError::EmptyDataset)));
    }
}
