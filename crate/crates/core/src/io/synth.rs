//! Seeded synthetic datasets.

use super::IoError;
use crate::objectives::{Dataset, LabeledExample};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticKind {
    /// Two unit-covariance Gaussian blobs with means `±(separation/2)·1/√d`;
    /// even indices are labeled `+1`, odd ones `−1`.
    Blobs { separation: f64 },
    /// `a ~ N(0, (feature_var/d)·I)`, planted `w ~ N(0, I)`,
    /// `b = ⟨a, w⟩ + noise·N(0, 1)`.
    Linear { feature_var: f64, noise: f64 },
    /// `x ~ N(0, σ²I)` drawn `n/2` times, each stored as `(x, +1)` and `(x, −1)`
    /// (first all `+1` copies, then all `−1` copies). Under the linear loss
    /// the component gradients average to zero.
    Symmetric { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub kind: SyntheticKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub dataset: Dataset,
    /// Planted weights of the linear kind.
    pub planted: Option<Vec<f64>>,
}

fn normal_vec(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| scale * Distribution::<f64>::sample(&StandardNormal, rng)).collect()
}

pub fn synthesize(spec: &SyntheticSpec) -> Result<SyntheticData, IoError> {
    if spec.n < 2 || spec.d < 1 {
        return Err(IoError::Config(format!("synthetic data needs n ≥ 2 and d ≥ 1, got n={} d={}", spec.n, spec.d)));
    }
    let positive = |x: f64, name: &str| {
        if x >= 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(IoError::Config(format!("{name} must be finite and nonnegative, got {x}")))
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d = spec.d;
    let (examples, planted) = match spec.kind {
        SyntheticKind::Blobs { separation } => {
            positive(separation, "separation")?;
            let offset = separation / 2.0 / (d as f64).sqrt();
            let ex = (0..spec.n)
                .map(|i| {
                    let y = if i % 2 == 0 { 1.0 } else { -1.0 };
                    let x = normal_vec(&mut rng, d, 1.0).into_iter().map(|z| z + y * offset).collect();
                    LabeledExample::dense(x, y)
                })
                .collect();
            (ex, None)
        }
        SyntheticKind::Linear { feature_var, noise } => {
            positive(feature_var, "feature_var")?;
            positive(noise, "noise")?;
            let w = normal_vec(&mut rng, d, 1.0);
            let sd = (feature_var / d as f64).sqrt();
            let ex = (0..spec.n)
                .map(|_| {
                    let a = normal_vec(&mut rng, d, sd);
                    let eps: f64 = StandardNormal.sample(&mut rng);
                    let b = crate::linalg::dot(&a, &w) + noise * eps;
                    LabeledExample::dense(a, b)
                })
                .collect();
            (ex, Some(w))
        }
        SyntheticKind::Symmetric { sigma } => {
            positive(sigma, "sigma")?;
            if !spec.n.is_multiple_of(2) {
                return Err(IoError::Config("symmetric data needs an even n".into()));
            }
            let xs: Vec<Vec<f64>> = (0..spec.n / 2).map(|_| normal_vec(&mut rng, d, sigma)).collect();
            let ex = [1.0, -1.0]
                .iter()
                .flat_map(|&y| xs.iter().map(move |x| LabeledExample::dense(x.clone(), y)))
                .collect();
            (ex, None)
        }
    };
    Ok(SyntheticData { dataset: Dataset::new(examples, d)?, planted })
}

pub fn synthesize_dataset(spec: &SyntheticSpec) -> Result<Dataset, IoError> {
    Ok(synthesize(spec)?.dataset)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        for kind in [
            SyntheticKind::Blobs { separation: 3.0 },
            SyntheticKind::Linear { feature_var: 1.0, noise: 0.1 },
            SyntheticKind::Symmetric { sigma: 2.0 },
        ] {
            let spec = SyntheticSpec { n: 20, d: 3, seed: 9, kind };
            assert_eq!(synthesize(&spec).unwrap(), synthesize(&spec).unwrap());
            let other = SyntheticSpec { seed: 10, ..spec };
            assert_ne!(synthesize(&spec).unwrap(), synthesize(&other).unwrap());
        }
    }

    #[test]
    fn symmetric_pairs() {
        let spec = SyntheticSpec { n: 6, d: 2, seed: 1, kind: SyntheticKind::Symmetric { sigma: 1.0 } };
        let d = synthesize_dataset(&spec).unwrap();
        for i in 0..3 {
            assert_eq!(d.example(i).features, d.example(i + 3).features);
            assert_eq!((d.example(i).label, d.example(i + 3).label), (1.0, -1.0));
        }
    }

    #[test]
    fn invalid_sizes() {
        let kind = SyntheticKind::Blobs { separation: 1.0 };
        assert!(synthesize(&SyntheticSpec { n: 1, d: 2, seed: 0, kind }).is_err());
        assert!(synthesize(&SyntheticSpec { n: 4, d: 0, seed: 0, kind }).is_err());
        let odd = SyntheticSpec { n: 5, d: 1, seed: 0, kind: SyntheticKind::Symmetric { sigma: 1.0 } };
        assert!(synthesize(&odd).is_err());
    }
}
