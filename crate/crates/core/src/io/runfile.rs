//! Run files: TOML descriptions of an experiment.
//!
//! ```toml
//! loss = "least_squares"
//! objective = "norm2_squared"
//! lambda = 6.0
//! schedules = ["paper-opt:auto", "power:scale=0.1,h=1"]
//! seeds = [0, 1, 2]
//! epochs = 100
//! out = "results"
//!
//! [dataset]
//! source = "linear"
//! n = 1000
//! d = 10
//! seed = 0
//! feature_var = 3.0
//! noise = 1.0
//! ```
//!
//! `paper-opt:auto` (optionally followed by `,shift=capped`) derives `h` and
//! `β` from the objective's curvature certificate and `L` from its smoothness
//! bound on the region. Relative paths are resolved against the run file's
//! directory.

use super::libsvm::{load_libsvm, LabelMap};
use super::synth::{synthesize, SyntheticKind, SyntheticSpec};
use super::IoError;
use crate::engine::RunConfig;
use crate::objectives::{
    composite_objective, solve_reference, Dataset, Loss, Objective, ReferenceSolution, Regularizer, DEFAULT_TOLERANCE,
};
use crate::omega::OmegaSpec;
use crate::schedule::{ScheduleSpec, Shift};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSource {
    Libsvm {
        path: PathBuf,
        #[serde(default)]
        labels: LabelMap,
    },
    Blobs {
        n: usize,
        d: usize,
        seed: u64,
        separation: f64,
    },
    Linear {
        n: usize,
        d: usize,
        seed: u64,
        feature_var: f64,
        noise: f64,
    },
    Symmetric {
        n: usize,
        d: usize,
        seed: u64,
        sigma: f64,
    },
}

impl DatasetSource {
    pub fn load(&self, base_dir: &Path) -> Result<Dataset, IoError> {
        let spec = |n, d, seed, kind| SyntheticSpec { n, d, seed, kind };
        let synthetic = match *self {
            DatasetSource::Libsvm { ref path, labels } => return load_libsvm(&base_dir.join(path), labels),
            DatasetSource::Blobs { n, d, seed, separation } => spec(n, d, seed, SyntheticKind::Blobs { separation }),
            DatasetSource::Linear { n, d, seed, feature_var, noise } => {
                spec(n, d, seed, SyntheticKind::Linear { feature_var, noise })
            }
            DatasetSource::Symmetric { n, d, seed, sigma } => spec(n, d, seed, SyntheticKind::Symmetric { sigma }),
        };
        Ok(synthesize(&synthetic)?.dataset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossName {
    Logistic,
    LeastSquares,
    Linear,
    Zero,
}

impl From<LossName> for Loss {
    fn from(l: LossName) -> Self {
        match l {
            LossName::Logistic => Loss::Logistic,
            LossName::LeastSquares => Loss::LeastSquares,
            LossName::Linear => Loss::Linear,
            LossName::Zero => Loss::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ObjectiveVariant {
    #[default]
    #[serde(rename = "plain")]
    Plain,
    #[serde(rename = "norm2")]
    Norm2,
    #[serde(rename = "exp_cosh_G")]
    ExpCoshG,
    #[serde(rename = "norm2_squared")]
    Norm2Squared,
}

impl From<ObjectiveVariant> for Regularizer {
    fn from(v: ObjectiveVariant) -> Self {
        match v {
            ObjectiveVariant::Plain => Regularizer::None,
            ObjectiveVariant::Norm2 => Regularizer::Norm2,
            ObjectiveVariant::ExpCoshG => Regularizer::ExpCosh,
            ObjectiveVariant::Norm2Squared => Regularizer::Norm2Squared,
        }
    }
}

fn default_region() -> f64 {
    crate::objectives::DEFAULT_REGION_RADIUS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    pub loss: LossName,
    #[serde(default)]
    pub objective: ObjectiveVariant,
    #[serde(default)]
    pub lambda: f64,
    pub schedules: Vec<String>,
    pub seeds: Vec<u64>,
    pub epochs: u64,
    /// Iterations between records; one epoch when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<u64>,
    pub out: PathBuf,
    #[serde(default = "default_region")]
    pub region: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w0: Option<Vec<f64>>,
    pub dataset: DatasetSource,
}

/// A run file resolved into objects ready for the engine.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub objective: Arc<Objective>,
    pub reference: Option<Arc<ReferenceSolution>>,
    /// `(label, schedule)`; the label is the schedule's canonical text form.
    pub schedules: Vec<(String, ScheduleSpec)>,
    pub seeds: Vec<u64>,
    pub iterations: u64,
    pub stride: u64,
    pub region: f64,
    pub w0: Option<Vec<f64>>,
    pub out: PathBuf,
}

impl Experiment {
    pub fn config(&self, schedule: ScheduleSpec) -> RunConfig {
        RunConfig {
            objective: self.objective.clone(),
            reference: self.reference.clone(),
            schedule,
            seed: self.seeds.first().copied().unwrap_or(0),
            iterations: self.iterations,
            record_stride: self.stride,
            region_radius: self.region,
            w0: self.w0.clone(),
            keep_iterates: false,
        }
    }
}

/// Resolves `paper-opt:auto[,shift=…]` against the objective.
fn resolve_schedule(text: &str, objective: &Objective, region: f64) -> Result<ScheduleSpec, IoError> {
    let Some(rest) = text.trim().strip_prefix("paper-opt:auto") else {
        return Ok(text.parse()?);
    };
    let shift = match rest {
        "" | ",shift=paper" => Shift::Paper,
        ",shift=capped" => Shift::Capped,
        other => return Err(IoError::Config(format!("unexpected options '{other}' after paper-opt:auto"))),
    };
    let cert = objective
        .curvature_certificate()
        .ok_or_else(|| IoError::Config("paper-opt:auto needs an objective with a curvature certificate".into()))?;
    let beta = OmegaSpec::curvature(cert.h, f64::INFINITY, cert.mu).map_err(|e| IoError::Config(e.to_string()))?.beta();
    let l = objective.smoothness_bound(region);
    Ok(ScheduleSpec::paper_optimal(cert.h, beta, l, f64::INFINITY, shift)?)
}

impl RunFile {
    pub fn from_toml_str(text: &str) -> Result<Self, IoError> {
        let rf: RunFile = toml::from_str(text).map_err(|e| IoError::Config(e.to_string()))?;
        rf.check()?;
        Ok(rf)
    }

    pub fn to_toml_string(&self) -> Result<String, IoError> {
        toml::to_string(self).map_err(|e| IoError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| IoError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml_str(&text)
    }

    fn check(&self) -> Result<(), IoError> {
        if self.schedules.is_empty() {
            return Err(IoError::Config("at least one schedule is required".into()));
        }
        for s in &self.schedules {
            if !s.trim().starts_with("paper-opt:auto") {
                s.parse::<ScheduleSpec>()?;
            }
        }
        if self.seeds.is_empty() {
            return Err(IoError::Config("at least one seed is required".into()));
        }
        if self.epochs == 0 {
            return Err(IoError::Config("epochs must be at least 1".into()));
        }
        if self.stride == Some(0) {
            return Err(IoError::Config("stride must be at least 1".into()));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(IoError::Config(format!("lambda must be finite and nonnegative, got {}", self.lambda)));
        }
        if !(self.region > 0.0) {
            return Err(IoError::Config("region must be positive".into()));
        }
        Ok(())
    }

    /// Loads the data, builds the objective, solves for the reference point
    /// when the minimizer is unique, and resolves the schedules.
    pub fn build(&self, base_dir: &Path) -> Result<Experiment, IoError> {
        self.check()?;
        let data = Arc::new(self.dataset.load(base_dir)?);
        let n = data.len() as u64;
        let base = Objective::new(self.loss.into(), data)?;
        let objective = if self.objective == ObjectiveVariant::Plain {
            base
        } else {
            composite_objective(base, self.objective.into(), self.lambda)?
        };
        let reference = if objective.has_unique_minimizer() {
            Some(Arc::new(solve_reference(&objective, DEFAULT_TOLERANCE)?))
        } else {
            None
        };
        let schedules = self
            .schedules
            .iter()
            .map(|s| resolve_schedule(s, &objective, self.region).map(|spec| (spec.to_string(), spec)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Experiment {
            objective: Arc::new(objective),
            reference,
            schedules,
            seeds: self.seeds.clone(),
            iterations: self.epochs * n,
            stride: self.stride.unwrap_or(n),
            region: self.region,
            w0: self.w0.clone(),
            out: base_dir.join(&self.out),
        })
    }
}
