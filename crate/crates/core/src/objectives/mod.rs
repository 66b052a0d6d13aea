//! Datasets and the objective-function zoo: logistic regression, least
//! squares, a linear loss, and the `‖w‖`, `½‖w‖²` and exp-cosh regularizers,
//! together with analytic smoothness constants and a reference solver.
//!
//! Objectives are immutable after construction and can be shared across threads.

mod data;
mod loss;
mod objective;
mod reference;
mod regularizer;

pub use data::{Dataset, Features, LabeledExample};
pub use loss::{
    least_squares_component, log1p_exp, logistic_component_gradient, logistic_component_value, sigmoid, Loss,
};
pub use objective::{composite_objective, CurvatureCertificate, Objective};
pub use reference::{
    solve_reference, solve_reference_with, ReferenceSolution, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE,
};
pub use regularizer::{regularizer_g_gradient, regularizer_g_value, Regularizer, G_MAX_ABS_COORDINATE};

/// Region radius used for smoothness bounds when none is given.
pub const DEFAULT_REGION_RADIUS: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ObjectiveError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("example {index}: {reason}")]
    InvalidExample { index: usize, reason: String },
    #[error("{0}")]
    InvalidParameter(String),
    #[error("coordinate {index} = {value} exceeds the safe exponent range of G")]
    Overflow { index: usize, value: f64 },
    #[error("objective has no certified unique minimizer")]
    NonUniqueMinimizer,
    #[error("reference solver did not converge after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NonConvergence { iterations: usize, gradient_norm: f64 },
    #[error("non-finite objective value")]
    NonFinite,
}
