//! Curvature-aware stochastic gradient descent.
//!
//! The crate is organised around five pieces:
//!
//! * [`objectives`]: datasets, losses, regularizers (including the exp-cosh
//!   regularizer `G`), smoothness constants and a reference solver;
//! * [`omega`]: the ω-convexity calculus (`ω_{h,r,μ,τ}`, `v(η)`, `c_α`) and
//!   empirical curvature estimation;
//! * [`schedule`]: step-size rules with their rate envelopes `M`, `C`, `C̄`;
//! * [`engine`]: the SGD loop, multi-seed sweeps, tail averages, slope fits
//!   and the exact one-step recurrence oracle;
//! * [`io`]: LIBSVM parsing, synthetic data, run files, CSV and plot output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod engine;
pub mod io;
pub mod linalg;
pub mod objectives;
pub mod omega;
pub mod schedule;
pub mod stats;
pub mod verify;
