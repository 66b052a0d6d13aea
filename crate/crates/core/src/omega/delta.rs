//! Empirical estimate of the minimal ω for an objective.
//!
//! With `a(w) = F(w) − F_min` and `b(w) = ‖w − w_*‖²`, the level profile
//! `ρ(ε̂) = sup{b(w) : a(w) = ε̂}` is estimated by the largest `b` among sampled
//! points whose gap lies in a relative band around `ε̂`. The minimal ω is the
//! least concave majorant of `ρ` (through the origin), made nondecreasing.

use super::OmegaError;
use crate::objectives::{Objective, ReferenceSolution};
use crate::stats;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Relative half-width of the gap band around each grid point.
pub const BAND_HALF_WIDTH: f64 = 0.02;
pub const DEFAULT_SAMPLES: usize = 100_000;

/// Minimum number of populated grid points in the lowest decade for a slope fit.
const MIN_FIT_POINTS: usize = 8;
const GRID_POINTS_PER_DECADE: usize = 10;

type GapFn<'a> = Box<dyn Fn(&[f64]) -> Option<f64> + Send + Sync + 'a>;

/// The pair `(a, b)`; either may decline a point by returning `None`.
pub struct GapFunctions<'a> {
    a: GapFn<'a>,
    b: GapFn<'a>,
}

impl<'a> GapFunctions<'a> {
    pub fn new(
        a: impl Fn(&[f64]) -> Option<f64> + Send + Sync + 'a,
        b: impl Fn(&[f64]) -> Option<f64> + Send + Sync + 'a,
    ) -> Self {
        Self { a: Box::new(a), b: Box::new(b) }
    }

    /// `a = F − F_min` (clamped at 0) and `b = ‖w − w_*‖²`. Points where `F`
    /// cannot be evaluated are skipped.
    pub fn from_objective(objective: &'a Objective, reference: &'a ReferenceSolution) -> Self {
        Self::new(
            move |w| objective.value(w).ok().filter(|v| v.is_finite()).map(|v| (v - reference.f_min).max(0.0)),
            move |w| Some(reference.distance_sq(w)),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampling {
    /// Uniform in the box `center ± radius`.
    Uniform,
    /// A uniform box sample rescaled by `10^{−U·decades}`, `U ~ U(0,1)`, so
    /// that small gaps are populated in several dimensions.
    MultiScale { decades: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRegion {
    pub center: Vec<f64>,
    pub radius: f64,
    pub samples: usize,
    pub seed: u64,
    pub sampling: Sampling,
}

impl SampleRegion {
    pub fn uniform(center: Vec<f64>, radius: f64, seed: u64) -> Self {
        Self { center, radius, samples: DEFAULT_SAMPLES, seed, sampling: Sampling::Uniform }
    }

    /// Draws the sample points; the same seed always yields the same points.
    pub fn draw(&self) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.samples)
            .map(|_| {
                let scale = match self.sampling {
                    Sampling::Uniform => self.radius,
                    Sampling::MultiScale { decades } => self.radius * 10f64.powf(-decades * rng.random::<f64>()),
                };
                self.center.iter().map(|c| c + scale * rng.random_range(-1.0..=1.0)).collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaEstimate {
    pub epsilon_grid: Vec<f64>,
    /// Band maxima; `None` where no sample fell in the band.
    pub rho_values: Vec<Option<f64>>,
    /// Concave, nondecreasing majorant evaluated on the grid.
    pub delta_values: Vec<f64>,
    /// Log-log slope of δ over the lowest populated decade of the grid.
    pub fitted_h: f64,
}

impl DeltaEstimate {
    /// Indices of grid points whose band contained no samples.
    pub fn empty_bands(&self) -> Vec<usize> {
        self.rho_values.iter().enumerate().filter(|(_, r)| r.is_none()).map(|(i, _)| i).collect()
    }
}

/// Vertices of the upper concave hull of `points` (any order), sorted by x.
pub fn upper_concave_envelope(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|p, q| p.0.total_cmp(&q.0).then(q.1.total_cmp(&p.1)));
    sorted.dedup_by(|later, earlier| later.0 == earlier.0);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for p in sorted {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Piecewise-linear interpolation on hull vertices, constant past the last one.
fn eval_hull(hull: &[(f64, f64)], x: f64) -> f64 {
    let last = hull[hull.len() - 1];
    if x >= last.0 {
        return last.1;
    }
    let j = hull.partition_point(|p| p.0 <= x);
    if j == 0 {
        return hull[0].1;
    }
    let (p, q) = (hull[j - 1], hull[j]);
    p.1 + (q.1 - p.1) * (x - p.0) / (q.0 - p.0)
}

pub fn estimate_delta(
    gap: &GapFunctions<'_>,
    region: &SampleRegion,
    epsilon_grid: &[f64],
) -> Result<DeltaEstimate, OmegaError> {
    let pairs = sample_pairs(gap, region)?;
    estimate_from_pairs(pairs, epsilon_grid)
}

fn sample_pairs(gap: &GapFunctions<'_>, region: &SampleRegion) -> Result<Vec<(f64, f64)>, OmegaError> {
    if !(region.radius > 0.0 && region.radius.is_finite()) || region.samples == 0 {
        return Err(OmegaError::Estimation("sample region must have positive radius and samples".into()));
    }
    let points = region.draw();
    let mut pairs: Vec<(f64, f64)> =
        points.par_iter().filter_map(|w| Some(((gap.a)(w)?, (gap.b)(w)?))).collect();
    pairs.retain(|p| p.0.is_finite() && p.1.is_finite());
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(pairs)
}

fn estimate_from_pairs(pairs: Vec<(f64, f64)>, epsilon_grid: &[f64]) -> Result<DeltaEstimate, OmegaError> {
    if epsilon_grid.is_empty() || epsilon_grid.iter().any(|e| !(*e > 0.0)) {
        return Err(OmegaError::Estimation("epsilon grid must be nonempty and positive".into()));
    }
    if epsilon_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(OmegaError::Estimation("epsilon grid must be strictly increasing".into()));
    }
    let rho_values: Vec<Option<f64>> = epsilon_grid
        .iter()
        .map(|&eps| {
            let lo = pairs.partition_point(|p| p.0 < eps * (1.0 - BAND_HALF_WIDTH));
            let hi = pairs.partition_point(|p| p.0 <= eps * (1.0 + BAND_HALF_WIDTH));
            pairs[lo..hi].iter().map(|p| p.1).reduce(f64::max)
        })
        .collect();

    let mut anchors = vec![(0.0, 0.0)];
    anchors.extend(epsilon_grid.iter().zip(&rho_values).filter_map(|(&e, r)| r.map(|r| (e, r))));
    if anchors.len() == 1 {
        return Err(OmegaError::Estimation("no samples fell in any gap band".into()));
    }
    let hull = upper_concave_envelope(&anchors);
    let mut delta_values: Vec<f64> = epsilon_grid.iter().map(|&e| eval_hull(&hull, e)).collect();
    let mut running = 0.0_f64;
    for d in delta_values.iter_mut() {
        running = running.max(*d);
        *d = running;
    }

    let fitted_h = fit_lowest_decade(epsilon_grid, &rho_values, &delta_values)?;
    Ok(DeltaEstimate { epsilon_grid: epsilon_grid.to_vec(), rho_values, delta_values, fitted_h })
}

fn fit_lowest_decade(grid: &[f64], rho: &[Option<f64>], delta: &[f64]) -> Result<f64, OmegaError> {
    let first = rho
        .iter()
        .position(|r| r.is_some())
        .ok_or_else(|| OmegaError::Estimation("no populated bands".into()))?;
    let top = grid[first] * 10.0 * (1.0 + 1e-9);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (first..grid.len())
        .take_while(|&i| grid[i] <= top)
        .filter(|&i| rho[i].is_some() && delta[i] > 0.0)
        .map(|i| (grid[i], delta[i]))
        .unzip();
    if xs.len() < MIN_FIT_POINTS {
        return Err(OmegaError::Estimation(format!(
            "only {} populated grid points in the lowest decade, need {MIN_FIT_POINTS}",
            xs.len()
        )));
    }
    Ok(stats::log_log_slope(&xs, &ys))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureFit {
    /// Fitted exponent clamped to `[0, 1]`.
    pub h: f64,
    pub estimate: DeltaEstimate,
}

/// Fits the curvature exponent of `objective` around its minimizer. The grid
/// spans `[1e-4, 1e-1]` times the largest sampled gap, ten points per decade.
pub fn fit_curvature(
    objective: &Objective,
    reference: &ReferenceSolution,
    region: &SampleRegion,
) -> Result<CurvatureFit, OmegaError> {
    if region.center.len() != objective.dim() {
        return Err(OmegaError::Estimation(format!(
            "region has dimension {}, objective {}",
            region.center.len(),
            objective.dim()
        )));
    }
    let gap = GapFunctions::from_objective(objective, reference);
    let pairs = sample_pairs(&gap, region)?;
    let a_max = pairs.last().map(|p| p.0).unwrap_or(0.0);
    if !(a_max > 0.0) {
        return Err(OmegaError::Estimation("sampled gaps are all zero".into()));
    }
    let grid = stats::log_space(1e-4 * a_max, 1e-1 * a_max, 3 * GRID_POINTS_PER_DECADE + 1);
    let estimate = estimate_from_pairs(pairs, &grid)?;
    Ok(CurvatureFit { h: estimate.fitted_h.clamp(0.0, 1.0), estimate })
}
