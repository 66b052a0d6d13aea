use super::analysis::{moving_mean, rate_slope_fit, tail_average_series, MOVING_MEAN_WINDOW};
use super::{sgd_run, EngineError, RunConfig, RunTrace};
use rayon::prelude::*;

/// Environment variable capping the number of worker threads in a sweep.
pub const THREADS_ENV: &str = "CURVESGD_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub struct MeanRecord {
    pub t: u64,
    pub eta: f64,
    pub value: f64,
    pub gap: Option<f64>,
    pub distance_sq: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// One trace per seed, in the order the seeds were given.
    pub traces: Vec<RunTrace>,
    pub mean: Vec<MeanRecord>,
    /// Trailing length-3 moving mean of the mean `F` series.
    pub smoothed_value: Vec<f64>,
}

impl SweepResult {
    fn series(&self, pick: impl Fn(&MeanRecord) -> Option<f64>) -> Result<(Vec<u64>, Vec<f64>), EngineError> {
        self.mean
            .iter()
            .map(|r| pick(r).map(|v| (r.t, v)))
            .collect::<Option<Vec<_>>>()
            .map(|v| v.into_iter().unzip())
            .ok_or_else(|| EngineError::InsufficientData("sweep has no reference solution".into()))
    }

    /// `A_t` from the mean `E` series.
    pub fn tail_average(&self, t: u64) -> Result<f64, EngineError> {
        let (times, gaps) = self.series(|r| r.gap)?;
        tail_average_series(&times, &gaps, t)
    }

    /// `(t, A_t)` for every recorded `t ≥ 1` whose window lies inside the trace.
    pub fn tail_averages(&self) -> Result<Vec<(u64, f64)>, EngineError> {
        let (times, gaps) = self.series(|r| r.gap)?;
        let last = times.last().copied().unwrap_or(0);
        times
            .iter()
            .filter(|&&t| t >= 1 && 2 * t <= last)
            .map(|&t| tail_average_series(&times, &gaps, t).map(|a| (t, a)))
            .collect()
    }

    /// Log-log slope of mean `Y_t` over `t ∈ [lo, hi]`.
    pub fn distance_slope(&self, lo: f64, hi: f64) -> Result<f64, EngineError> {
        let (times, ys) = self.series(|r| r.distance_sq)?;
        let pts: Vec<(f64, f64)> = times.iter().zip(ys).map(|(&t, y)| (t as f64, y)).collect();
        rate_slope_fit(&pts, lo, hi)
    }

    /// Log-log slope of mean `E_t` over `t ∈ [lo, hi]`.
    pub fn gap_slope(&self, lo: f64, hi: f64) -> Result<f64, EngineError> {
        let (times, es) = self.series(|r| r.gap)?;
        let pts: Vec<(f64, f64)> = times.iter().zip(es).map(|(&t, e)| (t as f64, e)).collect();
        rate_slope_fit(&pts, lo, hi)
    }
}

/// Worker count from `CURVESGD_THREADS`, if set to a positive integer.
pub fn thread_limit() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse::<usize>().ok().filter(|&n| n > 0)
}

fn mean_of(values: impl Iterator<Item = Option<f64>>, count: usize) -> Option<f64> {
    let mut sum = 0.0;
    for v in values {
        sum += v?;
    }
    Some(sum / count as f64)
}

/// Runs `config` once per seed and averages the traces pointwise.
pub fn multi_seed_sweep(config: &RunConfig, seeds: &[u64]) -> Result<SweepResult, EngineError> {
    if seeds.is_empty() {
        return Err(EngineError::Config("a sweep needs at least one seed".into()));
    }
    config.validate()?;
    let run_all = || -> Vec<Result<RunTrace, EngineError>> {
        seeds
            .par_iter()
            .map(|&seed| {
                let cfg = RunConfig { seed, ..config.clone() };
                sgd_run(&cfg).map_err(|e| EngineError::Seed { seed, source: Box::new(e) })
            })
            .collect()
    };
    let results = match thread_limit() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| EngineError::Config(format!("cannot build thread pool: {e}")))?
            .install(run_all),
        None => run_all(),
    };
    let traces = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let k = traces.len();
    let mean: Vec<MeanRecord> = (0..traces[0].records.len())
        .map(|j| {
            let first = &traces[0].records[j];
            MeanRecord {
                t: first.t,
                eta: first.eta,
                value: traces.iter().map(|tr| tr.records[j].value).sum::<f64>() / k as f64,
                gap: mean_of(traces.iter().map(|tr| tr.records[j].gap), k),
                distance_sq: mean_of(traces.iter().map(|tr| tr.records[j].distance_sq), k),
            }
        })
        .collect();
    let values: Vec<f64> = mean.iter().map(|r| r.value).collect();
    let smoothed_value = moving_mean(&values, MOVING_MEAN_WINDOW);
    Ok(SweepResult { traces, mean, smoothed_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{solve_reference, Dataset, LabeledExample, Loss, Objective};
    use crate::schedule::ScheduleSpec;
    use std::sync::Arc;

    fn config() -> RunConfig {
        let ex = (0..10).map(|i| LabeledExample::dense(vec![1.0, i as f64 / 5.0], i as f64 / 3.0)).collect();
        let obj = Arc::new(Objective::new(Loss::LeastSquares, Arc::new(Dataset::new(ex, 2).unwrap())).unwrap());
        let mut cfg = RunConfig::new(obj.clone(), ScheduleSpec::constant(0.05).unwrap(), 200);
        cfg.reference = Some(Arc::new(solve_reference(&obj, 1e-12).unwrap()));
        cfg.record_stride = 10;
        cfg
    }

    #[test]
    fn single_seed_mean_is_the_trace() {
        let cfg = config();
        let sweep = multi_seed_sweep(&cfg, &[5]).unwrap();
        let trace = &sweep.traces[0];
        for (m, r) in sweep.mean.iter().zip(&trace.records) {
            assert_eq!((m.t, m.value, m.gap, m.distance_sq), (r.t, r.value, r.gap, r.distance_sq));
        }
    }

    #[test]
    fn two_seeds_average_to_midpoint() {
        let cfg = config();
        let sweep = multi_seed_sweep(&cfg, &[1, 2]).unwrap();
        for (j, m) in sweep.mean.iter().enumerate() {
            let (a, b) = (&sweep.traces[0].records[j], &sweep.traces[1].records[j]);
            assert_eq!(m.value, (a.value + b.value) / 2.0);
        }
        assert_eq!(sweep.smoothed_value.len(), sweep.mean.len());
        assert_eq!(sweep.smoothed_value[0], sweep.mean[0].value);
        // Seed order is preserved regardless of scheduling.
        assert_eq!(sweep.traces[0].seed, 1);
        assert_eq!(sweep, multi_seed_sweep(&cfg, &[1, 2]).unwrap());
    }

    #[test]
    fn tail_averages_need_coverage() {
        let sweep = multi_seed_sweep(&config(), &[3]).unwrap();
        assert!(sweep.tail_average(100).is_ok());
        assert!(sweep.tail_average(101).is_err());
        let all = sweep.tail_averages().unwrap();
        assert_eq!(all.last().unwrap().0, 100);
        assert!(multi_seed_sweep(&config(), &[]).is_err());
    }
}
