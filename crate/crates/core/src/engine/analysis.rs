use super::EngineError;
use crate::stats;

pub const MOVING_MEAN_WINDOW: usize = 3;
pub const MIN_SLOPE_POINTS: usize = 8;

/// Trailing moving mean: entry `i` averages `values[i+1−window ..= i]`, or the
/// available prefix for the first `window − 1` entries.
pub fn moving_mean(values: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    (0..values.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(window);
            let slice = &values[lo..=i];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect()
}

/// `A_t = (1/t) Σ_{i=t+1}^{2t} E_i` over a recorded series.
///
/// `times` must be increasing. With a record stride above one, the mean runs
/// over the records that fall in `(t, 2t]`.
pub fn tail_average_series(times: &[u64], values: &[f64], t: u64) -> Result<f64, EngineError> {
    if t == 0 {
        return Err(EngineError::InsufficientData("tail average needs t ≥ 1".into()));
    }
    let last = times.last().copied().unwrap_or(0);
    if last < 2 * t {
        return Err(EngineError::InsufficientData(format!("trace ends at {last}, tail window needs {}", 2 * t)));
    }
    let window: Vec<f64> =
        times.iter().zip(values).filter(|(&ti, _)| ti > t && ti <= 2 * t).map(|(_, &v)| v).collect();
    if window.is_empty() {
        return Err(EngineError::InsufficientData(format!("no records in ({t}, {}]", 2 * t)));
    }
    Ok(window.iter().sum::<f64>() / window.len() as f64)
}

/// Least-squares slope of `ln value` against `ln t` for the points with
/// `t ∈ [lo, hi]`.
pub fn rate_slope_fit(series: &[(f64, f64)], lo: f64, hi: f64) -> Result<f64, EngineError> {
    let (ts, vs): (Vec<f64>, Vec<f64>) = series.iter().copied().filter(|&(t, _)| t >= lo && t <= hi).unzip();
    if ts.len() < MIN_SLOPE_POINTS {
        return Err(EngineError::InsufficientData(format!(
            "{} points in [{lo}, {hi}], need {MIN_SLOPE_POINTS}",
            ts.len()
        )));
    }
    if ts.iter().chain(&vs).any(|x| !(*x > 0.0)) {
        return Err(EngineError::InsufficientData("slope fit needs positive times and values".into()));
    }
    Ok(stats::log_log_slope(&ts, &vs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moving_mean_examples() {
        assert_eq!(moving_mean(&[2.0; 5], 3), vec![2.0; 5]);
        assert_eq!(moving_mean(&[3.0, 6.0, 9.0, 0.0], 3), vec![3.0, 4.5, 6.0, 5.0]);
        assert!(moving_mean(&[], 3).is_empty());
    }

    #[test]
    fn tail_average_examples() {
        let times: Vec<u64> = (0..=10).collect();
        let ones = vec![1.0; 11];
        assert_eq!(tail_average_series(&times, &ones, 3).unwrap(), 1.0);
        let harmonic: Vec<f64> = times.iter().map(|&i| if i == 0 { 0.0 } else { 1.0 / i as f64 }).collect();
        assert!((tail_average_series(&times, &harmonic, 2).unwrap() - 7.0 / 24.0).abs() < 1e-16);
        assert!(tail_average_series(&times, &ones, 6).is_err());
        assert!(tail_average_series(&times, &ones, 0).is_err());
    }

    #[test]
    fn slope_examples() {
        let grid = stats::log_space(1.0, 1e5, 60);
        let inv: Vec<(f64, f64)> = grid.iter().map(|&t| (t, 1.0 / t)).collect();
        assert!((rate_slope_fit(&inv, 1.0, 1e5).unwrap() + 1.0).abs() < 1e-12);
        let cube: Vec<(f64, f64)> = grid.iter().map(|&t| (t, 5.0 * t.powf(-1.0 / 3.0))).collect();
        assert!((rate_slope_fit(&cube, 1.0, 1e5).unwrap() + 1.0 / 3.0).abs() < 1e-12);
        let mixed: Vec<(f64, f64)> = grid.iter().map(|&t| (t, 1.0 / t + 100.0 / (t * t))).collect();
        assert!((rate_slope_fit(&mixed, 1e3, 1e5).unwrap() + 1.0).abs() < 0.02);
        assert!(rate_slope_fit(&inv, 1e4, 2e4).is_err());
        let neg: Vec<(f64, f64)> = grid.iter().map(|&t| (t, -1.0)).collect();
        assert!(rate_slope_fit(&neg, 1.0, 1e5).is_err());
    }
}
