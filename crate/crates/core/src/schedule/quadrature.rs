//! Adaptive composite trapezoid rule with interval halving.

use super::ScheduleError;

pub const ABS_TOLERANCE: f64 = 1e-8;
pub const MAX_SUBINTERVALS: usize = 1 << 24;

/// `∫_a^b f` to absolute tolerance `tol`.
///
/// Each interval is compared against its two halves; the difference divided
/// by three estimates the halved rule's error, and the interval is accepted
/// when that estimate fits its length-proportional share of `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64, ScheduleError> {
    integrate_capped(f, a, b, tol, MAX_SUBINTERVALS)
}

fn integrate_capped(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_subintervals: usize,
) -> Result<f64, ScheduleError> {
    if a == b {
        return Ok(0.0);
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(ScheduleError::InvalidArgument(format!("bad integration interval [{a}, {b}]")));
    }
    let total = b - a;
    let fa = f(a);
    let fb = f(b);
    // Interval (left, right, f(left), f(right)); seed with a few pieces so a
    // lucky coincidence on the first comparison cannot end the search early.
    let seeds = 16;
    let mut nodes = Vec::with_capacity(seeds + 1);
    nodes.push((a, fa));
    for i in 1..seeds {
        let x = a + total * i as f64 / seeds as f64;
        nodes.push((x, f(x)));
    }
    nodes.push((b, fb));
    let mut stack = Vec::with_capacity(64);
    for pair in nodes.windows(2).rev() {
        stack.push((pair[0].0, pair[1].0, pair[0].1, pair[1].1));
    }

    let mut sum = 0.0;
    let mut intervals = seeds;
    while let Some((l, r, fl, fr)) = stack.pop() {
        let m = 0.5 * (l + r);
        let fm = f(m);
        let coarse = 0.5 * (r - l) * (fl + fr);
        let fine = 0.25 * (r - l) * (fl + 2.0 * fm + fr);
        if !fine.is_finite() {
            return Err(ScheduleError::Quadrature(format!("non-finite integrand near x = {m}")));
        }
        let share = tol * (r - l) / total;
        if (fine - coarse).abs() / 3.0 <= share || m <= l || m >= r {
            sum += fine;
        } else {
            intervals += 1;
            if intervals > max_subintervals {
                return Err(ScheduleError::Quadrature(format!(
                    "more than {max_subintervals} subintervals on [{a}, {b}]"
                )));
            }
            stack.push((m, r, fm, fr));
            stack.push((l, m, fl, fm));
        }
    }
    Ok(sum)
}
