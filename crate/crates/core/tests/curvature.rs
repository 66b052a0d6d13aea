use curvesgd::benchmarks::ridge_benchmark;
use curvesgd::objectives::{solve_reference, Objective, Regularizer, DEFAULT_TOLERANCE};
use curvesgd::omega::{estimate_delta, fit_curvature, GapFunctions, SampleRegion, Sampling};
use curvesgd::stats::log_space;

fn one_dim(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> GapFunctions<'static> {
    GapFunctions::new(move |w| Some(f(w[0])), |w| Some(w[0] * w[0]))
}

#[test]
fn quadratic_plus_quartic_is_strongly_curved_near_zero() {
    let region = SampleRegion::uniform(vec![0.0], 1.0, 5);
    let grid = log_space(1e-5, 1e-2, 31);
    let est = estimate_delta(&one_dim(|w| w.powi(4) + w * w), &region, &grid).unwrap();
    assert!((est.fitted_h - 1.0).abs() < 0.02, "{}", est.fitted_h);
}

#[test]
fn ridge_fit_is_strongly_convex() {
    let b = ridge_benchmark().unwrap();
    let mut region = SampleRegion { samples: 20_000, ..SampleRegion::uniform(b.reference.w_star.clone(), 1.0, 2) };
    region.sampling = Sampling::MultiScale { decades: 4.0 };
    let fit = fit_curvature(&b.objective, &b.reference, &region).unwrap();
    assert!((fit.h - 1.0).abs() <= 0.05, "{}", fit.h);
    assert!(fit.estimate.empty_bands().is_empty());
}

#[test]
fn exp_cosh_regularizer_has_half_curvature() {
    let obj = Objective::regularizer_only(1, Regularizer::ExpCosh, 2.0).unwrap();
    let reference = solve_reference(&obj, DEFAULT_TOLERANCE).unwrap();
    let region = SampleRegion::uniform(vec![0.0], 1.0, 9);
    let fit = fit_curvature(&obj, &reference, &region).unwrap();
    assert!((fit.h - 0.5).abs() <= 0.05, "{}", fit.h);
}

#[test]
fn fitted_exponent_ignores_objective_scale() {
    let base = Objective::regularizer_only(1, Regularizer::ExpCosh, 1.0).unwrap();
    let region = SampleRegion::uniform(vec![0.0], 1.5, 4);
    let fits: Vec<f64> = [0.01, 1.0, 300.0]
        .iter()
        .map(|&s| {
            let obj = base.scaled(s).unwrap();
            let reference = solve_reference(&obj, DEFAULT_TOLERANCE).unwrap();
            fit_curvature(&obj, &reference, &region).unwrap().h
        })
        .collect();
    for h in &fits {
        assert!((h - fits[1]).abs() <= 0.01, "{fits:?}");
    }
}
