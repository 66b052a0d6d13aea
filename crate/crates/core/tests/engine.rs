use curvesgd::benchmarks::{g_benchmark, ridge_benchmark, Benchmark};
use curvesgd::engine::{multi_seed_sweep, recurrence_check, sgd_run, EngineError, RunConfig};
use curvesgd::io::{synthesize_dataset, SyntheticKind, SyntheticSpec};
use curvesgd::objectives::{composite_objective, solve_reference, Loss, Objective, Regularizer, DEFAULT_TOLERANCE};
use curvesgd::schedule::{ScheduleSpec, Shift};
use std::sync::Arc;

fn recurrence_on(objective: Arc<Objective>, region: f64, w0: Vec<f64>, seed: u64) {
    let reference = Arc::new(solve_reference(&objective, DEFAULT_TOLERANCE).unwrap());
    let l = objective.smoothness_bound(region);
    let schedule = ScheduleSpec::paper_optimal(1.0, 1.0, l, f64::INFINITY, Shift::Capped).unwrap();
    let config = RunConfig {
        reference: Some(reference.clone()),
        seed,
        record_stride: 1,
        region_radius: region,
        w0: Some(w0),
        keep_iterates: true,
        ..RunConfig::new(objective.clone(), schedule, 500)
    };
    let trace = sgd_run(&config).unwrap();
    assert_eq!(trace.region_violations, 0);
    let trajectory: Vec<_> = trace.records.iter().map(|r| r.t).zip(trace.iterates.unwrap()).collect();
    let report = recurrence_check(&objective, &reference, l, |t| schedule.step(t), &trajectory).unwrap();
    assert_eq!(report.checked, 501);
    assert_eq!(report.violations, 0, "worst margin {} at t = {}", report.worst_margin, report.worst_t);
}

#[test]
fn recurrence_holds_on_benchmarks() {
    for b in [ridge_benchmark().unwrap(), g_benchmark().unwrap()] {
        let Benchmark { objective, region, w0, .. } = b;
        recurrence_on(objective, region, w0, 11);
    }
}

#[test]
fn recurrence_holds_on_regularized_logistic() {
    let data = Arc::new(
        synthesize_dataset(&SyntheticSpec { n: 30, d: 4, seed: 8, kind: SyntheticKind::Blobs { separation: 1.0 } })
            .unwrap(),
    );
    for reg in [Regularizer::Norm2Squared, Regularizer::ExpCosh] {
        let obj = composite_objective(Objective::new(Loss::Logistic, data.clone()).unwrap(), reg, 0.1).unwrap();
        recurrence_on(Arc::new(obj), 3.0, vec![1.0, -1.0, 0.5, 0.0], 4);
    }
}

#[test]
fn sweep_mean_is_seed_average() {
    let b = ridge_benchmark().unwrap();
    let config = b.config(b.schedule, 2000, 100);
    let sweep = multi_seed_sweep(&config, &[3, 1, 2]).unwrap();
    assert_eq!(sweep.traces.iter().map(|t| t.seed).collect::<Vec<_>>(), [3, 1, 2]);
    for (k, m) in sweep.mean.iter().enumerate() {
        let mean_y = sweep.traces.iter().map(|t| t.records[k].distance_sq.unwrap()).sum::<f64>() / 3.0;
        assert!((m.distance_sq.unwrap() - mean_y).abs() <= 1e-15 * mean_y);
    }
    let single = sgd_run(&RunConfig { seed: 1, ..config }).unwrap();
    assert_eq!(single, sweep.traces[1]);
}

#[test]
fn divergent_step_is_reported() {
    let b = ridge_benchmark().unwrap();
    let config = b.config(ScheduleSpec::constant(10.0).unwrap(), 5000, 100);
    match sgd_run(&config) {
        Err(EngineError::NonFinite { iteration, .. }) => assert!(iteration > 0),
        other => panic!("expected divergence, got {other:?}"),
    }
}
