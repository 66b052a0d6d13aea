use curvesgd::engine::{sgd_run, RunConfig};
use curvesgd::linalg;
use curvesgd::objectives::{composite_objective, Dataset, LabeledExample, Loss, Objective, Regularizer};
use curvesgd::omega::{omega_derivative, omega_eval, v_closed_form, v_numeric, OmegaSpec};
use curvesgd::schedule::{c_bar, c_of_t, m_closed_form, m_of_t, ode_residual, ScheduleSpec, Shift};
use curvesgd::verify::{g_inequality_margin, G_INEQUALITY_SLACK};
use proptest::prelude::*;
use std::sync::Arc;

const D: usize = 3;

fn point(radius: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-radius..radius, D)
}

fn objective_strategy() -> impl Strategy<Value = Objective> {
    let rows = prop::collection::vec((point(2.0), prop::bool::ANY), 1..6);
    (rows, 0usize..5, 0.01f64..2.0).prop_map(|(rows, kind, lambda)| {
        let examples: Vec<_> = rows
            .into_iter()
            .map(|(x, positive)| LabeledExample::dense(x, if positive { 1.0 } else { -1.0 }))
            .collect();
        let data = Arc::new(Dataset::new(examples, D).unwrap());
        let (loss, reg) = match kind {
            0 => (Loss::Logistic, None),
            1 => (Loss::LeastSquares, Some(Regularizer::Norm2Squared)),
            2 => (Loss::Logistic, Some(Regularizer::ExpCosh)),
            3 => (Loss::Linear, Some(Regularizer::ExpCosh)),
            _ => (Loss::Logistic, Some(Regularizer::Norm2)),
        };
        let base = Objective::new(loss, data).unwrap();
        match reg {
            Some(r) => composite_objective(base, r, lambda).unwrap(),
            None => base,
        }
    })
}

fn central_difference(obj: &Objective, w: &[f64], i: usize) -> f64 {
    let h = 1e-5 * w[i].abs().max(1.0);
    let mut plus = w.to_vec();
    let mut minus = w.to_vec();
    plus[i] += h;
    minus[i] -= h;
    (obj.value(&plus).unwrap() - obj.value(&minus).unwrap()) / (2.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gradient_matches_finite_differences(obj in objective_strategy(), w in point(3.0)) {
        // ‖w‖ is not differentiable at the origin.
        prop_assume!(linalg::norm(&w) > 1e-2);
        let g = obj.gradient(&w).unwrap();
        let scale = linalg::norm(&g).max(1.0);
        for (i, gi) in g.iter().enumerate() {
            let fd = central_difference(&obj, &w, i);
            prop_assert!((gi - fd).abs() <= 1e-6 * scale, "coordinate {i}: {gi} vs {fd}");
        }
    }

    #[test]
    fn components_are_cocoercive(obj in objective_strategy(), w in point(3.0), v in point(3.0), pick in 0usize..6) {
        let l = obj.smoothness_bound(3.0);
        prop_assume!(l.is_finite());
        let i = pick % obj.component_count();
        let dg = linalg::sub(&obj.component_gradient(i, &w).unwrap(), &obj.component_gradient(i, &v).unwrap());
        let inner = linalg::dot(&dg, &linalg::sub(&w, &v));
        let lower = linalg::norm_sq(&dg) / l;
        prop_assert!(lower <= inner + 1e-10 * inner.abs().max(1.0), "{lower} > {inner}");
    }

    #[test]
    fn objectives_are_convex(obj in objective_strategy(), w in point(3.0), v in point(3.0)) {
        let fw = obj.value(&w).unwrap();
        let fv = obj.value(&v).unwrap();
        let g = obj.gradient(&w).unwrap();
        let lower = fw + linalg::dot(&g, &linalg::sub(&v, &w));
        prop_assert!(fv >= lower - 1e-10 * fv.abs().max(1.0));
    }

    #[test]
    fn g_inequality_holds_in_the_box(d in 1usize..12, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..=3.0)).collect();
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..=3.0)).collect();
        prop_assert!(g_inequality_margin(&w, &v).unwrap() >= -G_INEQUALITY_SLACK);
    }

    #[test]
    fn omega_is_increasing_concave_and_c1(
        h in 0.05f64..=1.0, r in 0.1f64..10.0, mu in 0.1f64..10.0, tau in 0.0f64..2.0,
        x in 0.0f64..30.0, y in 0.0f64..30.0,
    ) {
        let s = OmegaSpec::offset(h, r, mu, tau).unwrap();
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        let (wl, wh) = (omega_eval(&s, lo).unwrap(), omega_eval(&s, hi).unwrap());
        prop_assert!(wl <= wh);
        let mid = omega_eval(&s, 0.5 * (lo + hi)).unwrap();
        prop_assert!(mid >= 0.5 * (wl + wh) - 1e-12 * wh.abs().max(1.0));
        // The derivative is continuous across the breakpoint r.
        let left = omega_derivative(&s, r * (1.0 - 1e-12)).unwrap();
        let right = omega_derivative(&s, r * (1.0 + 1e-12)).unwrap();
        prop_assert!((left - right).abs() <= 1e-9 * left);
    }

    #[test]
    fn omega_derivative_matches_finite_differences(
        h in 0.05f64..=1.0, r in 0.5f64..10.0, mu in 0.1f64..10.0, x in 0.05f64..20.0,
    ) {
        let s = OmegaSpec::curvature(h, r, mu).unwrap();
        prop_assume!((x - r).abs() > 1e-3);
        let step = 1e-6 * x;
        let fd = (omega_eval(&s, x + step).unwrap() - omega_eval(&s, x - step).unwrap()) / (2.0 * step);
        let d = omega_derivative(&s, x).unwrap();
        prop_assert!((d - fd).abs() <= 1e-7 * d.abs().max(1e-12), "{d} vs {fd}");
    }

    #[test]
    fn v_is_increasing_and_matches_bisection(
        h in 0.1f64..0.95, r in 0.5f64..10.0, mu in 0.1f64..10.0, a in 0.001f64..1.0, b in 0.001f64..1.0,
    ) {
        let s = OmegaSpec::curvature(h, r, mu).unwrap();
        let (lo, hi) = if a < b { (a * r, b * r) } else { (b * r, a * r) };
        let (vl, vh) = (v_closed_form(&s, lo).unwrap(), v_closed_form(&s, hi).unwrap());
        prop_assert!(vl <= vh * (1.0 + 1e-14));
        let numeric = v_numeric(&s, hi).unwrap();
        prop_assert!(((numeric - vh) / vh).abs() <= 1e-8);
    }

    #[test]
    fn schedule_text_round_trips(
        kind in 0usize..3, a in 1e-6f64..10.0, h in 0.01f64..=1.0, beta in 0.01f64..100.0,
        l in 0.01f64..100.0, r in prop::option::of(0.01f64..100.0), capped in prop::bool::ANY,
    ) {
        let spec = match kind {
            0 => ScheduleSpec::constant(a).unwrap(),
            1 => ScheduleSpec::power_law(a, h).unwrap(),
            _ => {
                let shift = if capped { Shift::Capped } else { Shift::Paper };
                ScheduleSpec::paper_optimal(h, beta, l, r.unwrap_or(f64::INFINITY), shift).unwrap()
            }
        };
        let parsed: ScheduleSpec = spec.to_string().parse().unwrap();
        prop_assert_eq!(parsed, spec);
    }

    #[test]
    fn paper_optimal_invariants(
        h in 0.05f64..=1.0, beta in 0.05f64..10.0, l in 0.1f64..50.0, capped in prop::bool::ANY,
        t1 in 0.0f64..1e4, t2 in 0.0f64..1e4,
    ) {
        let shift = if capped { Shift::Capped } else { Shift::Paper };
        let spec = ScheduleSpec::paper_optimal(h, beta, l, f64::INFINITY, shift).unwrap();
        let p = *spec.as_paper_optimal().unwrap();
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(spec.eta(lo).unwrap() >= spec.eta(hi).unwrap());
        prop_assert!(m_closed_form(&p, lo) <= m_closed_form(&p, hi));
        let eta0 = spec.eta(0.0).unwrap();
        match shift {
            Shift::Capped => prop_assert!((eta0 - 0.5 / l).abs() <= 1e-12 * eta0),
            Shift::Paper => prop_assert!(eta0 <= (0.5 / l).powf(1.0 / (2.0 - h)) * (1.0 + 1e-12)),
        }
        let ode = ode_residual(&spec, hi).unwrap();
        prop_assert!(ode.relative_residual <= 1e-9 && ode.step_mismatch <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn variance_integral_is_dominated(h in 0.1f64..=1.0, beta in 0.2f64..5.0, l in 0.5f64..5.0, t in 1.0f64..500.0) {
        let spec = ScheduleSpec::paper_optimal(h, beta, l, f64::INFINITY, Shift::Paper).unwrap();
        let rate = spec.as_paper_optimal().unwrap().rate();
        let c = c_of_t(&spec, &rate, t).unwrap();
        prop_assert!(c >= 0.0 && c <= c_bar(&spec, t).unwrap());
        let m = m_of_t(&spec, &rate, t).unwrap();
        prop_assert!((m - m_closed_form(spec.as_paper_optimal().unwrap(), t)).abs() <= 1e-6);
    }

    #[test]
    fn runs_are_determined_by_config_and_seed(obj in objective_strategy(), seed in any::<u64>(), w0 in point(1.0)) {
        let mut config = RunConfig::new(Arc::new(obj), ScheduleSpec::power_law(0.1, 0.5).unwrap(), 200);
        config.seed = seed;
        config.record_stride = 7;
        config.w0 = Some(w0);
        let a = sgd_run(&config).unwrap();
        let b = sgd_run(&config).unwrap();
        prop_assert_eq!(a.records.len(), 200 / 7 + 1);
        prop_assert_eq!(a, b);
    }
}
