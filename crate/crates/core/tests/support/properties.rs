//! Invariants of every module as named, deterministic property runs.
//!
//! Each entry drives a seeded `proptest` runner, so the same cases run under
//! `cargo test` and inside the acceptance suite.

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thirdway_core::verification::crps;
use thirdway_core::{
    event_probability, fit_linear_model, is_relevant, leakage, prediction_table, relevance_curve, skill,
    synthesize_column, verify, Dataset, DiscreteDistribution, Error, FeasibilityBounds, FittedModel, HalfNormal,
    LocationScaleT, ModelSpec, PredictiveDistribution, Provenance, Scenario, ThresholdEvent, VariableName,
};

pub type Property = (&'static str, fn(u32) -> Result<(), String>);

/// Every property with its name.
pub fn all() -> Vec<Property> {
    vec![
        ("predictive CDF is monotone", predictive_cdf_monotone),
        ("affine response maps the predictive", affine_response_consistency),
        ("linear function of a predictor is singular", linear_predictor_is_singular),
        ("exceedance is monotone in the threshold", monotone_exceedance),
        ("table cells equal standalone queries", table_query_coherence),
        ("table events partition the line", table_partition),
        ("excluded variable gives a flat curve at the baseline", excluded_variable_is_flat),
        ("baseline equals the reduced-model query", baseline_exactness),
        ("zero-coefficient predictor: constant location, symmetric curve", zero_coefficient_curve),
        ("leakage is a probability and grows as bounds shrink", leakage_bounded_and_monotone),
        ("CRPS is proper on discrete supports", crps_propriety),
        ("CRPS is translation equivariant", crps_translation),
        ("CRPS is scale equivariant", crps_scale),
        ("skill is 1 - x/c and strictly decreasing", skill_exact_and_decreasing),
        ("report means recompute from observations", report_means_recompute),
        ("synthesized column is nonnegative and reproducible", synthesize_nonnegative_reproducible),
    ]
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn name(s: &str) -> VariableName {
    VariableName::new(s).unwrap()
}

fn fail(e: Error) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

/// Noisy linear data `y = b0 + Σ bj xj + e` with named columns `y, x1, .., xk`.
fn regression_data(seed: u64, n: usize, k: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coef: Vec<f64> = (0..=k).map(|_| rng.random_range(-2.0..2.0)).collect();
    let rows = (0..n)
        .map(|_| {
            let xs: Vec<f64> = (0..k).map(|_| rng.random_range(-3.0..3.0)).collect();
            let y = coef[0] + xs.iter().zip(&coef[1..]).map(|(x, b)| x * b).sum::<f64>() + rng.random_range(-1.0..1.0);
            std::iter::once(y).chain(xs).collect()
        })
        .collect();
    let mut schema = vec![name("y")];
    schema.extend((1..=k).map(|j| name(&format!("x{j}"))));
    Dataset::new(schema, rows).unwrap()
}

fn spec_for(k: usize) -> ModelSpec {
    ModelSpec::new(name("y"), (1..=k).map(|j| name(&format!("x{j}"))).collect(), true).unwrap()
}

fn scenario_for(k: usize, values: &[f64]) -> Scenario {
    (1..=k).map(|j| (name(&format!("x{j}")), values[j - 1])).collect()
}

/// A fitted model on random data and a scenario for it.
fn fitted() -> impl Strategy<Value = (FittedModel, Scenario)> {
    (any::<u64>(), 6usize..20, 0usize..3, prop::array::uniform2(-4.0f64..4.0)).prop_map(|(seed, n, k, x)| {
        let data = regression_data(seed, n, k);
        let model = fit_linear_model(&data, &spec_for(k)).unwrap();
        (model, scenario_for(k, &x))
    })
}

fn location_scale_t() -> impl Strategy<Value = LocationScaleT> {
    (-10.0f64..10.0, 0.05f64..5.0, 1.5f64..60.0).prop_map(|(l, s, v)| LocationScaleT::new(l, s, v).unwrap())
}

fn discrete() -> impl Strategy<Value = DiscreteDistribution> {
    prop::collection::vec((-5i32..5, 1u32..10), 1..6).prop_filter_map("distinct support", |pairs| {
        let mut values: Vec<f64> = pairs.iter().map(|(v, _)| *v as f64).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        if values.len() != pairs.len() {
            return None;
        }
        let total: u32 = pairs.iter().map(|(_, w)| w).sum();
        let probs = pairs.iter().map(|(_, w)| *w as f64 / total as f64).collect();
        DiscreteDistribution::new(pairs.iter().map(|(v, _)| *v as f64).collect(), probs).ok()
    })
}

pub fn predictive_cdf_monotone(cases: u32) -> Result<(), String> {
    let grid = prop::collection::vec(-20.0f64..20.0, 2..40);
    run(cases, (fitted(), grid), |((model, sc), mut grid)| {
        let dist = model.predictive(&sc).map_err(fail)?;
        grid.sort_by(f64::total_cmp);
        for w in grid.windows(2) {
            prop_assert!(dist.cdf(w[0]) <= dist.cdf(w[1]), "cdf({}) > cdf({})", w[0], w[1]);
        }
        Ok(())
    })
}

pub fn affine_response_consistency(cases: u32) -> Result<(), String> {
    let params = (any::<u64>(), 6usize..20, 1usize..3, 0.1f64..10.0, -10.0f64..10.0, -5.0f64..5.0, -3.0f64..3.0);
    run(cases, params, |(seed, n, k, a, b, t, x)| {
        let data = regression_data(seed, n, k);
        let y = data.column("y").unwrap();
        let rows = (0..n)
            .map(|i| {
                let mut r = data.row(i).to_vec();
                r.push(a * y[i] + b);
                r
            })
            .collect();
        let mut schema = data.schema().to_vec();
        schema.push(name("y2"));
        let scaled = Dataset::new(schema, rows).unwrap();
        let spec = spec_for(k);
        let spec2 = ModelSpec::new(name("y2"), spec.predictors().to_vec(), true).unwrap();
        let sc = scenario_for(k, &[x, -x]);
        let d1 = fit_linear_model(&scaled, &spec).map_err(fail)?.predictive(&sc).map_err(fail)?;
        let d2 = fit_linear_model(&scaled, &spec2).map_err(fail)?.predictive(&sc).map_err(fail)?;
        prop_assert!((d2.sf(a * t + b) - d1.sf(t)).abs() <= 1e-9);
        Ok(())
    })
}

pub fn linear_predictor_is_singular(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 6usize..20, -5.0f64..5.0, 0.1f64..5.0), |(seed, n, c0, c1)| {
        let data = regression_data(seed, n, 1);
        let x = data.column("x1").unwrap();
        let data = data.with_column(name("lin"), x.iter().map(|v| c0 + c1 * v).collect()).unwrap();
        let spec = ModelSpec::new(name("y"), vec![name("x1"), name("lin")], true).unwrap();
        let result = fit_linear_model(&data, &spec);
        prop_assert!(matches!(result, Err(Error::Singular { .. })), "got {result:?}");
        Ok(())
    })
}

pub fn monotone_exceedance(cases: u32) -> Result<(), String> {
    run(cases, (fitted(), -20.0f64..20.0, 0.0f64..10.0), |((model, sc), y1, gap)| {
        let dist = model.predictive(&sc).map_err(fail)?;
        let p1 = event_probability(&dist, &ThresholdEvent::exceedance(y1).unwrap()).map_err(fail)?;
        let p2 = event_probability(&dist, &ThresholdEvent::exceedance(y1 + gap).unwrap()).map_err(fail)?;
        prop_assert!(p1 >= p2);
        Ok(())
    })
}

fn grid(lo: f64, len: usize, step: f64) -> Vec<f64> {
    (0..len).map(|i| lo + step * i as f64).collect()
}

fn three_events(a: f64, b: f64) -> Vec<ThresholdEvent> {
    vec![
        ThresholdEvent::below(a).unwrap(),
        ThresholdEvent::interval(a, b).unwrap(),
        ThresholdEvent::exceedance(b).unwrap(),
    ]
}

fn two_predictor_model(seed: u64, n: usize) -> FittedModel {
    fit_linear_model(&regression_data(seed, n, 2), &spec_for(2)).unwrap()
}

pub fn table_query_coherence(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 6usize..20, 1usize..5, 1usize..5, -2.0f64..2.0), |(seed, n, nr, nc, a)| {
        let model = two_predictor_model(seed, n);
        let (rows, cols) = (grid(-2.0, nr, 0.7), grid(-1.0, nc, 1.1));
        let events = three_events(a, a + 1.0);
        let table = prediction_table(&model, (&name("x1"), &rows), (&name("x2"), &cols), &events, &Scenario::new())
            .map_err(fail)?;
        for (i, r) in rows.iter().enumerate() {
            for (j, c) in cols.iter().enumerate() {
                let dist = model.predictive(&scenario_for(2, &[*r, *c])).map_err(fail)?;
                for (e, ev) in events.iter().enumerate() {
                    let direct = event_probability(&dist, ev).map_err(fail)?;
                    prop_assert_eq!(table.cell(i, j, e).to_bits(), direct.to_bits());
                }
            }
        }
        Ok(())
    })
}

pub fn table_partition(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 6usize..20, -3.0f64..3.0, 0.01f64..3.0), |(seed, n, a, width)| {
        let model = two_predictor_model(seed, n);
        let (rows, cols) = (grid(-3.0, 4, 2.0), grid(-3.0, 4, 2.0));
        let table =
            prediction_table(&model, (&name("x1"), &rows), (&name("x2"), &cols), &three_events(a, a + width), &Scenario::new())
                .map_err(fail)?;
        for i in 0..rows.len() {
            for j in 0..cols.len() {
                let total: f64 = (0..3).map(|e| table.cell(i, j, e)).sum();
                prop_assert!((total - 1.0).abs() <= 1e-9, "cell ({i}, {j}) sums to {total}");
                prop_assert!((0..3).all(|e| (0.0..=1.0).contains(&table.cell(i, j, e))));
            }
        }
        Ok(())
    })
}

pub fn excluded_variable_is_flat(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 6usize..20, -3.0f64..3.0, -3.0f64..3.0), |(seed, n, x, t)| {
        let data = regression_data(seed, n, 2);
        let model = fit_linear_model(&data, &spec_for(1)).map_err(fail)?;
        let fixed = scenario_for(1, &[x]);
        let event = ThresholdEvent::exceedance(t).unwrap();
        let curve = relevance_curve(&model, &name("x2"), &grid(-3.0, 13, 0.5), &fixed, &event, Some(&model))
            .map_err(fail)?;
        let baseline = curve.baseline.unwrap();
        prop_assert!(curve.probabilities.iter().all(|p| p.to_bits() == baseline.to_bits()));
        prop_assert!(!is_relevant(&curve, 0.0).relevant);
        Ok(())
    })
}

pub fn baseline_exactness(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 6usize..20, -3.0f64..3.0, -3.0f64..3.0), |(seed, n, x, t)| {
        let data = regression_data(seed, n, 2);
        let full = fit_linear_model(&data, &spec_for(2)).map_err(fail)?;
        let reduced = fit_linear_model(&data, &spec_for(1)).map_err(fail)?;
        let fixed = scenario_for(1, &[x]);
        let event = ThresholdEvent::exceedance(t).unwrap();
        let curve =
            relevance_curve(&full, &name("x2"), &grid(-2.0, 5, 1.0), &fixed, &event, Some(&reduced)).map_err(fail)?;
        let direct = event_probability(&reduced.predictive(&fixed).map_err(fail)?, &event).map_err(fail)?;
        prop_assert_eq!(curve.baseline.map(f64::to_bits), Some(direct.to_bits()));
        Ok(())
    })
}

/// Data where `w` is orthogonal to the intercept, `x` and `y`, so its fitted
/// coefficient is zero and its mean is zero.
fn orthogonal_data(seed: u64, n: usize) -> Dataset {
    let base = regression_data(seed, n, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let ones = vec![1.0; n];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in [ones, base.column("x1").unwrap(), base.column("y").unwrap()] {
        let mut u = v;
        for b in &basis {
            let c: f64 = u.iter().zip(b).map(|(a, b)| a * b).sum();
            u.iter_mut().zip(b).for_each(|(a, b)| *a -= c * b);
        }
        let norm = u.iter().map(|a| a * a).sum::<f64>().sqrt();
        u.iter_mut().for_each(|a| *a /= norm);
        basis.push(u);
    }
    // Two Gram-Schmidt passes keep the residual projections at rounding level.
    for _ in 0..2 {
        for b in &basis {
            let c: f64 = w.iter().zip(b).map(|(a, b)| a * b).sum();
            w.iter_mut().zip(b).for_each(|(a, b)| *a -= c * b);
        }
    }
    base.with_column(name("w"), w).unwrap()
}

pub fn zero_coefficient_curve(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 8usize..20, -2.0f64..2.0, -3.0f64..3.0), |(seed, n, x, t)| {
        let data = orthogonal_data(seed, n);
        let spec = ModelSpec::new(name("y"), vec![name("x1"), name("w")], true).unwrap();
        let model = fit_linear_model(&data, &spec).map_err(fail)?;
        let g = grid(-2.0, 21, 0.2);
        let mut locations = Vec::new();
        for w in &g {
            let PredictiveDistribution::StudentT(d) =
                model.predictive(&Scenario::new().with(name("x1"), x).with(name("w"), *w)).map_err(fail)?
            else {
                unreachable!()
            };
            locations.push(d.location);
        }
        prop_assert!(locations.iter().all(|l| (l - locations[0]).abs() <= 1e-9), "{locations:?}");
        let fixed = scenario_for(1, &[x]);
        let event = ThresholdEvent::exceedance(t).unwrap();
        let curve = relevance_curve(&model, &name("w"), &g, &fixed, &event, None).map_err(fail)?;
        let m = curve.probabilities.len();
        for i in 0..m / 2 {
            let (a, b) = (curve.probabilities[i], curve.probabilities[m - 1 - i]);
            prop_assert!((a - b).abs() <= 1e-9, "asymmetric at {}: {a} vs {b}", g[i]);
        }
        Ok(())
    })
}

pub fn leakage_bounded_and_monotone(cases: u32) -> Result<(), String> {
    let bounds = (-10.0f64..10.0, 0.01f64..10.0, 0.0f64..1.0, 0.0f64..1.0);
    let dist = prop_oneof![
        location_scale_t().prop_map(PredictiveDistribution::StudentT),
        discrete().prop_map(PredictiveDistribution::Discrete),
    ];
    run(cases, (dist, bounds), |(dist, (lo, width, s1, s2))| {
        let outer = FeasibilityBounds::new(name("y"), lo, lo + width).unwrap();
        let inner = FeasibilityBounds::new(name("y"), lo + s1 * width * 0.49, lo + width - s2 * width * 0.49).unwrap();
        let a = leakage(&dist, &outer).map_err(fail)?;
        let b = leakage(&dist, &inner).map_err(fail)?;
        for l in [a, b] {
            prop_assert!((0.0..=1.0).contains(&l.total) && l.lower_tail >= 0.0 && l.upper_tail >= 0.0);
        }
        prop_assert!(b.total >= a.total, "{b:?} < {a:?}");
        let whole = FeasibilityBounds::new(name("y"), f64::NEG_INFINITY, f64::INFINITY).unwrap();
        prop_assert_eq!(leakage(&dist, &whole).map_err(fail)?.total, 0.0);
        Ok(())
    })
}

pub fn crps_propriety(cases: u32) -> Result<(), String> {
    let weights = || prop::collection::vec(1u32..20, 4);
    run(cases, (weights(), weights()), |(wp, wq)| {
        let support = vec![-1.0, 0.5, 2.0, 3.5];
        let normalize = |w: &[u32]| {
            let t: u32 = w.iter().sum();
            w.iter().map(|v| *v as f64 / t as f64).collect::<Vec<_>>()
        };
        let (pp, pq) = (normalize(&wp), normalize(&wq));
        let p = PredictiveDistribution::Discrete(DiscreteDistribution::new(support.clone(), pp.clone()).unwrap());
        let q = PredictiveDistribution::Discrete(DiscreteDistribution::new(support.clone(), pq).unwrap());
        let expected = |f: &PredictiveDistribution| -> Result<f64, TestCaseError> {
            support.iter().zip(&pp).map(|(y, w)| Ok(w * crps(f, *y).map_err(fail)?)).sum()
        };
        let (sp, sq) = (expected(&p)?, expected(&q)?);
        prop_assert!(sp <= sq + 1e-15, "E_P CRPS(P) = {sp} > E_P CRPS(Q) = {sq}");
        Ok(())
    })
}

fn crps_dist() -> impl Strategy<Value = PredictiveDistribution> {
    prop_oneof![
        location_scale_t().prop_map(PredictiveDistribution::StudentT),
        // dof ≤ 1 takes the quadrature route.
        (-5.0f64..5.0, 0.2f64..3.0, 0.7f64..1.0)
            .prop_map(|(l, s, v)| PredictiveDistribution::StudentT(LocationScaleT::new(l, s, v).unwrap())),
        discrete().prop_map(PredictiveDistribution::Discrete),
    ]
}

pub fn crps_translation(cases: u32) -> Result<(), String> {
    run(cases, (crps_dist(), -10.0f64..10.0, -50.0f64..50.0), |(dist, y, c)| {
        let shifted = dist.affine(1.0, c).map_err(fail)?;
        let (a, b) = (crps(&dist, y).map_err(fail)?, crps(&shifted, y + c).map_err(fail)?);
        prop_assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
        Ok(())
    })
}

pub fn crps_scale(cases: u32) -> Result<(), String> {
    run(cases, (crps_dist(), -10.0f64..10.0, 0.01f64..100.0), |(dist, y, a)| {
        let scaled = dist.affine(a, 0.0).map_err(fail)?;
        let (s, t) = (crps(&dist, y).map_err(fail)?, crps(&scaled, a * y).map_err(fail)?);
        prop_assert!((t - a * s).abs() <= 1e-10 * (a * s), "{t} vs {}", a * s);
        Ok(())
    })
}

pub fn skill_exact_and_decreasing(cases: u32) -> Result<(), String> {
    run(cases, (1e-6f64..10.0, 0.0f64..10.0, 1e-6f64..1.0), |(c, x, dx)| {
        let s = skill(c, x).map_err(fail)?;
        prop_assert_eq!(s.to_bits(), (1.0 - x / c).to_bits());
        let x2 = x + dx * x.max(1e-3);
        prop_assert!(skill(c, x2).map_err(fail)? < s);
        prop_assert!(s <= 1.0);
        Ok(())
    })
}

pub fn report_means_recompute(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 6usize..20), |(seed, n)| {
        let data = regression_data(seed, n, 2);
        let full = fit_linear_model(&data, &spec_for(2)).map_err(fail)?;
        let partial = fit_linear_model(&data, &spec_for(1)).map_err(fail)?;
        let report = verify(&full, &partial, &data, Provenance::InSample).map_err(fail)?;
        let (f, p) = report.recomputed_means();
        prop_assert_eq!(f.to_bits(), report.mean_crps_full.to_bits());
        prop_assert_eq!(p.to_bits(), report.mean_crps_partial.to_bits());
        prop_assert!(report.per_observation.iter().all(|o| o.crps_full >= 0.0 && o.crps_partial >= 0.0 && o.skill <= 1.0));
        let same = verify(&full, &full, &data, Provenance::InSample).map_err(fail)?;
        prop_assert!(same.per_observation.iter().all(|o| o.skill == 0.0));
        Ok(())
    })
}

pub fn synthesize_nonnegative_reproducible(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 1usize..200, 0.01f64..50.0), |(seed, n, scale)| {
        let data = Dataset::new(vec![name("a")], (0..n).map(|i| vec![i as f64]).collect()).unwrap();
        let make = || synthesize_column(&data, name("w"), HalfNormal::new(scale, seed).unwrap()).unwrap();
        let (a, b) = (make(), make());
        let w = a.column("w").unwrap();
        prop_assert!(w.iter().all(|v| *v >= 0.0));
        prop_assert_eq!(w, b.column("w").unwrap());
        prop_assert_eq!(a.k(), 2);
        Ok(())
    })
}
