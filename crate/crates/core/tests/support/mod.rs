//! Independent oracles shared by the property tests and the acceptance suite.
//!
//! The oracles here do not call into the library's numerical routines: linear
//! algebra goes through `nalgebra` normal equations, distribution functions
//! through `statrs`, and random draws through `rand_distr`.

#![allow(dead_code)]

pub mod properties;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// A small regression problem: response, predictor columns, and a scenario.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub y: Vec<f64>,
    pub predictors: Vec<(&'static str, Vec<f64>)>,
    pub scenario: Vec<f64>,
    pub thresholds: Vec<f64>,
}

/// Deterministic fixtures with n ≤ 20.
pub fn posterior_fixtures() -> Vec<Fixture> {
    let x12: Vec<f64> = (0..12).map(|i| 0.5 * i as f64).collect();
    let noise12 = [0.31, -0.52, 0.12, 0.77, -0.25, -0.61, 0.44, 0.05, -0.38, 0.69, -0.11, 0.21];
    let y12: Vec<f64> = x12.iter().zip(noise12).map(|(x, e)| 1.0 + 0.8 * x + e).collect();

    let h20: Vec<f64> = (0..20).map(|i| 1.0 + 0.15 * i as f64).collect();
    let s20: Vec<f64> = (0..20).map(|i| 800.0 + 37.0 * ((i * 7) % 20) as f64).collect();
    let noise20 = [
        0.12, -0.31, 0.05, 0.44, -0.27, 0.18, -0.09, 0.36, -0.41, 0.02, 0.29, -0.15, 0.07, -0.22, 0.33, -0.05,
        0.14, -0.38, 0.25, -0.11,
    ];
    let y20: Vec<f64> = (0..20).map(|i| -0.4 + 0.55 * h20[i] + 0.0012 * s20[i] + noise20[i]).collect();

    vec![
        Fixture {
            name: "null model, n = 5",
            y: vec![2.1, 2.9, 1.7, 3.4, 2.6],
            predictors: vec![],
            scenario: vec![],
            thresholds: vec![1.0, 2.5, 4.0],
        },
        Fixture {
            name: "simple regression, n = 12, extrapolated scenario",
            y: y12,
            predictors: vec![("x", x12)],
            scenario: vec![7.0],
            thresholds: vec![5.0, 6.6, 8.0],
        },
        Fixture {
            name: "two predictors, n = 20",
            y: y20,
            predictors: vec![("h", h20), ("s", s20)],
            scenario: vec![3.5, 1160.0],
            thresholds: vec![2.5, 3.2, 3.8],
        },
    ]
}

/// Flat-prior posterior sufficient statistics by normal equations.
pub struct NormalEquations {
    pub beta: DVector<f64>,
    pub rss: f64,
    pub gram_inverse: DMatrix<f64>,
    pub n: usize,
    pub p: usize,
}

pub fn normal_equations(fx: &Fixture) -> NormalEquations {
    let n = fx.y.len();
    let p = fx.predictors.len() + 1;
    let x = DMatrix::from_fn(n, p, |i, j| if j == 0 { 1.0 } else { fx.predictors[j - 1].1[i] });
    let y = DVector::from_vec(fx.y.clone());
    let gram = x.transpose() * &x;
    let gram_inverse = gram.clone().try_inverse().expect("full rank fixture");
    let beta = &gram_inverse * (x.transpose() * &y);
    let resid = &y - &x * &beta;
    NormalEquations { beta, rss: resid.dot(&resid), gram_inverse, n, p }
}

/// Monte-Carlo estimate of `Pr(Y_new > threshold)` by sampling the flat-prior
/// posterior: `σ² = RSS/χ²_{n−p}`, `β ~ N(β̂, σ²(XᵀX)⁻¹)`, `Y ~ N(x*ᵀβ, σ²)`.
/// Returns one estimate per threshold from a shared set of draws.
pub fn posterior_exceedance_mc(fx: &Fixture, draws: usize, seed: u64) -> Vec<f64> {
    let ne = normal_equations(fx);
    let chol = ne.gram_inverse.clone().cholesky().expect("positive definite").l();
    let mut xstar = vec![1.0];
    xstar.extend(&fx.scenario);
    let xstar = DVector::from_vec(xstar);
    let chi = ChiSquared::new((ne.n - ne.p) as f64).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut counts = vec![0usize; fx.thresholds.len()];
    let mut z = DVector::zeros(ne.p);
    for _ in 0..draws {
        let sigma = (ne.rss / chi.sample(&mut rng)).sqrt();
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        let beta = &ne.beta + (&chol * &z) * sigma;
        let e: f64 = rng.sample(StandardNormal);
        let y = xstar.dot(&beta) + sigma * e;
        for (c, t) in counts.iter_mut().zip(&fx.thresholds) {
            if y > *t {
                *c += 1;
            }
        }
    }
    counts.into_iter().map(|c| c as f64 / draws as f64).collect()
}

/// Monte-Carlo CRPS `E|X − y| − ½E|X − X′|` for a location-scale t, using one
/// jittered draw per quantile stratum (`statrs` inverse CDF).
///
/// `statrs`' t quantile loses accuracy for very large `dof`, so keep `dof`
/// moderate here and use [`crps_normal_monte_carlo`] for the normal limit.
pub fn crps_t_monte_carlo(location: f64, scale: f64, dof: f64, observed: f64, draws: usize, seed: u64) -> f64 {
    assert!(dof <= 1e4, "use crps_normal_monte_carlo for the normal limit");
    stratified_crps(&StudentsT::new(location, scale, dof).unwrap(), observed, draws, seed)
}

/// Stratified Monte-Carlo CRPS of a normal distribution.
pub fn crps_normal_monte_carlo(location: f64, scale: f64, observed: f64, draws: usize, seed: u64) -> f64 {
    stratified_crps(&statrs::distribution::Normal::new(location, scale).unwrap(), observed, draws, seed)
}

fn stratified_crps(t: &impl ContinuousCDF<f64, f64>, observed: f64, draws: usize, seed: u64) -> f64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = draws as f64;
    let xs: Vec<f64> = (0..draws)
        .map(|i| {
            let u: f64 = (i as f64 + rng.random::<f64>()) / n;
            t.inverse_cdf(u.clamp(1e-300, 1.0 - f64::EPSILON / 2.0))
        })
        .collect();
    // Strata are increasing, so xs is sorted and the pairwise mean is a weighted sum.
    let abs_dev: f64 = xs.iter().map(|x| (x - observed).abs()).sum::<f64>() / n;
    let gini: f64 = xs.iter().enumerate().map(|(i, x)| (2.0 * i as f64 - n + 1.0) * x).sum::<f64>() * 2.0 / (n * n);
    abs_dev - 0.5 * gini
}

/// Normal CRPS closed form `σ[z(2Φ(z) − 1) + 2φ(z) − 1/√π]`.
pub fn crps_normal(location: f64, scale: f64, observed: f64) -> f64 {
    use statrs::distribution::{Continuous, Normal};
    let std = Normal::new(0.0, 1.0).unwrap();
    let z = (observed - location) / scale;
    scale * (z * (2.0 * std.cdf(z) - 1.0) + 2.0 * std.pdf(z) - 1.0 / std::f64::consts::PI.sqrt())
}

/// Reference Student-t CDF values at 50 significant digits (see `oracles/t_cdf_oracle.py`).
pub fn t_cdf_reference() -> Vec<(f64, f64, f64)> {
    include_str!("../data/t_cdf_oracle.csv")
        .lines()
        .skip(1)
        .map(|line| {
            let mut it = line.split(',').map(|v| v.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap(), it.next().unwrap())
        })
        .collect()
}

/// Randomized location-scale t cases `(location, scale, dof, observed)`.
pub fn random_t_cases(count: usize, seed: u64) -> Vec<(f64, f64, f64, f64)> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let loc = rng.random_range(-5.0..5.0);
            let scale = rng.random_range(0.2..2.0);
            let dof = rng.random_range(5.0..50.0);
            let z: f64 = rng.random_range(-3.0..3.0);
            (loc, scale, dof, loc + scale * z)
        })
        .collect()
}
