//! Predictive distributions for a new observable.

use alloc::vec::Vec;

use crate::error::Error;
use crate::special;

/// Tolerance on the total mass of a discrete distribution.
pub const DISCRETE_MASS_TOLERANCE: f64 = 1e-12;

/// Location-scale Student-t: `Y = location + scale · T_dof`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LocationScaleT {
    pub location: f64,
    pub scale: f64,
    pub dof: f64,
}

impl LocationScaleT {
    pub fn new(location: f64, scale: f64, dof: f64) -> Result<Self, Error> {
        if !location.is_finite() {
            return Err(Error::Domain("location must be finite"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Domain("scale must be positive and finite"));
        }
        if !(dof > 0.0) {
            return Err(Error::Domain("degrees of freedom must be positive"));
        }
        Ok(LocationScaleT { location, scale, dof })
    }

    pub fn standardize(&self, y: f64) -> f64 {
        (y - self.location) / self.scale
    }

    pub fn cdf(&self, y: f64) -> f64 {
        special::t_cdf(self.standardize(y), self.dof).expect("validated parameters")
    }

    /// `Pr(Y > y)`.
    pub fn sf(&self, y: f64) -> f64 {
        special::t_sf(self.standardize(y), self.dof).expect("validated parameters")
    }

    pub fn pdf(&self, y: f64) -> f64 {
        special::t_pdf(self.standardize(y), self.dof).expect("validated parameters") / self.scale
    }
}

/// Finite discrete distribution on distinct real support points.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DiscreteDistribution {
    /// Strictly increasing.
    support: Vec<f64>,
    probabilities: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(values: Vec<f64>, probabilities: Vec<f64>) -> Result<Self, Error> {
        if values.is_empty() || values.len() != probabilities.len() {
            return Err(Error::contract("discrete distribution needs matching, non-empty support and probabilities"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract("discrete support values must be finite"));
        }
        if probabilities.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::contract("discrete probabilities must lie in [0, 1]"));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > DISCRETE_MASS_TOLERANCE {
            return Err(Error::contract("discrete probabilities must sum to 1"));
        }
        let mut pairs: Vec<(f64, f64)> = values.into_iter().zip(probabilities).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::contract("discrete support values must be distinct"));
        }
        let (support, probabilities) = pairs.into_iter().unzip();
        Ok(DiscreteDistribution { support, probabilities })
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn mass_at(&self, v: f64) -> f64 {
        self.support
            .iter()
            .position(|s| *s == v)
            .map_or(0.0, |i| self.probabilities[i])
    }

    fn min(&self) -> f64 {
        self.support[0]
    }

    fn max(&self) -> f64 {
        self.support[self.support.len() - 1]
    }

    /// `Pr(Y ≤ y)`. Exactly 1 at and above the largest support point.
    pub fn cdf(&self, y: f64) -> f64 {
        if y >= self.max() {
            return 1.0;
        }
        self.sum_where(|s| s <= y).min(1.0)
    }

    /// `Pr(Y > y)`. Exactly 1 below the smallest support point.
    pub fn sf(&self, y: f64) -> f64 {
        if y < self.min() {
            return 1.0;
        }
        self.sum_where(|s| s > y).min(1.0)
    }

    /// `Pr(Y < y)`.
    pub fn below(&self, y: f64) -> f64 {
        if y > self.max() {
            return 1.0;
        }
        self.sum_where(|s| s < y).min(1.0)
    }

    fn sum_where(&self, pred: impl Fn(f64) -> bool) -> f64 {
        self.support
            .iter()
            .zip(&self.probabilities)
            .filter(|(s, _)| pred(**s))
            .fold(0.0, |acc, (_, p)| acc + p)
    }
}

/// Distribution of a new observable given the model premises.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum PredictiveDistribution {
    StudentT(LocationScaleT),
    Discrete(DiscreteDistribution),
}

impl PredictiveDistribution {
    /// `Pr(Y ≤ y)`; right-continuous.
    pub fn cdf(&self, y: f64) -> f64 {
        match self {
            PredictiveDistribution::StudentT(t) => t.cdf(y),
            PredictiveDistribution::Discrete(d) => d.cdf(y),
        }
    }

    /// `Pr(Y > y)`.
    pub fn sf(&self, y: f64) -> f64 {
        match self {
            PredictiveDistribution::StudentT(t) => t.sf(y),
            PredictiveDistribution::Discrete(d) => d.sf(y),
        }
    }

    /// `Pr(Y < y)`.
    pub fn below(&self, y: f64) -> f64 {
        match self {
            PredictiveDistribution::StudentT(t) => t.cdf(y),
            PredictiveDistribution::Discrete(d) => d.below(y),
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self, PredictiveDistribution::StudentT(_))
    }

    /// Distribution of `a·Y + b` for `a > 0`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self, Error> {
        if !(a > 0.0 && a.is_finite()) || !b.is_finite() {
            return Err(Error::Domain("affine map needs finite a > 0 and finite b"));
        }
        Ok(match self {
            PredictiveDistribution::StudentT(t) => {
                PredictiveDistribution::StudentT(LocationScaleT::new(a * t.location + b, a * t.scale, t.dof)?)
            }
            PredictiveDistribution::Discrete(d) => PredictiveDistribution::Discrete(DiscreteDistribution::new(
                d.support.iter().map(|v| a * v + b).collect(),
                d.probabilities.clone(),
            )?),
        })
    }
}

/// The model deduced from "exactly one of these `m` outcomes occurs": each has probability `1/m`.
pub fn deduced_uniform(labels: &[f64]) -> Result<PredictiveDistribution, Error> {
    if labels.is_empty() {
        return Err(Error::contract("a deduced model needs at least one outcome"));
    }
    let m = labels.len() as f64;
    let mass = 1.0 / m;
    let probabilities = alloc::vec![mass; labels.len()];
    // Summation of m copies of 1/m may drift by a few ulps; the tolerance check covers it.
    DiscreteDistribution::new(labels.to_vec(), probabilities).map(PredictiveDistribution::Discrete)
}
