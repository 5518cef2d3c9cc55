//! Probability queries about the observable: events, relevance curves,
//! importance comparisons, prediction tables and leakage.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::dataset::{FeasibilityBounds, VariableName};
use crate::distribution::PredictiveDistribution;
use crate::error::Error;
use crate::model::{FittedModel, ModelSpec, Scenario};

/// Default numerical guard for [`is_relevant`].
pub const DEFAULT_RELEVANCE_TOLERANCE: f64 = 1e-6;

/// A set of values of the observable.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ThresholdEvent {
    /// `Y > threshold`.
    Exceedance { threshold: f64 },
    /// `lower < Y ≤ upper`; endpoints may be infinite.
    Interval { lower: f64, upper: f64 },
    /// `Y = value`; discrete predictives only.
    Point { value: f64 },
}

impl ThresholdEvent {
    pub fn exceedance(threshold: f64) -> Result<Self, Error> {
        if threshold.is_nan() {
            return Err(Error::contract("threshold is NaN"));
        }
        Ok(ThresholdEvent::Exceedance { threshold })
    }

    pub fn interval(lower: f64, upper: f64) -> Result<Self, Error> {
        if lower.is_nan() || upper.is_nan() || !(lower < upper) {
            return Err(Error::contract("interval event needs lower < upper"));
        }
        Ok(ThresholdEvent::Interval { lower, upper })
    }

    /// `Y < upper`.
    pub fn below(upper: f64) -> Result<Self, Error> {
        Self::interval(f64::NEG_INFINITY, upper)
    }

    pub fn point(value: f64) -> Result<Self, Error> {
        if !value.is_finite() {
            return Err(Error::contract("point event value must be finite"));
        }
        Ok(ThresholdEvent::Point { value })
    }

    fn validate(&self) -> Result<(), Error> {
        match *self {
            ThresholdEvent::Exceedance { threshold } => Self::exceedance(threshold).map(drop),
            ThresholdEvent::Interval { lower, upper } => Self::interval(lower, upper).map(drop),
            ThresholdEvent::Point { value } => Self::point(value).map(drop),
        }
    }

    /// Short human-readable form, e.g. `Y > 3.8`.
    pub fn describe(&self) -> alloc::string::String {
        match *self {
            ThresholdEvent::Exceedance { threshold } => format!("Y > {threshold}"),
            ThresholdEvent::Interval { lower, upper } if lower == f64::NEG_INFINITY && upper == f64::INFINITY => {
                "-inf < Y < inf".to_string()
            }
            ThresholdEvent::Interval { lower, upper } if lower == f64::NEG_INFINITY => format!("Y < {upper}"),
            ThresholdEvent::Interval { lower, upper } if upper == f64::INFINITY => format!("Y > {lower}"),
            ThresholdEvent::Interval { lower, upper } => format!("{lower} < Y <= {upper}"),
            ThresholdEvent::Point { value } => format!("Y = {value}"),
        }
    }
}

/// `Pr(Y ∈ event)` under `dist`.
pub fn event_probability(dist: &PredictiveDistribution, event: &ThresholdEvent) -> Result<f64, Error> {
    event.validate()?;
    let p = match (*event, dist) {
        (ThresholdEvent::Exceedance { threshold }, d) => d.sf(threshold),
        (ThresholdEvent::Interval { lower, upper }, PredictiveDistribution::StudentT(t)) => {
            // Difference the tail that is further from the centre.
            if lower >= t.location {
                t.sf(lower) - t.sf(upper)
            } else {
                t.cdf(upper) - t.cdf(lower)
            }
        }
        (ThresholdEvent::Interval { lower, upper }, d) => d.cdf(upper) - d.cdf(lower),
        (ThresholdEvent::Point { value }, PredictiveDistribution::Discrete(d)) => d.mass_at(value),
        (ThresholdEvent::Point { .. }, PredictiveDistribution::StudentT(_)) => {
            return Err(Error::contract(
                "point events have probability zero under a continuous predictive; ask about an interval",
            ))
        }
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Probability of `event` as one predictor sweeps a grid, others held fixed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RelevanceCurve {
    pub varying: VariableName,
    pub grid: Vec<f64>,
    pub probabilities: Vec<f64>,
    /// Probability under the model without `varying`, if one was supplied.
    pub baseline: Option<f64>,
    pub fixed: Scenario,
    pub event: ThresholdEvent,
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<(), Error> {
    if grid.is_empty() {
        return Err(Error::contract("grid is empty"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::contract("grid values must be finite"));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::contract("grid must be strictly increasing"));
    }
    Ok(())
}

/// Keeps only the assignments `spec` uses, after checking nothing it needs is missing.
fn scenario_for(spec: &ModelSpec, full: &Scenario, ignorable: &str) -> Result<Scenario, Error> {
    let unexpected: Vec<_> = full
        .iter()
        .filter(|(k, _)| !spec.contains(k.as_str()) && k.as_str() != ignorable)
        .map(|(k, _)| k.as_str().to_string())
        .collect();
    if !unexpected.is_empty() {
        return Err(Error::ScenarioMismatch { missing: Vec::new(), unexpected });
    }
    let sc: Scenario = full.iter().filter(|(k, _)| spec.contains(k.as_str())).map(|(k, v)| (k.clone(), v)).collect();
    sc.check_against(spec)?;
    Ok(sc)
}

/// Sweeps `varying` over `grid` with `fixed` supplying every other predictor.
///
/// If `varying` is not in the model the curve is exactly flat, which is the
/// definition of an irrelevant premise.
pub fn relevance_curve(
    model: &FittedModel,
    varying: &VariableName,
    grid: &[f64],
    fixed: &Scenario,
    event: &ThresholdEvent,
    baseline_model: Option<&FittedModel>,
) -> Result<RelevanceCurve, Error> {
    check_grid(grid)?;
    if fixed.get(varying.as_str()).is_some() {
        return Err(Error::contract(format!("`{varying}` is varied and must not also be fixed")));
    }
    let baseline = match baseline_model {
        Some(b) => {
            let expected = if model.spec().contains(varying.as_str()) {
                model.spec().without(varying.as_str())?
            } else {
                model.spec().clone()
            };
            if *b.spec() != expected {
                return Err(Error::contract(format!(
                    "baseline model must be the main model without `{varying}`"
                )));
            }
            let sc = scenario_for(b.spec(), fixed, "")?;
            Some(event_probability(&b.predictive(&sc)?, event)?)
        }
        None => None,
    };

    let mut probabilities = Vec::with_capacity(grid.len());
    let mut point = fixed.clone();
    for &g in grid {
        point.insert(varying.clone(), g);
        let sc = scenario_for(model.spec(), &point, varying.as_str())?;
        probabilities.push(event_probability(&model.predictive(&sc)?, event)?);
    }
    Ok(RelevanceCurve {
        varying: varying.clone(),
        grid: grid.to_vec(),
        probabilities,
        baseline,
        fixed: fixed.clone(),
        event: *event,
    })
}

/// Spread of a relevance curve and whether it exceeds the tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Relevance {
    pub spread: f64,
    pub relevant: bool,
}

/// A premise is relevant when the curve is not flat: `max − min > tolerance`.
pub fn is_relevant(curve: &RelevanceCurve, tolerance: f64) -> Relevance {
    let (lo, hi) = curve
        .probabilities
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(*p), hi.max(*p)));
    let spread = if curve.probabilities.is_empty() { 0.0 } else { hi - lo };
    Relevance { spread, relevant: spread > tolerance }
}

/// Comparison of a probability under two sets of premises. Deciding whether
/// the difference matters is left to the caller.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Importance {
    /// `p_full / p_reduced`; `None` when `p_reduced` is zero.
    pub ratio: Option<f64>,
    pub difference: f64,
}

pub fn importance_ratio(p_full: f64, p_reduced: f64) -> Result<Importance, Error> {
    let unit = 0.0..=1.0;
    if !unit.contains(&p_full) || !unit.contains(&p_reduced) {
        return Err(Error::contract("probabilities must lie in [0, 1]"));
    }
    let ratio = (p_reduced > 0.0).then(|| p_full / p_reduced);
    Ok(Importance { ratio, difference: p_full - p_reduced })
}

/// Event probabilities over a two-predictor lattice.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PredictionTable {
    pub row_variable: VariableName,
    pub row_grid: Vec<f64>,
    pub column_variable: VariableName,
    pub column_grid: Vec<f64>,
    pub events: Vec<ThresholdEvent>,
    pub fixed: Scenario,
    /// Indexed `[row][column][event]`, flattened.
    pub cells: Vec<f64>,
}

impl PredictionTable {
    pub fn cell(&self, row: usize, column: usize, event: usize) -> f64 {
        let (nc, ne) = (self.column_grid.len(), self.events.len());
        self.cells[(row * nc + column) * ne + event]
    }
}

pub fn prediction_table(
    model: &FittedModel,
    row: (&VariableName, &[f64]),
    column: (&VariableName, &[f64]),
    events: &[ThresholdEvent],
    fixed: &Scenario,
) -> Result<PredictionTable, Error> {
    let (row_var, row_grid) = row;
    let (col_var, col_grid) = column;
    check_grid(row_grid)?;
    check_grid(col_grid)?;
    if events.is_empty() {
        return Err(Error::contract("prediction table needs at least one event"));
    }
    if row_var == col_var {
        return Err(Error::contract("row and column variables must differ"));
    }
    for v in [row_var, col_var] {
        if !model.spec().contains(v.as_str()) {
            return Err(Error::contract(format!("`{v}` is not a predictor of the model")));
        }
        if fixed.get(v.as_str()).is_some() {
            return Err(Error::contract(format!("`{v}` is tabulated and must not also be fixed")));
        }
    }
    let mut cells = Vec::with_capacity(row_grid.len() * col_grid.len() * events.len());
    let mut sc = fixed.clone();
    for &r in row_grid {
        for &c in col_grid {
            sc.insert(row_var.clone(), r);
            sc.insert(col_var.clone(), c);
            let dist = model.predictive(&sc)?;
            for e in events {
                cells.push(event_probability(&dist, e)?);
            }
        }
    }
    Ok(PredictionTable {
        row_variable: row_var.clone(),
        row_grid: row_grid.to_vec(),
        column_variable: col_var.clone(),
        column_grid: col_grid.to_vec(),
        events: events.to_vec(),
        fixed: fixed.clone(),
        cells,
    })
}

/// Predictive mass outside the feasible range.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Leakage {
    /// `Pr(Y < lower)`.
    pub lower_tail: f64,
    /// `Pr(Y > upper)`.
    pub upper_tail: f64,
    pub total: f64,
}

pub fn leakage(dist: &PredictiveDistribution, bounds: &FeasibilityBounds) -> Result<Leakage, Error> {
    let bounds = FeasibilityBounds::new(bounds.variable.clone(), bounds.lower, bounds.upper)?;
    let lower_tail = if bounds.lower == f64::NEG_INFINITY { 0.0 } else { dist.below(bounds.lower) };
    let upper_tail = if bounds.upper == f64::INFINITY { 0.0 } else { dist.sf(bounds.upper) };
    Ok(Leakage { lower_tail, upper_tail, total: (lower_tail + upper_tail).min(1.0) })
}
