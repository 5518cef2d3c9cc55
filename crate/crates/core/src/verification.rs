//! Verification of predictive distributions against realized observables:
//! CRPS, skill relative to a comparator, and per-observation breakdowns.

use alloc::vec::Vec;

use crate::dataset::{Dataset, VariableName};
use crate::distribution::{DiscreteDistribution, LocationScaleT, PredictiveDistribution};
use crate::error::Error;
use crate::model::{FittedModel, Scenario};
use crate::quadrature;
use crate::special;

/// Absolute tolerance of the quadrature route.
pub const CRPS_QUADRATURE_TOLERANCE: f64 = 1e-9;
/// Tolerance of the integral in standardized units. It does not depend on the
/// scale (unless needed to meet the absolute tolerance), so rescaling a
/// predictive rescales the score exactly.
const STANDARDIZED_TOLERANCE: f64 = 1e-12;
/// The tail walk stops once the integrand drops below this.
const TAIL_INTEGRAND_FLOOR: f64 = 1e-15;
const MAX_TAIL_DOUBLINGS: usize = 1000;
const MAX_INTERVALS_PER_PIECE: usize = 200;

/// Continuous ranked probability score `∫ (F(t) − 𝟙{t ≥ y})² dt`. Smaller is better.
pub fn crps(dist: &PredictiveDistribution, observed: f64) -> Result<f64, Error> {
    if !observed.is_finite() {
        return Err(Error::Domain("observed value must be finite"));
    }
    match dist {
        PredictiveDistribution::StudentT(t) if t.dof > 1.0 => Ok(crps_t_closed_form(t, observed)),
        PredictiveDistribution::StudentT(t) => crps_t_quadrature(t, observed),
        PredictiveDistribution::Discrete(d) => Ok(crps_discrete(d, observed)),
    }
}

/// Closed form for the location-scale t with `ν > 1`:
///
/// ```text
/// CRPS = σ [ z(2F(z) − 1) + 2 f(z) (ν + z²)/(ν − 1) − 2√ν B(½, ν − ½) / ((ν − 1) B(½, ν/2)²) ]
/// ```
///
/// with `z = (y − μ)/σ` and `F`, `f` the standard t CDF and density.
pub fn crps_t_closed_form(t: &LocationScaleT, observed: f64) -> f64 {
    let nu = t.dof;
    debug_assert!(nu > 1.0);
    let z = t.standardize(observed);
    let cdf = special::t_cdf(z, nu).expect("validated dof");
    let pdf = special::t_pdf(z, nu).expect("validated dof");
    let beta_ratio = libm::exp(special::ln_beta(0.5, nu - 0.5) - 2.0 * special::ln_beta(0.5, 0.5 * nu));
    let score = z * (2.0 * cdf - 1.0) + 2.0 * pdf * (nu + z * z) / (nu - 1.0)
        - 2.0 * libm::sqrt(nu) * beta_ratio / (nu - 1.0);
    // Cancellation can leave a tiny negative value near a perfect forecast.
    (t.scale * score).max(0.0)
}

/// CRPS of a location-scale t by direct numerical integration of the squared
/// CDF gap. Works for any `ν > ½` (the score is infinite below that).
pub fn crps_t_quadrature(t: &LocationScaleT, observed: f64) -> Result<f64, Error> {
    if t.dof <= 0.5 {
        return Err(Error::NonConvergence {
            routine: "CRPS quadrature (score diverges for dof <= 1/2)",
            iterations: 0,
            residual: f64::INFINITY,
        });
    }
    let z0 = t.standardize(observed);
    let nu = t.dof;
    let tol = STANDARDIZED_TOLERANCE.min(CRPS_QUADRATURE_TOLERANCE / t.scale) / 2.0;
    // Below y: F(z0 − u)²; above y: (1 − F(z0 + u))².
    let lower = tail_integral(|u| {
        let f = special::t_cdf(z0 - u, nu).unwrap_or(0.0);
        f * f
    }, tol)?;
    let upper = tail_integral(|u| {
        let s = special::t_sf(z0 + u, nu).unwrap_or(0.0);
        s * s
    }, tol)?;
    Ok(t.scale * (lower + upper))
}

/// `∫₀^∞ g(u) du` for a nonincreasing `g`: integrate over doubling pieces
/// `[0, 1], [1, 2], [2, 4], …` until the integrand is negligible and the
/// geometric extrapolation of the remaining pieces is below `tol`, then add
/// that extrapolation.
fn tail_integral(g: impl Fn(f64) -> f64, tol: f64) -> Result<f64, Error> {
    let piece_tol = tol / 8.0;
    let mut total = quadrature::integrate(&g, 0.0, 1.0, piece_tol, MAX_INTERVALS_PER_PIECE)?.value;
    let mut previous = f64::INFINITY;
    let mut lo = 1.0_f64;
    for _ in 0..MAX_TAIL_DOUBLINGS {
        let hi = 2.0 * lo;
        let piece = quadrature::integrate(&g, lo, hi, piece_tol, MAX_INTERVALS_PER_PIECE)?.value;
        total += piece;
        let ratio = piece / previous;
        let remaining = if ratio < 1.0 { piece * ratio / (1.0 - ratio) } else { f64::INFINITY };
        if g(hi) < TAIL_INTEGRAND_FLOOR && (piece == 0.0 || remaining < tol / 2.0) {
            return Ok(if remaining.is_finite() { total + remaining } else { total });
        }
        previous = piece;
        lo = hi;
        if !lo.is_finite() {
            break;
        }
    }
    Err(Error::NonConvergence {
        routine: "CRPS tail integration",
        iterations: MAX_TAIL_DOUBLINGS,
        residual: g(lo),
    })
}

/// Exact CRPS of a discrete predictive: the integrand is piecewise constant
/// between the support points and the observation.
pub fn crps_discrete(d: &DiscreteDistribution, observed: f64) -> f64 {
    let mut breaks: Vec<f64> = d.support().to_vec();
    breaks.push(observed);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut total = 0.0;
    let mut cdf = 0.0;
    let mut k = 0;
    for w in breaks.windows(2) {
        let left = w[0];
        while k < d.support().len() && d.support()[k] <= left {
            cdf += d.probabilities()[k];
            k += 1;
        }
        let step = if left >= observed { 1.0 } else { 0.0 };
        let gap = cdf.min(1.0) - step;
        total += gap * gap * (w[1] - left);
    }
    total
}

fn row_scenario(columns: &[(VariableName, usize)], row: &[f64]) -> Scenario {
    columns.iter().map(|(name, j)| (name.clone(), row[*j])).collect()
}

fn predictor_columns(model: &FittedModel, data: &Dataset) -> Result<Vec<(VariableName, usize)>, Error> {
    model
        .spec()
        .predictors()
        .iter()
        .map(|p| Ok((p.clone(), data.column_index(p.as_str())?)))
        .collect()
}

fn per_row_crps(model: &FittedModel, data: &Dataset) -> Result<Vec<f64>, Error> {
    let cols = predictor_columns(model, data)?;
    let y = data.column_index(model.spec().response().as_str())?;
    data.rows()
        .map(|row| {
            let dist = model.predictive(&row_scenario(&cols, row))?;
            crps(&dist, row[y])
        })
        .collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Mean CRPS of `model` over every row of `data`.
pub fn mean_crps(model: &FittedModel, data: &Dataset) -> Result<f64, Error> {
    Ok(mean(&per_row_crps(model, data)?))
}

/// Relative improvement of a candidate's score over a comparator's:
/// `(comparator − candidate) / comparator`, evaluated as `1 − candidate / comparator`.
/// 1 is perfect; ≤ 0 is no skill.
pub fn skill(score_comparator: f64, score_candidate: f64) -> Result<f64, Error> {
    if score_comparator == 0.0 {
        return Err(Error::UndefinedSkill);
    }
    if !(score_comparator > 0.0 && score_comparator.is_finite()) {
        return Err(Error::Domain("comparator score must be positive and finite"));
    }
    if !(score_candidate >= 0.0 && score_candidate.is_finite()) {
        return Err(Error::Domain("candidate score must be non-negative and finite"));
    }
    Ok(1.0 - score_candidate / score_comparator)
}

/// Where the scoring rows came from relative to the fitting rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Provenance {
    /// Scored on the rows the models were fitted to.
    InSample,
    /// Scored on rows neither model saw.
    HeldOut,
    /// Not known; treated as in-sample.
    Unknown,
}

impl Provenance {
    pub fn in_sample(self) -> bool {
        !matches!(self, Provenance::HeldOut)
    }
}

/// Advisory attached to reports scored on the fitting data.
pub fn in_sample_warning() -> &'static str {
    "scored on the data used for fitting (or of unknown provenance): in-sample verification \
     is optimistic, over-fitting and over-confidence are expected; verify on new observations"
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ScoredObservation {
    pub index: usize,
    pub observed: f64,
    pub crps_full: f64,
    pub crps_partial: f64,
    pub skill: f64,
}

/// Per-observation skill against the values of one predictor.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CovariateView {
    pub variable: VariableName,
    pub values: Vec<f64>,
    pub skill: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct VerificationReport {
    pub per_observation: Vec<ScoredObservation>,
    pub mean_crps_full: f64,
    pub mean_crps_partial: f64,
    pub overall_skill: f64,
    pub covariate_views: Vec<CovariateView>,
    pub in_sample: bool,
    pub warning: Option<&'static str>,
}

/// Scores `full` against the comparator `partial` on every row of `data`.
pub fn verify(
    full: &FittedModel,
    partial: &FittedModel,
    data: &Dataset,
    provenance: Provenance,
) -> Result<VerificationReport, Error> {
    if full.spec().response() != partial.spec().response() {
        return Err(Error::contract("full and partial models predict different responses"));
    }
    let crps_full = per_row_crps(full, data)?;
    let crps_partial = per_row_crps(partial, data)?;
    let observed = data.column(full.spec().response().as_str())?;

    let per_observation = (0..data.n())
        .map(|i| {
            Ok(ScoredObservation {
                index: i,
                observed: observed[i],
                crps_full: crps_full[i],
                crps_partial: crps_partial[i],
                skill: skill(crps_partial[i], crps_full[i])?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mean_crps_full = mean(&crps_full);
    let mean_crps_partial = mean(&crps_partial);
    let overall_skill = skill(mean_crps_partial, mean_crps_full)?;
    let skills: Vec<f64> = per_observation.iter().map(|o| o.skill).collect();
    let covariate_views = full
        .spec()
        .predictors()
        .iter()
        .map(|p| {
            Ok(CovariateView { variable: p.clone(), values: data.column(p.as_str())?, skill: skills.clone() })
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let in_sample = provenance.in_sample();
    Ok(VerificationReport {
        per_observation,
        mean_crps_full,
        mean_crps_partial,
        overall_skill,
        covariate_views,
        in_sample,
        warning: in_sample.then(in_sample_warning),
    })
}

impl VerificationReport {
    /// Recomputes the aggregate fields from the per-observation list.
    pub fn recomputed_means(&self) -> (f64, f64) {
        let full: Vec<f64> = self.per_observation.iter().map(|o| o.crps_full).collect();
        let partial: Vec<f64> = self.per_observation.iter().map(|o| o.crps_partial).collect();
        (mean(&full), mean(&partial))
    }
}

impl core::fmt::Display for Provenance {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Provenance::InSample => "in-sample",
            Provenance::HeldOut => "held-out",
            Provenance::Unknown => "unknown",
        })
    }
}
