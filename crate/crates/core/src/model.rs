//! Flat-prior Bayesian linear regression and its Student-t posterior predictive.
//!
//! Under the improper prior `p(β, log σ) ∝ 1`, a new observation at design
//! vector `x*` is distributed as
//!
//! ```text
//! Y | x*, D ~ t_{n−p}( x*ᵀβ̂ ,  s · sqrt(1 + x*ᵀ (XᵀX)⁻¹ x*) )
//! ```
//!
//! with `β̂` the least-squares coefficients and `s² = RSS / (n − p)`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{Dataset, VariableName};
use crate::distribution::{LocationScaleT, PredictiveDistribution};
use crate::error::Error;
use crate::linalg;

/// Name used for the constant column in diagnostics.
pub const INTERCEPT: &str = "(intercept)";

/// Relative tolerance on the symmetry of a stored `(XᵀX)⁻¹`.
pub const GRAM_SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Residual scales at or below this multiple of `ε · max|y|` mark a noiseless fit.
const DEGENERATE_SCALE_FACTOR: f64 = 64.0;

/// The premises of a regression model: which variable is predicted from which.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "ModelSpecRepr"))]
pub struct ModelSpec {
    response: VariableName,
    predictors: Vec<VariableName>,
    intercept: bool,
}

#[cfg(feature = "serde")]
#[derive(serde::Deserialize)]
struct ModelSpecRepr {
    response: VariableName,
    predictors: Vec<VariableName>,
    #[serde(default = "default_true")]
    intercept: bool,
}

#[cfg(feature = "serde")]
fn default_true() -> bool {
    true
}

#[cfg(feature = "serde")]
impl TryFrom<ModelSpecRepr> for ModelSpec {
    type Error = Error;
    fn try_from(r: ModelSpecRepr) -> Result<Self, Error> {
        ModelSpec::new(r.response, r.predictors, r.intercept)
    }
}

impl ModelSpec {
    pub fn new(response: VariableName, predictors: Vec<VariableName>, intercept: bool) -> Result<Self, Error> {
        if predictors.contains(&response) {
            return Err(Error::ResponseIsPredictor(response.into()));
        }
        for (i, p) in predictors.iter().enumerate() {
            if predictors[..i].contains(p) {
                return Err(Error::DuplicateVariable(p.as_str().to_string()));
            }
        }
        if predictors.is_empty() && !intercept {
            return Err(Error::contract("model has no design columns"));
        }
        Ok(ModelSpec { response, predictors, intercept })
    }

    /// Intercept-only comparator.
    pub fn null(response: VariableName) -> Self {
        ModelSpec { response, predictors: Vec::new(), intercept: true }
    }

    pub fn response(&self) -> &VariableName {
        &self.response
    }

    pub fn predictors(&self) -> &[VariableName] {
        &self.predictors
    }

    pub fn intercept(&self) -> bool {
        self.intercept
    }

    /// Number of design-matrix columns.
    pub fn p(&self) -> usize {
        self.predictors.len() + usize::from(self.intercept)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.predictors.iter().any(|p| p.as_str() == name)
    }

    /// The same premises with one predictor removed.
    pub fn without(&self, name: &str) -> Result<ModelSpec, Error> {
        if !self.contains(name) {
            return Err(Error::contract(alloc::format!("`{name}` is not a predictor of this model")));
        }
        let predictors = self.predictors.iter().filter(|p| p.as_str() != name).cloned().collect();
        ModelSpec::new(self.response.clone(), predictors, self.intercept)
    }

    /// Design-column labels, intercept first.
    pub fn design_labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.p());
        if self.intercept {
            out.push(INTERCEPT.to_string());
        }
        out.extend(self.predictors.iter().map(|p| p.as_str().to_string()));
        out
    }
}

/// Assumed values of the predictors for a new observation.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Scenario {
    assignments: BTreeMap<VariableName, f64>,
}

impl Scenario {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: VariableName, value: f64) -> Self {
        self.assignments.insert(name, value);
        self
    }

    pub fn insert(&mut self, name: VariableName, value: f64) -> Option<f64> {
        self.assignments.insert(name, value)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.assignments.get(name).copied()
    }

    pub fn remove(&mut self, name: &str) -> Option<f64> {
        self.assignments.remove(name)
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VariableName, f64)> {
        self.assignments.iter().map(|(k, v)| (k, *v))
    }

    /// Checks that the scenario assigns exactly the predictors of `spec`.
    pub fn check_against(&self, spec: &ModelSpec) -> Result<(), Error> {
        let missing: Vec<String> = spec
            .predictors()
            .iter()
            .filter(|p| !self.assignments.contains_key(p.as_str()))
            .map(|p| p.as_str().to_string())
            .collect();
        let unexpected: Vec<String> = self
            .assignments
            .keys()
            .filter(|k| !spec.contains(k.as_str()))
            .map(|k| k.as_str().to_string())
            .collect();
        if missing.is_empty() && unexpected.is_empty() {
            Ok(())
        } else {
            Err(Error::ScenarioMismatch { missing, unexpected })
        }
    }

    /// Design vector `x*` in `spec`'s column order.
    pub fn design_vector(&self, spec: &ModelSpec) -> Result<Vec<f64>, Error> {
        self.check_against(spec)?;
        let mut x = Vec::with_capacity(spec.p());
        if spec.intercept() {
            x.push(1.0);
        }
        for p in spec.predictors() {
            let v = self.assignments[p.as_str()];
            if !v.is_finite() {
                return Err(Error::Domain("scenario values must be finite"));
            }
            x.push(v);
        }
        Ok(x)
    }
}

impl FromIterator<(VariableName, f64)> for Scenario {
    fn from_iter<I: IntoIterator<Item = (VariableName, f64)>>(iter: I) -> Self {
        Scenario { assignments: iter.into_iter().collect() }
    }
}

/// Sufficient statistics of a flat-prior regression fit.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "FittedModelRepr"))]
pub struct FittedModel {
    spec: ModelSpec,
    coefficients: Vec<f64>,
    residual_scale: f64,
    /// Row-major `p × p`.
    gram_inverse: Vec<f64>,
    n: usize,
    p: usize,
    #[cfg_attr(feature = "serde", serde(skip))]
    degenerate: bool,
}

#[cfg(feature = "serde")]
#[derive(serde::Deserialize)]
struct FittedModelRepr {
    spec: ModelSpec,
    coefficients: Vec<f64>,
    residual_scale: f64,
    gram_inverse: Vec<f64>,
    n: usize,
    p: usize,
}

#[cfg(feature = "serde")]
impl TryFrom<FittedModelRepr> for FittedModel {
    type Error = Error;
    fn try_from(r: FittedModelRepr) -> Result<Self, Error> {
        FittedModel::from_parts(r.spec, r.coefficients, r.residual_scale, r.gram_inverse, r.n, r.p)
    }
}

impl FittedModel {
    /// Reassembles a published model, checking every structural invariant.
    pub fn from_parts(
        spec: ModelSpec,
        coefficients: Vec<f64>,
        residual_scale: f64,
        gram_inverse: Vec<f64>,
        n: usize,
        p: usize,
    ) -> Result<Self, Error> {
        if p != spec.p() || coefficients.len() != p || gram_inverse.len() != p * p {
            return Err(Error::contract("model dimensions do not match its spec"));
        }
        if n <= p {
            return Err(Error::InsufficientData { n, p });
        }
        if coefficients.iter().chain(&gram_inverse).any(|v| !v.is_finite()) {
            return Err(Error::contract("model contains non-finite numbers"));
        }
        if !(residual_scale >= 0.0 && residual_scale.is_finite()) {
            return Err(Error::contract("residual scale must be finite and non-negative"));
        }
        for i in 0..p {
            for j in (i + 1)..p {
                let (a, b) = (gram_inverse[i * p + j], gram_inverse[j * p + i]);
                if (a - b).abs() > GRAM_SYMMETRY_TOLERANCE * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
                    return Err(Error::contract("gram inverse is not symmetric"));
                }
            }
        }
        if !linalg::is_positive_definite(&gram_inverse, p) {
            return Err(Error::contract("gram inverse is not positive definite"));
        }
        Ok(FittedModel { spec, coefficients, residual_scale, gram_inverse, n, p, degenerate: residual_scale == 0.0 })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn residual_scale(&self) -> f64 {
        self.residual_scale
    }

    pub fn gram_inverse(&self) -> &[f64] {
        &self.gram_inverse
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Degrees of freedom of the predictive, `n − p`.
    pub fn dof(&self) -> usize {
        self.n - self.p
    }

    /// True when the data were fitted without residual noise.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Posterior predictive for a new observation under `scenario`.
    pub fn predictive(&self, scenario: &Scenario) -> Result<PredictiveDistribution, Error> {
        let x = scenario.design_vector(&self.spec)?;
        self.predictive_at(&x)
    }

    /// Predictive at a raw design vector (intercept entry included).
    pub fn predictive_at(&self, x: &[f64]) -> Result<PredictiveDistribution, Error> {
        if x.len() != self.p {
            return Err(Error::contract("design vector length differs from model p"));
        }
        if self.degenerate {
            return Err(Error::DegenerateModel);
        }
        let location = linalg::dot(x, &self.coefficients);
        let leverage = linalg::quadratic_form(&self.gram_inverse, x);
        let scale = self.residual_scale * libm::sqrt(1.0 + leverage);
        Ok(PredictiveDistribution::StudentT(LocationScaleT::new(location, scale, self.dof() as f64)?))
    }
}

/// Fits `spec` to `data` by Householder QR least squares.
pub fn fit_linear_model(data: &Dataset, spec: &ModelSpec) -> Result<FittedModel, Error> {
    let y = data.column(spec.response().as_str())?;
    let n = data.n();
    let p = spec.p();
    let mut columns = Vec::with_capacity(p);
    if spec.intercept() {
        columns.push(vec![1.0; n]);
    }
    for name in spec.predictors() {
        columns.push(data.column(name.as_str())?);
    }
    if n <= p {
        return Err(Error::InsufficientData { n, p });
    }
    let ls = linalg::least_squares(&columns, &y).map_err(|dep| Error::Singular {
        column: spec.design_labels().swap_remove(dep.0),
    })?;

    let dof = (n - p) as f64;
    let mut residual_scale = libm::sqrt(ls.residual_sum_squares / dof);
    let y_scale = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let degenerate = residual_scale <= DEGENERATE_SCALE_FACTOR * f64::EPSILON * y_scale;
    if degenerate {
        residual_scale = 0.0;
    }
    Ok(FittedModel {
        spec: spec.clone(),
        coefficients: ls.coefficients,
        residual_scale,
        gram_inverse: ls.gram_inverse,
        n,
        p,
        degenerate,
    })
}
