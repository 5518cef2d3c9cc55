//! Direct probability statements about observables, `Pr(Y ∈ y | X, D, M)`,
//! from flat-prior linear regression or deduced discrete models, together with
//! relevance and importance analysis and CRPS-based verification.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, hashing and the
//! command-line front end live in the `thirdway` crate.

#![no_std]

extern crate alloc;

pub mod dataset;
pub mod distribution;
pub mod error;
mod linalg;
pub mod model;
pub mod quadrature;
pub mod scenario;
pub mod special;
pub mod verification;

pub use dataset::{synthesize_column, Dataset, FeasibilityBounds, HalfNormal, VariableName};
pub use distribution::{deduced_uniform, DiscreteDistribution, LocationScaleT, PredictiveDistribution};
pub use error::Error;
pub use model::{fit_linear_model, FittedModel, ModelSpec, Scenario};
pub use scenario::{
    event_probability, importance_ratio, is_relevant, leakage, prediction_table, relevance_curve, Importance,
    Leakage, PredictionTable, Relevance, RelevanceCurve, ThresholdEvent,
};
pub use special::t_cdf;
pub use verification::{
    crps, in_sample_warning, mean_crps, skill, verify, CovariateView, Provenance, ScoredObservation,
    VerificationReport,
};
