use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dataset has no rows")]
    EmptyDataset,

    #[error("dataset schema is empty")]
    EmptySchema,

    #[error("row {row} has {found} values, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },

    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("variable names must be non-empty")]
    EmptyVariableName,

    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),

    #[error("unknown variable `{name}` (available: {})", available.join(", "))]
    UnknownVariable { name: String, available: Vec<String> },

    #[error("response `{0}` also appears among the predictors")]
    ResponseIsPredictor(String),

    #[error("design matrix is rank deficient: column `{column}` is a linear function of earlier columns")]
    Singular { column: String },

    #[error("insufficient data: n = {n} observations for p = {p} design columns (need n > p)")]
    InsufficientData { n: usize, p: usize },

    #[error("scenario does not match the model predictors (missing: [{}], unexpected: [{}])", missing.join(", "), unexpected.join(", "))]
    ScenarioMismatch { missing: Vec<String>, unexpected: Vec<String> },

    #[error("model has zero residual scale; its predictive is a point mass, not a Student-t")]
    DegenerateModel,

    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("skill is undefined for a comparator score of zero")]
    UndefinedSkill,

    #[error("{routine} failed to converge after {iterations} iterations (residual estimate {residual:e})")]
    NonConvergence { routine: &'static str, iterations: usize, residual: f64 },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
