//! Published models: everything needed to reproduce every predictive.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thirdway_core::{deduced_uniform, FittedModel, PredictiveDistribution, Scenario};

use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;

pub const FORMAT: &str = "thirdway-model/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    /// Flat-prior linear regression fitted to the fingerprinted data.
    Linear { model: FittedModel, data: Fingerprint },
    /// Equal probability on each label, deduced from premises alone.
    DeducedUniform { labels: Vec<f64> },
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    format: String,
    #[serde(flatten)]
    model: Model,
}

impl Model {
    pub fn predictive(&self, scenario: &Scenario) -> Result<PredictiveDistribution> {
        match self {
            Model::Linear { model, .. } => Ok(model.predictive(scenario)?),
            Model::DeducedUniform { labels } => {
                if let Some((name, _)) = scenario.iter().next() {
                    return Err(Error::usage(format!("a deduced model has no predictors, but `{name}` was set")));
                }
                Ok(deduced_uniform(labels)?)
            }
        }
    }

    pub fn linear(&self) -> Result<(&FittedModel, &Fingerprint)> {
        match self {
            Model::Linear { model, data } => Ok((model, data)),
            Model::DeducedUniform { .. } => Err(Error::usage("this command needs a fitted regression model")),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&Envelope { format: FORMAT.to_string(), model: self.clone() })
            .expect("models serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let env: Envelope = serde_json::from_str(text)?;
        if env.format != FORMAT {
            return Err(Error::structure(format!("unsupported model format `{}` (expected {FORMAT})", env.format)));
        }
        if let Model::DeducedUniform { labels } = &env.model {
            deduced_uniform(labels)?;
        }
        Ok(env.model)
    }

    /// Loads a model file, returning it with the fingerprint of its bytes.
    pub fn load(path: &Path) -> Result<(Self, Fingerprint)> {
        let bytes = std::fs::read(path).map_err(|source| Error::File { path: path.to_path_buf(), source })?;
        let text = std::str::from_utf8(&bytes).map_err(|_| Error::Utf8)?;
        Ok((Model::from_json(text)?, Fingerprint::of_bytes(&bytes)))
    }
}
