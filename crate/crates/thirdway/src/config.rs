//! JSON run configuration. Any field may instead be given as a command-line
//! flag; flags win when both are present.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::io::{Delimiter, SchemaMap};

/// A number, or one of the strings `inf`, `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(try_from = "NumberOrText")]
pub struct Real(pub f64);

#[derive(Deserialize)]
#[serde(untagged)]
enum NumberOrText {
    Number(f64),
    Text(String),
}

impl TryFrom<NumberOrText> for Real {
    type Error = String;
    fn try_from(v: NumberOrText) -> std::result::Result<Self, String> {
        match v {
            NumberOrText::Number(x) => Ok(Real(x)),
            NumberOrText::Text(s) => parse_real(&s).map(Real).map_err(|e| e.to_string()),
        }
    }
}

/// Parses a real number, accepting `inf`, `+inf` and `-inf`.
pub fn parse_real(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::usage(format!("`{s}` is not a number")))?;
    if v.is_nan() {
        return Err(Error::usage("NaN is not allowed"));
    }
    Ok(v)
}

/// An event written as exactly one of `{"gt": y}`, `{"lt": y}`,
/// `{"interval": [a, b]}` or `{"eq": v}`.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventConfig {
    pub gt: Option<Real>,
    pub lt: Option<Real>,
    pub interval: Option<[Real; 2]>,
    pub eq: Option<Real>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub delimiter: Option<Delimiter>,
    pub header: Option<bool>,
    pub columns: Option<SchemaMap>,

    pub response: Option<String>,
    pub predictors: Option<Vec<String>>,
    pub intercept: Option<bool>,
    pub deduced: Option<Vec<f64>>,

    pub model: Option<PathBuf>,
    pub baseline: Option<PathBuf>,
    pub full: Option<PathBuf>,
    pub partial: Option<String>,
    pub held_out: Option<bool>,

    pub scenario: Option<BTreeMap<String, f64>>,
    pub event: Option<EventConfig>,
    pub events: Option<Vec<EventConfig>>,

    pub vary: Option<String>,
    pub grid: Option<String>,
    pub tolerance: Option<f64>,
    pub rows: Option<String>,
    pub cols: Option<String>,

    pub lower: Option<Real>,
    pub upper: Option<Real>,

    pub name: Option<String>,
    pub seed: Option<u64>,
    pub scale: Option<f64>,

    pub output: Option<PathBuf>,
    pub format: Option<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::File { path: path.to_path_buf(), source })?;
        serde_json::from_str(&text).map_err(|e| Error::usage(format!("{}: {e}", path.display())))
    }
}
