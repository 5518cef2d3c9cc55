//! Column-schema table of past observations.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, Normal};

use crate::error::Error;

/// Case-sensitive, non-empty variable identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "String", into = "String"))]
pub struct VariableName(String);

impl VariableName {
    pub fn new(name: impl Into<String>) -> Result<Self, Error> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::EmptyVariableName);
        }
        Ok(VariableName(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for VariableName {
    type Error = Error;
    fn try_from(s: String) -> Result<Self, Error> {
        VariableName::new(s)
    }
}

impl TryFrom<&str> for VariableName {
    type Error = Error;
    fn try_from(s: &str) -> Result<Self, Error> {
        VariableName::new(s)
    }
}

impl From<VariableName> for String {
    fn from(v: VariableName) -> String {
        v.0
    }
}

impl fmt::Display for VariableName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl core::borrow::Borrow<str> for VariableName {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Immutable `n × k` table of finite observations with a named schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Vec<VariableName>,
    /// Row-major values.
    values: Vec<f64>,
    n: usize,
}

impl Dataset {
    /// Builds a dataset, rejecting empty input, ragged rows, duplicate names
    /// and non-finite cells.
    pub fn new(schema: Vec<VariableName>, rows: Vec<Vec<f64>>) -> Result<Self, Error> {
        if schema.is_empty() {
            return Err(Error::EmptySchema);
        }
        check_unique(&schema)?;
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let k = schema.len();
        let n = rows.len();
        let mut values = Vec::with_capacity(n * k);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != k {
                return Err(Error::RaggedRow { row: i, expected: k, found: row.len() });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row: i, column: j });
            }
            values.extend(row);
        }
        Ok(Dataset { schema, values, n })
    }

    pub fn schema(&self) -> &[VariableName] {
        &self.schema
    }

    /// Number of rows.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of columns.
    pub fn k(&self) -> usize {
        self.schema.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.k();
        &self.values[i * k..(i + 1) * k]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.k())
    }

    pub fn column_index(&self, name: &str) -> Result<usize, Error> {
        self.schema.iter().position(|v| v.as_str() == name).ok_or_else(|| Error::UnknownVariable {
            name: name.to_string(),
            available: self.schema.iter().map(|v| v.as_str().to_string()).collect(),
        })
    }

    /// Values of column `name` in row order.
    pub fn column(&self, name: &str) -> Result<Vec<f64>, Error> {
        let j = self.column_index(name)?;
        Ok(self.rows().map(|r| r[j]).collect())
    }

    /// Returns a new dataset with `values` appended as column `name`.
    pub fn with_column(&self, name: VariableName, values: Vec<f64>) -> Result<Dataset, Error> {
        if self.schema.contains(&name) {
            return Err(Error::DuplicateVariable(name.into()));
        }
        if values.len() != self.n {
            return Err(Error::contract("appended column length differs from row count"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, column: self.k() });
        }
        let k = self.k();
        let mut out = Vec::with_capacity(self.n * (k + 1));
        for (row, v) in self.rows().zip(values) {
            out.extend_from_slice(row);
            out.push(v);
        }
        let mut schema = self.schema.clone();
        schema.push(name);
        Ok(Dataset { schema, values: out, n: self.n })
    }

    /// Rows at `indices`, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Dataset, Error> {
        if indices.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut values = Vec::with_capacity(indices.len() * self.k());
        for &i in indices {
            if i >= self.n {
                return Err(Error::contract("row index out of range"));
            }
            values.extend_from_slice(self.row(i));
        }
        Ok(Dataset { schema: self.schema.clone(), values, n: indices.len() })
    }
}

fn check_unique(names: &[VariableName]) -> Result<(), Error> {
    for (i, a) in names.iter().enumerate() {
        if names[..i].contains(a) {
            return Err(Error::DuplicateVariable(a.as_str().to_string()));
        }
    }
    Ok(())
}

/// Seeded generator of `|N(0, scale²)|` draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfNormal {
    pub scale: f64,
    pub seed: u64,
}

impl HalfNormal {
    /// Scale used when none is given; puts most draws in roughly `0..26`.
    pub const DEFAULT_SCALE: f64 = 8.0;

    pub fn new(scale: f64, seed: u64) -> Result<Self, Error> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Domain("half-normal scale must be positive and finite"));
        }
        Ok(HalfNormal { scale, seed })
    }

    pub fn sample(&self, count: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let normal = Normal::new(0.0, self.scale).expect("scale validated");
        (0..count).map(|_| normal.sample(&mut rng).abs()).collect()
    }
}

/// Appends a column of seeded half-normal draws named `name`.
pub fn synthesize_column(data: &Dataset, name: VariableName, generator: HalfNormal) -> Result<Dataset, Error> {
    // Re-validate in case the struct was built literally.
    let generator = HalfNormal::new(generator.scale, generator.seed)?;
    if data.schema.contains(&name) {
        return Err(Error::DuplicateVariable(name.into()));
    }
    data.with_column(name, generator.sample(data.n))
}

/// Known-possible range of a variable; mass outside it is leakage.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeasibilityBounds {
    pub variable: VariableName,
    pub lower: f64,
    pub upper: f64,
}

impl FeasibilityBounds {
    pub fn new(variable: VariableName, lower: f64, upper: f64) -> Result<Self, Error> {
        if lower.is_nan() || upper.is_nan() || !(lower < upper) {
            return Err(Error::contract("feasibility bounds need lower < upper"));
        }
        Ok(FeasibilityBounds { variable, lower, upper })
    }
}
