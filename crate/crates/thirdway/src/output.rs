//! Output targets, number formatting and the conditioning record attached to
//! every result.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};
use thirdway_core::{Scenario, ThresholdEvent};

use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::model_file::Model;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Human-readable, probabilities at 2 significant figures.
    Text,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::usage(format!("unknown output format `{s}` (expected text, csv or json)"))),
        }
    }
}

impl Format {
    /// Explicit format, else the output file's extension, else `default`.
    pub fn resolve(explicit: Option<Format>, path: Option<&Path>, default: Format) -> Format {
        explicit
            .or_else(|| match path?.extension()?.to_str()? {
                "json" => Some(Format::Json),
                "csv" | "tsv" => Some(Format::Csv),
                "txt" => Some(Format::Text),
                _ => None,
            })
            .unwrap_or(default)
    }
}

/// Standard output, or a file when a path is given.
pub fn open(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|source| Error::File { path: p.clone(), source })?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// `x` rounded to `digits` significant figures, without exponent notation.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let decimals = |v: f64| (digits as i32 - 1 - v.abs().log10().floor() as i32).max(0) as usize;
    let d = decimals(x);
    let rounded: f64 = format!("{x:.d$}").parse().unwrap();
    // Rounding can carry into a new decade (0.0996 -> 0.100).
    let d = if rounded != 0.0 { decimals(rounded) } else { d };
    format!("{x:.d$}")
}

/// A JSON number, or `"inf"`/`"-inf"`/`"nan"` where JSON has none.
pub fn number(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

pub fn event_json(e: &ThresholdEvent, response: &str) -> Value {
    let mut v = match *e {
        ThresholdEvent::Exceedance { threshold } => json!({ "kind": "exceedance", "threshold": number(threshold) }),
        ThresholdEvent::Interval { lower, upper } => {
            json!({ "kind": "interval", "lower": number(lower), "upper": number(upper) })
        }
        ThresholdEvent::Point { value } => json!({ "kind": "point", "value": number(value) }),
    };
    v["description"] = json!(event_text(e, response));
    v
}

/// The event with `Y` replaced by the response name.
pub fn event_text(e: &ThresholdEvent, response: &str) -> String {
    e.describe().replace('Y', response)
}

pub fn scenario_text(s: &Scenario) -> String {
    s.iter().map(|(k, v)| format!("{k} = {v}")).collect::<Vec<_>>().join(", ")
}

/// `scenario, D, M`, leaving out `D` for a deduced model.
pub fn given_text(scenario: &Scenario, deduced: bool) -> String {
    let mut given: Vec<String> = scenario.iter().map(|(k, v)| format!("{k} = {v}")).collect();
    if !deduced {
        given.push("D".into());
    }
    given.push("M".into());
    given.join(", ")
}

/// `Pr(event | scenario, D, M)`.
pub fn statement(e: &ThresholdEvent, response: &str, scenario: &Scenario, deduced: bool) -> String {
    format!("Pr({} | {})", event_text(e, response), given_text(scenario, deduced))
}

/// A model file as it was used: what it is and the hash of its bytes.
#[derive(Debug, Clone)]
pub struct ModelSource {
    pub model: Model,
    /// Hash of the model file, or `None` for a model built on the command line.
    pub file: Option<Fingerprint>,
}

impl ModelSource {
    pub fn response(&self) -> &str {
        match &self.model {
            Model::Linear { model, .. } => model.spec().response().as_str(),
            Model::DeducedUniform { .. } => "Y",
        }
    }

    pub fn is_deduced(&self) -> bool {
        matches!(self.model, Model::DeducedUniform { .. })
    }

    /// Fingerprint of the data the model was fitted to.
    pub fn data(&self) -> Option<&Fingerprint> {
        match &self.model {
            Model::Linear { data, .. } => Some(data),
            Model::DeducedUniform { .. } => None,
        }
    }

    /// E.g. `cgpa ~ 1 + hgpa + sat (n = 100, p = 3)` or `deduced uniform on {1, 2}`.
    pub fn describe(&self) -> String {
        match &self.model {
            Model::Linear { model, .. } => {
                let spec = model.spec();
                let mut terms: Vec<&str> = Vec::new();
                if spec.intercept() {
                    terms.push("1");
                }
                terms.extend(spec.predictors().iter().map(|p| p.as_str()));
                let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
                format!("{} ~ {rhs} (n = {}, p = {})", spec.response(), model.n(), model.p())
            }
            Model::DeducedUniform { labels } => {
                let l: Vec<String> = labels.iter().map(f64::to_string).collect();
                format!("deduced uniform on {{{}}}", l.join(", "))
            }
        }
    }

    pub fn json(&self) -> Value {
        let mut v = match &self.model {
            Model::Linear { model, data } => json!({
                "kind": "linear",
                "spec": model.spec(),
                "n": model.n(),
                "p": model.p(),
                "residual_scale": model.residual_scale(),
                "data": data,
            }),
            Model::DeducedUniform { labels } => json!({ "kind": "deduced_uniform", "labels": labels }),
        };
        v["file"] = json!(self.file);
        v
    }
}

/// Everything a result is conditional on.
#[derive(Debug, Clone, Default)]
pub struct Conditioning<'a> {
    pub models: Vec<(&'static str, &'a ModelSource)>,
    pub data: Option<&'a Fingerprint>,
    pub scenario: Option<&'a Scenario>,
    pub event: Option<(&'a ThresholdEvent, &'a str)>,
    pub extra: Vec<(&'static str, String)>,
}

impl Conditioning<'_> {
    pub fn json(&self) -> Value {
        let mut v = json!({});
        for (role, m) in &self.models {
            v[*role] = m.json();
        }
        if let Some(d) = self.data {
            v["data"] = json!(d);
        }
        if let Some(s) = self.scenario {
            v["scenario"] = json!(s);
        }
        if let Some((e, r)) = self.event {
            v["event"] = event_json(e, r);
        }
        for (k, val) in &self.extra {
            v[*k] = json!(val);
        }
        v
    }

    /// `key: value` lines for text output and CSV comments.
    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (role, m) in &self.models {
            out.push(format!("{role}: {}", m.describe()));
            if let Some(f) = &m.file {
                out.push(format!("{role} file: {f}"));
            }
            if let Some(d) = m.data() {
                out.push(format!("{role} fitted to data: {d}"));
            }
        }
        if let Some(d) = self.data {
            out.push(format!("data: {d}"));
        }
        if let Some(s) = self.scenario {
            out.push(format!("scenario: {}", if s.is_empty() { "(none)".to_string() } else { scenario_text(s) }));
        }
        if let Some((e, r)) = self.event {
            out.push(format!("event: {}", event_text(e, r)));
        }
        for (k, val) in &self.extra {
            out.push(format!("{k}: {val}"));
        }
        out
    }

    pub fn write_comments(&self, out: &mut dyn Write) -> Result<()> {
        for line in self.lines() {
            writeln!(out, "# {line}")?;
        }
        Ok(())
    }
}

/// Pretty JSON followed by a newline.
pub fn write_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// One CSV row, quoting fields as needed.
pub fn csv_row<I, S>(out: &mut dyn Write, fields: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let fields: Vec<String> = fields
        .into_iter()
        .map(|f| {
            let f = f.as_ref();
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.to_string()
            }
        })
        .collect();
    writeln!(out, "{}", fields.join(","))?;
    Ok(())
}
