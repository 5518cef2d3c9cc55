//! Delimited text files to and from [`Dataset`].

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thirdway_core::{Dataset, VariableName};

use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Delimiter {
    #[default]
    Comma,
    Tab,
    /// Any run of spaces or tabs.
    Whitespace,
    /// Picked from the first non-blank line: comma, else tab, else whitespace.
    Auto,
}

impl FromStr for Delimiter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "comma" | "," => Ok(Delimiter::Comma),
            "tab" | "\t" | "\\t" => Ok(Delimiter::Tab),
            "whitespace" | "space" | " " => Ok(Delimiter::Whitespace),
            "auto" => Ok(Delimiter::Auto),
            _ => Err(Error::usage(format!("unknown delimiter `{s}` (expected comma, tab, whitespace or auto)"))),
        }
    }
}

impl Delimiter {
    fn resolve(self, text: &str) -> Delimiter {
        if self != Delimiter::Auto {
            return self;
        }
        let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
        if first.contains(',') {
            Delimiter::Comma
        } else if first.contains('\t') {
            Delimiter::Tab
        } else {
            Delimiter::Whitespace
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TextFormat {
    pub delimiter: Delimiter,
    pub header: bool,
}

impl Default for TextFormat {
    fn default() -> Self {
        TextFormat { delimiter: Delimiter::Comma, header: true }
    }
}

/// Maps file columns to variable names. A key that matches a header name
/// refers to that column; otherwise a positive integer key is a 1-based
/// column index. Only mapped columns are loaded, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SchemaMap(pub BTreeMap<String, VariableName>);

impl SchemaMap {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&mut self, key: impl Into<String>, name: VariableName) {
        self.0.insert(key.into(), name);
    }

    /// Parses `key=name,key=name`.
    pub fn parse_pairs(s: &str) -> Result<Self> {
        let mut map = SchemaMap::default();
        for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, name) = pair
                .split_once('=')
                .ok_or_else(|| Error::usage(format!("column mapping `{pair}` is not of the form file_column=variable")))?;
            map.insert(key.trim(), VariableName::new(name.trim())?);
        }
        Ok(map)
    }

    /// Reads `{"columns": {"file_col_or_index": "variable_name"}}`.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Config {
            columns: SchemaMap,
        }
        Ok(serde_json::from_str::<Config>(text)?.columns)
    }
}

struct Line {
    number: usize,
    fields: Vec<String>,
}

fn split_lines(text: &str, delimiter: Delimiter) -> Result<Vec<Line>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let fields = match delimiter {
            Delimiter::Whitespace | Delimiter::Auto => {
                raw.split_whitespace().map(|f| f.trim_matches('"').to_string()).collect()
            }
            Delimiter::Comma | Delimiter::Tab => {
                let byte = if delimiter == Delimiter::Comma { b',' } else { b'\t' };
                let mut reader = csv::ReaderBuilder::new()
                    .has_headers(false)
                    .flexible(true)
                    .trim(csv::Trim::All)
                    .delimiter(byte)
                    .from_reader(raw.as_bytes());
                let mut record = csv::StringRecord::new();
                reader
                    .read_record(&mut record)
                    .map_err(|e| Error::structure(format!("line {}: {e}", i + 1)))?;
                record.iter().map(str::to_string).collect()
            }
        };
        out.push(Line { number: i + 1, fields });
    }
    Ok(out)
}

fn resolve_column(key: &str, header: Option<&[String]>, width: usize) -> Result<usize> {
    if let Some(j) = header.and_then(|h| h.iter().position(|name| name == key)) {
        return Ok(j);
    }
    match key.parse::<usize>() {
        Ok(j) if (1..=width).contains(&j) => Ok(j - 1),
        _ => {
            let available = match header {
                Some(h) => h.join(", "),
                None => format!("indices 1..{width}"),
            };
            Err(Error::structure(format!("no file column `{key}` (available: {available})")))
        }
    }
}

/// Parses delimited text into a dataset. Blank lines are skipped; every other
/// line must have the same number of fields.
pub fn load_dataset(mut source: impl Read, format: &TextFormat, schema_map: &SchemaMap) -> Result<Dataset> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    parse_dataset(&bytes, format, schema_map)
}

fn parse_dataset(bytes: &[u8], format: &TextFormat, schema_map: &SchemaMap) -> Result<Dataset> {
    let text = std::str::from_utf8(bytes).map_err(|_| Error::Utf8)?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let lines = split_lines(text, format.delimiter.resolve(text))?;
    let mut lines = lines.into_iter();
    let header = if format.header {
        Some(lines.next().ok_or_else(|| Error::structure("empty file"))?.fields)
    } else {
        None
    };
    let data: Vec<Line> = lines.collect();
    if data.is_empty() {
        return Err(Error::structure(if header.is_some() { "no data rows after the header" } else { "empty file" }));
    }
    let width = header.as_ref().map_or(data[0].fields.len(), Vec::len);
    for line in &data {
        if line.fields.len() != width {
            return Err(Error::structure(format!(
                "line {}: expected {width} fields, found {}",
                line.number,
                line.fields.len()
            )));
        }
    }

    let mut selected: Vec<(usize, VariableName)> = if schema_map.is_empty() {
        let header = header
            .as_ref()
            .ok_or_else(|| Error::structure("the file has no header; name its columns with a schema map"))?;
        header.iter().enumerate().map(|(j, h)| Ok((j, VariableName::new(h.as_str())?))).collect::<Result<_>>()?
    } else {
        schema_map
            .0
            .iter()
            .map(|(key, name)| Ok((resolve_column(key, header.as_deref(), width)?, name.clone())))
            .collect::<Result<_>>()?
    };
    selected.sort_by_key(|(j, _)| *j);
    if let Some(w) = selected.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::structure(format!("file column {} is mapped twice", w[0].0 + 1)));
    }

    let column_label = |j: usize| match &header {
        Some(h) => h[j].clone(),
        None => (j + 1).to_string(),
    };
    let rows = data
        .iter()
        .enumerate()
        .map(|(row, line)| {
            selected
                .iter()
                .map(|(j, _)| {
                    let cell = &line.fields[*j];
                    match cell.parse::<f64>() {
                        Ok(v) if v.is_finite() => Ok(v),
                        _ => Err(Error::Parse { row: row + 1, line: line.number, column: column_label(*j), cell: cell.clone() }),
                    }
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset::new(selected.into_iter().map(|(_, n)| n).collect(), rows)?)
}

/// Loads a file and fingerprints its exact bytes.
pub fn load_dataset_file(path: &Path, format: &TextFormat, schema_map: &SchemaMap) -> Result<(Dataset, Fingerprint)> {
    let bytes = std::fs::read(path).map_err(|source| Error::File { path: path.to_path_buf(), source })?;
    let data = parse_dataset(&bytes, format, schema_map)?;
    Ok((data, Fingerprint::of_bytes(&bytes)))
}

/// Writes a header line and one line per row. Values use the shortest decimal
/// form that parses back to the same `f64`.
pub fn write_dataset(data: &Dataset, mut out: impl Write, delimiter: Delimiter) -> Result<()> {
    let names: Vec<&str> = data.schema().iter().map(VariableName::as_str).collect();
    match delimiter {
        Delimiter::Comma | Delimiter::Tab | Delimiter::Auto => {
            let byte = if delimiter == Delimiter::Tab { b'\t' } else { b',' };
            let mut w = csv::WriterBuilder::new().delimiter(byte).from_writer(out);
            w.write_record(&names).map_err(csv_error)?;
            for row in data.rows() {
                w.write_record(row.iter().map(f64::to_string)).map_err(csv_error)?;
            }
            w.flush()?;
        }
        Delimiter::Whitespace => {
            if let Some(bad) = names.iter().find(|n| n.chars().any(char::is_whitespace)) {
                return Err(Error::structure(format!("variable `{bad}` contains whitespace")));
            }
            writeln!(out, "{}", names.join(" "))?;
            for row in data.rows() {
                let cells: Vec<String> = row.iter().map(f64::to_string).collect();
                writeln!(out, "{}", cells.join(" "))?;
            }
        }
    }
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::structure(format!("{other:?}")),
    }
}
