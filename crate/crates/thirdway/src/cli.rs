//! The `thirdway` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use thirdway_core::scenario::DEFAULT_RELEVANCE_TOLERANCE;
use thirdway_core::{
    deduced_uniform, event_probability, fit_linear_model, is_relevant, leakage, prediction_table, relevance_curve,
    synthesize_column, verify, Dataset, FeasibilityBounds, HalfNormal, ModelSpec, Provenance, Scenario,
    ThresholdEvent, VariableName,
};

use crate::config::{parse_real, EventConfig, RunConfig};
use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::grid::{parse_grid, range_grid, DEFAULT_GRID_STEPS};
use crate::io::{load_dataset_file, write_dataset, Delimiter, SchemaMap, TextFormat};
use crate::model_file::Model;
use crate::output::{self, csv_row, given_text, significant, statement, Conditioning, Format, ModelSource};

#[derive(Debug, Parser)]
#[command(name = "thirdway", version, about = "Probabilities of observables under stated premises")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a flat-prior linear regression, or record a deduced model, and write the model file.
    Fit(FitArgs),
    /// Probability of an event for one scenario.
    Predict(PredictArgs),
    /// Probability of an event as one predictor varies over a grid.
    Relevance(RelevanceArgs),
    /// Event probabilities over a lattice of two predictors.
    Table(TableArgs),
    /// Score a model against a comparator with CRPS and skill.
    Verify(VerifyArgs),
    /// Predictive probability outside the feasible range of the response.
    Leakage(LeakageArgs),
    /// Append a seeded column of half-normal draws to a data file.
    Synthesize(SynthesizeArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON run configuration; flags take precedence over its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (default: standard output).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// text, csv or json (default: from the output extension, else per command).
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Delimited data file.
    #[arg(long)]
    data: Option<PathBuf>,
    /// comma, tab, whitespace or auto (default: comma).
    #[arg(long)]
    delimiter: Option<String>,
    /// The first line is data, not column names.
    #[arg(long)]
    no_header: bool,
    /// Column mapping `file_column=variable[,..]`; file columns by header name or 1-based index.
    #[arg(long)]
    columns: Vec<String>,
    /// JSON file `{"columns": {"file_column": "variable"}}`.
    #[arg(long)]
    columns_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model file written by `fit`.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Use the model deduced from "exactly one of these outcomes occurs".
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    deduced: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario assignment `variable=value[,..]`; repeatable.
    #[arg(long = "set", value_name = "VAR=VALUE", allow_hyphen_values = true)]
    set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct EventArgs {
    /// Event Y > value.
    #[arg(long, allow_hyphen_values = true)]
    gt: Vec<String>,
    /// Event Y < value.
    #[arg(long, allow_hyphen_values = true)]
    lt: Vec<String>,
    /// Event a < Y <= b; endpoints may be inf or -inf.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
    interval: Vec<String>,
    /// Event Y = value (deduced models only).
    #[arg(long, allow_hyphen_values = true)]
    eq: Vec<String>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    response: Option<String>,
    /// Comma-separated predictors; none gives the intercept-only null model.
    #[arg(long, value_delimiter = ',')]
    predictors: Vec<String>,
    #[arg(long)]
    no_intercept: bool,
    /// Record the deduced uniform model on these labels instead of fitting.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    deduced: Vec<String>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    event: EventArgs,
}

#[derive(Debug, Args)]
pub struct RelevanceArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// The model without the varying predictor, fitted to the same data.
    #[arg(long)]
    baseline: Option<PathBuf>,
    /// The predictor to vary.
    #[arg(long)]
    vary: Option<String>,
    /// `start:stop:step` or a comma-separated list (default: observed range in --data, 20 steps).
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Spread above which the predictor is reported relevant.
    #[arg(long)]
    tolerance: Option<f64>,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    event: EventArgs,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Row predictor and grid, `variable=grid`.
    #[arg(long, allow_hyphen_values = true)]
    rows: Option<String>,
    /// Column predictor and grid, `variable=grid`.
    #[arg(long, allow_hyphen_values = true)]
    cols: Option<String>,
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    event: EventArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Candidate model file.
    #[arg(long)]
    full: Option<PathBuf>,
    /// Comparator model file, or `null` for the intercept-only model fitted to --data.
    #[arg(long)]
    partial: Option<String>,
    /// Assert the scoring rows were not used to fit either model.
    #[arg(long)]
    held_out: bool,
    #[command(flatten)]
    data: DataArgs,
}

#[derive(Debug, Args)]
pub struct LeakageArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Smallest possible value of the response (default -inf).
    #[arg(long, allow_hyphen_values = true)]
    lower: Option<String>,
    /// Largest possible value of the response (default inf).
    #[arg(long, allow_hyphen_values = true)]
    upper: Option<String>,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    data: DataArgs,
    /// Name of the new column.
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Standard deviation of the underlying normal.
    #[arg(long)]
    scale: Option<f64>,
}

fn missing(flag: &str, key: &str) -> Error {
    Error::usage(format!("missing --{flag} (or \"{key}\" in the config file)"))
}

fn load_config(common: &CommonArgs) -> Result<RunConfig> {
    match &common.config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

struct Out {
    path: Option<PathBuf>,
    format: Format,
}

impl Out {
    fn new(common: &CommonArgs, config: &RunConfig, default: Format) -> Result<Self> {
        let path = common.output.clone().or_else(|| config.output.clone());
        let explicit = common.format.as_deref().or(config.format.as_deref()).map(str::parse).transpose()?;
        let format = Format::resolve(explicit, path.as_deref(), default);
        Ok(Out { path, format })
    }

    fn open(&self) -> Result<Box<dyn Write>> {
        output::open(self.path.as_ref())
    }
}

fn variable(name: &str) -> Result<VariableName> {
    VariableName::new(name.trim()).map_err(|_| Error::usage("variable names must be non-empty"))
}

struct LoadedData {
    data: Dataset,
    fingerprint: Fingerprint,
    delimiter: Delimiter,
}

fn load_data(args: &DataArgs, config: &RunConfig) -> Result<Option<LoadedData>> {
    let Some(path) = args.data.clone().or_else(|| config.data.clone()) else {
        return Ok(None);
    };
    let delimiter = match &args.delimiter {
        Some(d) => d.parse()?,
        None => config.delimiter.unwrap_or_default(),
    };
    let header = !args.no_header && config.header.unwrap_or(true);
    let schema = if !args.columns.is_empty() {
        let mut map = SchemaMap::default();
        for part in &args.columns {
            map.0.extend(SchemaMap::parse_pairs(part)?.0);
        }
        map
    } else if let Some(p) = &args.columns_file {
        let text = std::fs::read_to_string(p).map_err(|source| Error::File { path: p.clone(), source })?;
        SchemaMap::from_json(&text)?
    } else {
        config.columns.clone().unwrap_or_default()
    };
    let (data, fingerprint) = load_dataset_file(&path, &TextFormat { delimiter, header }, &schema)?;
    Ok(Some(LoadedData { data, fingerprint, delimiter }))
}

fn require_data(args: &DataArgs, config: &RunConfig) -> Result<LoadedData> {
    load_data(args, config)?.ok_or_else(|| missing("data", "data"))
}

fn parse_labels(labels: &[String]) -> Result<Vec<f64>> {
    labels.iter().map(|l| parse_real(l)).collect()
}

fn load_model(args: &ModelArgs, config: &RunConfig) -> Result<ModelSource> {
    let deduced = if !args.deduced.is_empty() { Some(parse_labels(&args.deduced)?) } else { None };
    let path = args.model.clone();
    match (path, deduced) {
        (Some(_), Some(_)) => Err(Error::usage("give either --model or --deduced, not both")),
        (Some(p), None) => load_model_file(&p),
        (None, Some(labels)) => deduced_source(labels),
        (None, None) => match (&config.model, &config.deduced) {
            (Some(_), Some(_)) => Err(Error::usage("the config file gives both \"model\" and \"deduced\"")),
            (Some(p), None) => load_model_file(p),
            (None, Some(labels)) => deduced_source(labels.clone()),
            (None, None) => Err(missing("model", "model")),
        },
    }
}

fn load_model_file(path: &Path) -> Result<ModelSource> {
    let (model, file) = Model::load(path)?;
    Ok(ModelSource { model, file: Some(file) })
}

fn deduced_source(labels: Vec<f64>) -> Result<ModelSource> {
    deduced_uniform(&labels)?;
    Ok(ModelSource { model: Model::DeducedUniform { labels }, file: None })
}

fn parse_scenario(args: &ScenarioArgs, config: &RunConfig) -> Result<Scenario> {
    let mut sc = Scenario::new();
    for (k, v) in config.scenario.iter().flatten() {
        sc.insert(variable(k)?, *v);
    }
    for part in &args.set {
        for pair in part.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::usage(format!("scenario assignment `{pair}` is not variable=value")))?;
            let v = parse_real(v)?;
            if !v.is_finite() {
                return Err(Error::usage(format!("scenario value for `{k}` must be finite")));
            }
            sc.insert(variable(k)?, v);
        }
    }
    Ok(sc)
}

fn usage_event(r: std::result::Result<ThresholdEvent, thirdway_core::Error>) -> Result<ThresholdEvent> {
    r.map_err(|e| Error::usage(e.to_string()))
}

fn config_event(e: &EventConfig) -> Result<ThresholdEvent> {
    let given = [e.gt.is_some(), e.lt.is_some(), e.interval.is_some(), e.eq.is_some()];
    if given.iter().filter(|g| **g).count() != 1 {
        return Err(Error::usage("a config event needs exactly one of gt, lt, interval, eq"));
    }
    usage_event(if let Some(v) = e.gt {
        ThresholdEvent::exceedance(v.0)
    } else if let Some(v) = e.lt {
        ThresholdEvent::below(v.0)
    } else if let Some([a, b]) = e.interval {
        ThresholdEvent::interval(a.0, b.0)
    } else {
        ThresholdEvent::point(e.eq.unwrap().0)
    })
}

/// Events from the flags, ordered `--lt`, `--interval`, `--eq`, `--gt`; if
/// there are none, from the config file.
fn parse_events(args: &EventArgs, config: &RunConfig) -> Result<Vec<ThresholdEvent>> {
    let mut events = Vec::new();
    for v in &args.lt {
        events.push(usage_event(ThresholdEvent::below(parse_real(v)?))?);
    }
    for pair in args.interval.chunks(2) {
        events.push(usage_event(ThresholdEvent::interval(parse_real(&pair[0])?, parse_real(&pair[1])?))?);
    }
    for v in &args.eq {
        events.push(usage_event(ThresholdEvent::point(parse_real(v)?))?);
    }
    for v in &args.gt {
        events.push(usage_event(ThresholdEvent::exceedance(parse_real(v)?))?);
    }
    if events.is_empty() {
        if let Some(e) = &config.event {
            events.push(config_event(e)?);
        }
        for e in config.events.iter().flatten() {
            events.push(config_event(e)?);
        }
    }
    Ok(events)
}

fn single_event(args: &EventArgs, config: &RunConfig) -> Result<ThresholdEvent> {
    let mut events = parse_events(args, config)?;
    match events.len() {
        1 => Ok(events.remove(0)),
        0 => Err(Error::usage("give an event: --gt, --lt, --interval or --eq")),
        _ => Err(Error::usage("give exactly one event")),
    }
}

/// `variable=grid`.
fn parse_axis(s: &str) -> Result<(VariableName, Vec<f64>)> {
    let (name, grid) =
        s.split_once('=').ok_or_else(|| Error::usage(format!("`{s}` is not of the form variable=grid")))?;
    Ok((variable(name)?, parse_grid(grid)?))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(a) => fit(a),
        Command::Predict(a) => predict(a),
        Command::Relevance(a) => relevance(a),
        Command::Table(a) => table(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Leakage(a) => leakage_cmd(a),
        Command::Synthesize(a) => synthesize(a),
    }
}

fn fit(a: FitArgs) -> Result<()> {
    let config = load_config(&a.common)?;
    let out = Out::new(&a.common, &config, Format::Json)?;
    let deduced = if !a.deduced.is_empty() { Some(parse_labels(&a.deduced)?) } else { config.deduced.clone() };
    let (model, summary) = if let Some(labels) = deduced {
        deduced_uniform(&labels)?;
        let m = Model::DeducedUniform { labels };
        let summary = ModelSource { model: m.clone(), file: None }.describe();
        (m, summary)
    } else {
        let loaded = require_data(&a.data, &config)?;
        let response = a.response.clone().or_else(|| config.response.clone()).ok_or_else(|| missing("response", "response"))?;
        let predictors =
            if !a.predictors.is_empty() { a.predictors.clone() } else { config.predictors.clone().unwrap_or_default() };
        let intercept = !a.no_intercept && config.intercept.unwrap_or(true);
        let spec = ModelSpec::new(
            variable(&response)?,
            predictors.iter().map(|p| variable(p)).collect::<Result<_>>()?,
            intercept,
        )?;
        let fitted = fit_linear_model(&loaded.data, &spec)?;
        if fitted.is_degenerate() {
            eprintln!("warning: zero residual scale; this model cannot produce predictive distributions");
        }
        let summary = format!("n = {}, p = {}, residual_scale = {}", fitted.n(), fitted.p(), fitted.residual_scale());
        (Model::Linear { model: fitted, data: loaded.fingerprint }, summary)
    };
    let text = model.to_json();
    match &out.path {
        Some(p) => {
            std::fs::write(p, format!("{text}\n")).map_err(|source| Error::File { path: p.clone(), source })?;
            println!("{summary}");
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn predict(a: PredictArgs) -> Result<()> {
    let config = load_config(&a.common)?;
    let out = Out::new(&a.common, &config, Format::Text)?;
    let source = load_model(&a.model, &config)?;
    let scenario = parse_scenario(&a.scenario, &config)?;
    let event = single_event(&a.event, &config)?;
    let p = event_probability(&source.model.predictive(&scenario)?, &event)?;

    let response = source.response().to_string();
    let cond = Conditioning {
        models: vec![("model", &source)],
        scenario: Some(&scenario),
        event: Some((&event, &response)),
        ..Default::default()
    };
    let mut w = out.open()?;
    match out.format {
        Format::Text => {
            writeln!(w, "{} = {}", statement(&event, &response, &scenario, source.is_deduced()), significant(p, 2))?;
            writeln!(w, "probability: {p}")?;
            for line in cond.lines() {
                writeln!(w, "{line}")?;
            }
        }
        Format::Json => output::write_json(&mut w, &json!({ "probability": p, "conditioning": cond.json() }))?,
        Format::Csv => {
            cond.write_comments(&mut w)?;
            csv_row(&mut w, ["probability"])?;
            csv_row(&mut w, [p.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn relevance(a: RelevanceArgs) -> Result<()> {
    let config = load_config(&a.common)?;
    let out = Out::new(&a.common, &config, Format::Csv)?;
    let source = load_model(&a.model, &config)?;
    let (model, _) = source.model.linear()?;
    let baseline = match a.baseline.clone().or_else(|| config.baseline.clone()) {
        Some(p) => Some(load_model_file(&p)?),
        None => None,
    };
    let baseline_model = baseline.as_ref().map(|b| b.model.linear().map(|(m, _)| m)).transpose()?;
    let vary = variable(&a.vary.clone().or_else(|| config.vary.clone()).ok_or_else(|| missing("vary", "vary"))?)?;
    let fixed = parse_scenario(&a.scenario, &config)?;
    let event = single_event(&a.event, &config)?;
    let tolerance = a.tolerance.or(config.tolerance).unwrap_or(DEFAULT_RELEVANCE_TOLERANCE);

    let loaded;
    let (grid, grid_source) = match a.grid.clone().or_else(|| config.grid.clone()) {
        Some(g) => (parse_grid(&g)?, "user".to_string()),
        None => {
            loaded = load_data(&a.data, &config)?.ok_or_else(|| {
                Error::usage("no --grid given; the default grid needs --data to find the observed range")
            })?;
            let column = loaded.data.column(vary.as_str())?;
            let min = column.iter().copied().fold(f64::INFINITY, f64::min);
            let max = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let source = format!(
                "default (observed range {min}..{max} of {vary} in {} steps, data {})",
                DEFAULT_GRID_STEPS, loaded.fingerprint
            );
            (range_grid(min, max, DEFAULT_GRID_STEPS), source)
        }
    };
    let curve = relevance_curve(model, &vary, &grid, &fixed, &event, baseline_model)?;
    let rel = is_relevant(&curve, tolerance);

    let response = source.response().to_string();
    let mut models = vec![("model", &source)];
    if let Some(b) = &baseline {
        models.push(("baseline", b));
    }
    let cond = Conditioning {
        models,
        scenario: Some(&fixed),
        event: Some((&event, &response)),
        extra: vec![
            ("varying", vary.to_string()),
            ("grid", grid_source.clone()),
            ("spread", rel.spread.to_string()),
            ("relevant", format!("{} (tolerance {tolerance})", rel.relevant)),
        ],
        ..Default::default()
    };
    let mut w = out.open()?;
    match out.format {
        Format::Csv => {
            cond.write_comments(&mut w)?;
            csv_row(&mut w, [vary.as_str(), "probability", "baseline"])?;
            let base = curve.baseline.map(|b| b.to_string()).unwrap_or_default();
            for (g, p) in curve.grid.iter().zip(&curve.probabilities) {
                csv_row(&mut w, [g.to_string(), p.to_string(), base.clone()])?;
            }
        }
        Format::Json => output::write_json(
            &mut w,
            &json!({
                "varying": vary,
                "grid": curve.grid,
                "grid_source": grid_source,
                "probabilities": curve.probabilities,
                "baseline": curve.baseline,
                "spread": rel.spread,
                "relevant": rel.relevant,
                "tolerance": tolerance,
                "conditioning": cond.json(),
            }),
        )?,
        Format::Text => {
            let given = given_text(&fixed, false);
            writeln!(w, "{vary} -> Pr({} | {vary}, {given})", output::event_text(&event, &response))?;
            for (g, p) in curve.grid.iter().zip(&curve.probabilities) {
                writeln!(w, "{g:>12}  {}", significant(*p, 2))?;
            }
            if let Some(b) = curve.baseline {
                writeln!(w, "baseline (model without {vary}): {}", significant(b, 2))?;
            }
            for line in cond.lines() {
                writeln!(w, "{line}")?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// `Pr(Y < a) + Pr(a ≤ Y ≤ b) + Pr(Y > b)` per cell when the events include
/// `Y < a` and `Y > b` with `a ≤ b`.
struct PartitionCheck {
    lower: f64,
    upper: f64,
    below: usize,
    above: usize,
}

impl PartitionCheck {
    fn find(events: &[ThresholdEvent]) -> Option<Self> {
        let below = events
            .iter()
            .position(|e| matches!(e, ThresholdEvent::Interval { lower, .. } if *lower == f64::NEG_INFINITY))?;
        let above = events.iter().position(|e| matches!(e, ThresholdEvent::Exceedance { .. }))?;
        let (ThresholdEvent::Interval { upper: a, .. }, ThresholdEvent::Exceedance { threshold: b }) =
            (events[below], events[above])
        else {
            unreachable!()
        };
        (a <= b && a.is_finite()).then_some(PartitionCheck { lower: a, upper: b, below, above })
    }

    fn middle(&self) -> Option<ThresholdEvent> {
        ThresholdEvent::interval(self.lower, self.upper).ok()
    }
}

fn table(a: TableArgs) -> Result<()> {
    let config = load_config(&a.common)?;
    let out = Out::new(&a.common, &config, Format::Text)?;
    let source = load_model(&a.model, &config)?;
    let (model, _) = source.model.linear()?;
    let (row_var, row_grid) = parse_axis(&a.rows.clone().or_else(|| config.rows.clone()).ok_or_else(|| missing("rows", "rows"))?)?;
    let (col_var, col_grid) = parse_axis(&a.cols.clone().or_else(|| config.cols.clone()).ok_or_else(|| missing("cols", "cols"))?)?;
    let fixed = parse_scenario(&a.scenario, &config)?;
    let events = parse_events(&a.event, &config)?;
    if events.is_empty() {
        return Err(Error::usage("give at least one event: --gt, --lt or --interval"));
    }
    let t = prediction_table(model, (&row_var, &row_grid), (&col_var, &col_grid), &events, &fixed)?;

    // Independent middle-interval queries for the sum check.
    let check = PartitionCheck::find(&events);
    let mut sums = Vec::new();
    let mut middles = Vec::new();
    if let Some(c) = &check {
        for (i, r) in row_grid.iter().enumerate() {
            for (j, col) in col_grid.iter().enumerate() {
                let mut sc = fixed.clone();
                sc.insert(row_var.clone(), *r);
                sc.insert(col_var.clone(), *col);
                let middle = match c.middle() {
                    Some(e) => event_probability(&model.predictive(&sc)?, &e)?,
                    None => 0.0,
                };
                middles.push(middle);
                sums.push(t.cell(i, j, c.below) + middle + t.cell(i, j, c.above));
            }
        }
    }
    let worst = sums.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);

    let response = source.response().to_string();
    let mut extra = vec![("rows", row_var.to_string()), ("columns", col_var.to_string())];
    let check_text = check.as_ref().map(|c| {
        format!(
            "max |Pr({r} < {a}) + Pr({a} <= {r} <= {b}) + Pr({r} > {b}) - 1| = {worst:e}",
            r = response,
            a = c.lower,
            b = c.upper
        )
    });
    if let Some(text) = &check_text {
        extra.push(("check", text.clone()));
    }
    let cond = Conditioning { models: vec![("model", &source)], scenario: Some(&fixed), extra, ..Default::default() };
    let labels: Vec<String> = events.iter().map(|e| output::event_text(e, &response)).collect();
    let mut w = out.open()?;
    match out.format {
        Format::Text => {
            for (e, label) in labels.iter().enumerate() {
                writeln!(w, "Pr({label} | {row_var}, {col_var}, D, M)")?;
                let mut header = format!("{:>10}", format!("{row_var}\\{col_var}"));
                for c in &col_grid {
                    header.push_str(&format!(" {c:>8}"));
                }
                writeln!(w, "{header}")?;
                for (i, r) in row_grid.iter().enumerate() {
                    let mut line = format!("{r:>10}");
                    for j in 0..col_grid.len() {
                        line.push_str(&format!(" {:>8}", significant(t.cell(i, j, e), 2)));
                    }
                    writeln!(w, "{line}")?;
                }
                writeln!(w)?;
            }
            for line in cond.lines() {
                writeln!(w, "{line}")?;
            }
        }
        Format::Csv => {
            cond.write_comments(&mut w)?;
            let mut header = vec![row_var.to_string(), col_var.to_string()];
            header.extend(labels.iter().cloned());
            if let Some(c) = &check {
                header.push(format!("{} <= {response} <= {}", c.lower, c.upper));
                header.push("sum".to_string());
            }
            csv_row(&mut w, &header)?;
            for (i, r) in row_grid.iter().enumerate() {
                for (j, c) in col_grid.iter().enumerate() {
                    let mut row = vec![r.to_string(), c.to_string()];
                    row.extend((0..events.len()).map(|e| t.cell(i, j, e).to_string()));
                    if check.is_some() {
                        let k = i * col_grid.len() + j;
                        row.push(middles[k].to_string());
                        row.push(sums[k].to_string());
                    }
                    csv_row(&mut w, &row)?;
                }
            }
        }
        Format::Json => {
            let cells: Vec<Vec<Vec<f64>>> = (0..row_grid.len())
                .map(|i| (0..col_grid.len()).map(|j| (0..events.len()).map(|e| t.cell(i, j, e)).collect()).collect())
                .collect();
            let check_json = check.as_ref().map(|c| {
                json!({ "lower": c.lower, "upper": c.upper, "middle": middles, "sums": sums, "max_abs_error": worst })
            });
            output::write_json(
                &mut w,
                &json!({
                    "row_variable": row_var,
                    "row_grid": row_grid,
                    "column_variable": col_var,
                    "column_grid": col_grid,
                    "events": events.iter().map(|e| output::event_json(e, &response)).collect::<Vec<_>>(),
                    "cells": cells,
                    "check": check_json,
                    "conditioning": cond.json(),
                }),
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

fn verify_cmd(a: VerifyArgs) -> Result<()> {
    let config = load_config(&a.common)?;
    let out = Out::new(&a.common, &config, Format::Text)?;
    let loaded = require_data(&a.data, &config)?;
    let full_path = a.full.clone().or_else(|| config.full.clone()).ok_or_else(|| missing("full", "full"))?;
    let full = load_model_file(&full_path)?;
    let (full_model, _) = full.model.linear()?;
    let partial = match a.partial.clone().or_else(|| config.partial.clone()).ok_or_else(|| missing("partial", "partial"))? {
        p if p == "null" => {
            let null = fit_linear_model(&loaded.data, &ModelSpec::null(full_model.spec().response().clone()))?;
            ModelSource { model: Model::Linear { model: null, data: loaded.fingerprint.clone() }, file: None }
        }
        p => load_model_file(Path::new(&p))?,
    };
    let (partial_model, _) = partial.model.linear()?;

    let fitted_on_scoring = [&full, &partial].map(|m| m.data() == Some(&loaded.fingerprint));
    let held_out = a.held_out || config.held_out.unwrap_or(false);
    let provenance = if held_out {
        if fitted_on_scoring.iter().any(|s| *s) {
            return Err(Error::usage("--held-out given, but a model was fitted to this very data file"));
        }
        Provenance::HeldOut
    } else if fitted_on_scoring.iter().all(|s| *s) {
        Provenance::InSample
    } else {
        Provenance::Unknown
    };
    let report = verify(full_model, partial_model, &loaded.data, provenance)?;

    let cond = Conditioning {
        models: vec![("full", &full), ("partial", &partial)],
        data: Some(&loaded.fingerprint),
        extra: vec![("provenance", provenance.to_string())],
        ..Default::default()
    };
    let mut w = out.open()?;
    match out.format {
        Format::Text => {
            writeln!(w, "mean CRPS, full:    {}", significant(report.mean_crps_full, 4))?;
            writeln!(w, "mean CRPS, partial: {}", significant(report.mean_crps_partial, 4))?;
            writeln!(w, "skill: {}", significant(report.overall_skill, 2))?;
            let positive = report.per_observation.iter().filter(|o| o.skill > 0.0).count();
            let negative = report.per_observation.iter().filter(|o| o.skill < 0.0).count();
            writeln!(
                w,
                "per-observation skill: {positive} positive, {negative} negative, {} zero",
                report.per_observation.len() - positive - negative
            )?;
            writeln!(w, "in-sample: {}", report.in_sample)?;
            if let Some(warning) = report.warning {
                writeln!(w, "warning: {warning}")?;
            }
            for line in cond.lines() {
                writeln!(w, "{line}")?;
            }
        }
        Format::Csv => {
            cond.write_comments(&mut w)?;
            writeln!(w, "# mean_crps_full: {}", report.mean_crps_full)?;
            writeln!(w, "# mean_crps_partial: {}", report.mean_crps_partial)?;
            writeln!(w, "# overall_skill: {}", report.overall_skill)?;
            writeln!(w, "# in_sample: {}", report.in_sample)?;
            if let Some(warning) = report.warning {
                writeln!(w, "# warning: {warning}")?;
            }
            let mut header: Vec<String> =
                ["index", "observed", "crps_full", "crps_partial", "skill"].map(String::from).to_vec();
            header.extend(report.covariate_views.iter().map(|v| v.variable.to_string()));
            csv_row(&mut w, &header)?;
            for (k, o) in report.per_observation.iter().enumerate() {
                let mut row = vec![
                    o.index.to_string(),
                    o.observed.to_string(),
                    o.crps_full.to_string(),
                    o.crps_partial.to_string(),
                    o.skill.to_string(),
                ];
                row.extend(report.covariate_views.iter().map(|v| v.values[k].to_string()));
                csv_row(&mut w, &row)?;
            }
        }
        Format::Json => output::write_json(
            &mut w,
            &json!({ "report": report, "provenance": provenance, "conditioning": cond.json() }),
        )?,
    }
    w.flush()?;
    Ok(())
}

fn leakage_cmd(a: LeakageArgs) -> Result<()> {
    let config = load_config(&a.common)?;
    let out = Out::new(&a.common, &config, Format::Text)?;
    let source = load_model(&a.model, &config)?;
    let scenario = parse_scenario(&a.scenario, &config)?;
    let bound = |flag: &Option<String>, conf: Option<crate::config::Real>, default: f64| -> Result<f64> {
        match flag {
            Some(s) => parse_real(s),
            None => Ok(conf.map_or(default, |r| r.0)),
        }
    };
    let lower = bound(&a.lower, config.lower, f64::NEG_INFINITY)?;
    let upper = bound(&a.upper, config.upper, f64::INFINITY)?;
    let response = source.response().to_string();
    let bounds = FeasibilityBounds::new(variable(&response)?, lower, upper).map_err(|e| Error::usage(e.to_string()))?;
    let l = leakage(&source.model.predictive(&scenario)?, &bounds)?;

    let cond = Conditioning {
        models: vec![("model", &source)],
        scenario: Some(&scenario),
        extra: vec![("feasible range", format!("[{lower}, {upper}]"))],
        ..Default::default()
    };
    let mut w = out.open()?;
    match out.format {
        Format::Text => {
            let given = given_text(&scenario, source.is_deduced());
            writeln!(w, "Pr({response} < {lower} | {given}) = {}", significant(l.lower_tail, 2))?;
            writeln!(w, "Pr({response} > {upper} | {given}) = {}", significant(l.upper_tail, 2))?;
            writeln!(w, "leakage: {}", significant(l.total, 2))?;
            writeln!(w, "lower_tail: {}, upper_tail: {}, total: {}", l.lower_tail, l.upper_tail, l.total)?;
            for line in cond.lines() {
                writeln!(w, "{line}")?;
            }
        }
        Format::Json => output::write_json(
            &mut w,
            &json!({
                "lower": output::number(lower),
                "upper": output::number(upper),
                "lower_tail": l.lower_tail,
                "upper_tail": l.upper_tail,
                "total": l.total,
                "conditioning": cond.json(),
            }),
        )?,
        Format::Csv => {
            cond.write_comments(&mut w)?;
            csv_row(&mut w, ["lower", "upper", "lower_tail", "upper_tail", "total"])?;
            csv_row(
                &mut w,
                [lower, upper, l.lower_tail, l.upper_tail, l.total].map(|v| v.to_string()),
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

fn synthesize(a: SynthesizeArgs) -> Result<()> {
    let config = load_config(&a.common)?;
    let loaded = require_data(&a.data, &config)?;
    let name = variable(&a.name.clone().or_else(|| config.name.clone()).ok_or_else(|| missing("name", "name"))?)?;
    let seed = a.seed.or(config.seed).ok_or_else(|| missing("seed", "seed"))?;
    let scale = a.scale.or(config.scale).unwrap_or(HalfNormal::DEFAULT_SCALE);
    let generator = HalfNormal::new(scale, seed).map_err(|e| Error::usage(e.to_string()))?;
    let data = synthesize_column(&loaded.data, name, generator)?;
    let path = a.common.output.clone().or_else(|| config.output.clone());
    let mut w = output::open(path.as_ref())?;
    let delimiter = if loaded.delimiter == Delimiter::Auto { Delimiter::Comma } else { loaded.delimiter };
    write_dataset(&data, &mut w, delimiter)?;
    w.flush()?;
    Ok(())
}
