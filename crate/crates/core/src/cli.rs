//! Command-line front end: argument parsing, CSV ingestion, dispatch and
//! report rendering. The binary is a thin wrapper around [`execute`].

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bridge::{serve_stub, BridgeError, FmBackend, ProcessBackend, StubBackend, TcpBackend};
use crate::eval::{
    lag_sweep, rolling_eval, year_end_table, EvalError, RollingEvalResult, SplitSpec, SweepReport,
    SweepSettings, YearEndTable,
};
use crate::forecast::{ExogenousSpec, ForecastError, ForecasterConfig, ModelKind};
use crate::series::{Granularity, SeriesError, TimeSeries};
use crate::srgm::{cumulative_from_counts, srgm_compare, SrgmError, SrgmFitResult, SrgmKind};
use crate::statfit::{adf_test, cdf_samples, rank_distributions, AdfRegression, AdfResult, DistKind, DistRanking, StatError};
use crate::synth::{generate_suite, SuiteSpec, SynthError, DEFAULT_LENGTH};

/// Environment fallback for `--fm-cmd`.
pub const FM_CMD_ENV: &str = "SPIKECAST_FM_CMD";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("input file not found: {0}")]
    MissingFile(PathBuf),
    #[error("{path}: row {row}, column {column}: {message}")]
    SchemaViolation {
        path: PathBuf,
        row: u64,
        column: String,
        message: String,
    },
    #[error("{path}: row {row}, column {column}: negative count {value}")]
    NegativeCount {
        path: PathBuf,
        row: u64,
        column: String,
        value: f64,
    },
    #[error("unsupported output format `{0}` for this report")]
    UnsupportedFormat(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for bad input or configuration, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Runtime(_) | CliError::Io(_) => 2,
            _ => 1,
        }
    }
}

impl From<ForecastError> for CliError {
    fn from(err: ForecastError) -> Self {
        match err {
            ForecastError::Backend(_) | ForecastError::NonFiniteInput(_) => CliError::Runtime(err.to_string()),
            _ => CliError::Invalid(err.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(err: EvalError) -> Self {
        match err {
            EvalError::Forecast(inner) => inner.into(),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<StatError> for CliError {
    fn from(err: StatError) -> Self {
        match err {
            StatError::SingularRegression | StatError::FitFailed(_) => CliError::Runtime(err.to_string()),
            _ => CliError::Invalid(err.to_string()),
        }
    }
}

impl From<SrgmError> for CliError {
    fn from(err: SrgmError) -> Self {
        CliError::Invalid(err.to_string())
    }
}

impl From<SeriesError> for CliError {
    fn from(err: SeriesError) -> Self {
        CliError::Invalid(err.to_string())
    }
}

impl From<SynthError> for CliError {
    fn from(err: SynthError) -> Self {
        CliError::Invalid(err.to_string())
    }
}

impl From<BridgeError> for CliError {
    fn from(err: BridgeError) -> Self {
        CliError::Runtime(err.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "spikecast", version, about = "Forecast and analyse spiky monthly count series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rolling one-step evaluation of one model over the test region.
    Evaluate(EvaluateArgs),
    /// Rolling evaluation for every (model, lag) pair.
    Sweep(SweepArgs),
    /// Year-end total estimates 12..1 months ahead.
    Yearend(YearEndArgs),
    /// Fit reliability growth models to cumulative counts.
    #[command(name = "srgm-fit")]
    SrgmFit(SrgmArgs),
    /// Rank distributions fitted to the CDF curve by K-S p-value.
    #[command(name = "dist-rank")]
    DistRank(DistArgs),
    /// Augmented Dickey-Fuller unit-root test.
    Adf(AdfArgs),
    /// Write a synthetic eight-category suite as CSV.
    Gen(GenArgs),
    /// Serve the stub forecaster over stdin/stdout.
    #[command(name = "bridge-stub", hide = true)]
    BridgeStub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// CSV file: an `index` column followed by one column per series.
    pub input: PathBuf,
    /// Series column to analyse (default: the first one).
    #[arg(long)]
    pub column: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct TransformArgs {
    #[arg(long)]
    pub log1p: bool,
    #[arg(long)]
    pub floor0: bool,
    /// Month-of-year indicators (AR only).
    #[arg(long)]
    pub exog_month: bool,
    /// Code-freeze month indicator, 1-12 (AR only).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=12))]
    pub freeze_month: Option<u8>,
}

impl TransformArgs {
    fn exogenous(&self) -> Option<ExogenousSpec> {
        (self.exog_month || self.freeze_month.is_some()).then_some(ExogenousSpec {
            month_of_year: self.exog_month,
            code_freeze_month: self.freeze_month,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct FmArgs {
    /// Sidecar launch command (falls back to $SPIKECAST_FM_CMD).
    #[arg(long, conflicts_with = "fm_addr")]
    pub fm_cmd: Option<String>,
    /// Address of a sidecar listening on TCP.
    #[arg(long)]
    pub fm_addr: Option<String>,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub fm_freq: u8,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_parser = parse_model)]
    pub model: ModelKind,
    #[arg(long, default_value_t = 1)]
    pub lag: usize,
    #[command(flatten)]
    pub transforms: TransformArgs,
    /// TRAIN,VAL,TEST exclusive end indices (default 4/7, 5/7, all).
    #[arg(long, value_parser = parse_split)]
    pub split: Option<SplitSpec>,
    #[command(flatten)]
    pub fm: FmArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma-separated model kinds.
    #[arg(long, value_delimiter = ',', value_parser = parse_model, default_value = "pv,ma,ar")]
    pub models: Vec<ModelKind>,
    /// Inclusive lag range `A..B`.
    #[arg(long, value_parser = parse_lags, default_value = "1..12")]
    pub lags: LagRange,
    #[command(flatten)]
    pub transforms: TransformArgs,
    #[arg(long, value_parser = parse_split)]
    pub split: Option<SplitSpec>,
    #[command(flatten)]
    pub fm: FmArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct YearEndArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_parser = parse_model)]
    pub model: ModelKind,
    #[arg(long, default_value_t = 1)]
    pub lag: usize,
    #[command(flatten)]
    pub transforms: TransformArgs,
    /// Position of the first month of the fiscal year (default: last 12 periods).
    #[arg(long)]
    pub window_start: Option<usize>,
    #[command(flatten)]
    pub fm: FmArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SrgmArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma-separated model names (default: every mean-value model).
    #[arg(long, value_delimiter = ',')]
    pub kinds: Vec<SrgmKind>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DistArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma-separated distribution names (default: all eight).
    #[arg(long, value_delimiter = ',')]
    pub dists: Vec<DistKind>,
    /// Fit the raw values instead of the trimmed cumulative curve.
    #[arg(long)]
    pub raw: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AdfArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub max_lag: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_LENGTH)]
    pub length: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LagRange {
    pub first: usize,
    pub last: usize,
}

impl LagRange {
    pub fn lags(&self) -> Vec<usize> {
        (self.first..=self.last).collect()
    }
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse()
}

/// `A..B` (inclusive) or a single lag.
fn parse_lags(s: &str) -> Result<LagRange, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad lag `{t}` in `{s}`"))
    };
    let (first, last) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let n = num(s)?;
            (n, n)
        }
    };
    if first == 0 || first > last {
        return Err(format!("lag range `{s}` must satisfy 1 <= A <= B"));
    }
    Ok(LagRange { first, last })
}

fn parse_split(s: &str) -> Result<SplitSpec, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("split `{s}` must be three integers TRAIN,VAL,TEST"))?;
    match parts[..] {
        [a, b, c] => Ok(SplitSpec::new(a, b, c)),
        _ => Err(format!("split `{s}` must be three integers TRAIN,VAL,TEST")),
    }
}

/// Reads an `index,<name>,...` file into one monthly series per value
/// column. Lines starting with `#` are skipped; LF and CRLF both work.
pub fn parse_series_csv(path: &Path) -> Result<Vec<TimeSeries>, CliError> {
    if !path.is_file() {
        return Err(CliError::MissingFile(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    let schema = |row: u64, column: &str, message: String| CliError::SchemaViolation {
        path: path.to_path_buf(),
        row,
        column: column.to_string(),
        message,
    };
    let headers = reader
        .headers()
        .map_err(|e| schema(1, "-", e.to_string()))?
        .clone();
    if headers.get(0) != Some("index") {
        return Err(schema(1, headers.get(0).unwrap_or(""), "first column must be `index`".into()));
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    if names.is_empty() {
        return Err(schema(1, "-", "no value columns".into()));
    }

    let mut start = None;
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(n as u64 + 2, |p| p.line());
            schema(row, "-", e.to_string())
        })?;
        let row = record.position().map_or(n as u64 + 2, |p| p.line());
        let index: i64 = record[0]
            .parse()
            .map_err(|_| schema(row, "index", format!("`{}` is not an integer", &record[0])))?;
        let expected = start.map(|s: i64| s + n as i64);
        match expected {
            None => start = Some(index),
            Some(e) if e != index => {
                return Err(schema(row, "index", format!("expected index {e}, found {index}")));
            }
            _ => {}
        }
        for (c, name) in names.iter().enumerate() {
            let raw = &record[c + 1];
            let value: f64 = raw
                .parse()
                .map_err(|_| schema(row, name, format!("`{raw}` is not a number")))?;
            if !value.is_finite() {
                return Err(schema(row, name, format!("`{raw}` is not finite")));
            }
            if value < 0.0 {
                return Err(CliError::NegativeCount {
                    path: path.to_path_buf(),
                    row,
                    column: name.clone(),
                    value,
                });
            }
            columns[c].push(value);
        }
    }
    let start = start.ok_or_else(|| schema(2, "-", "no data rows".into()))?;
    names
        .into_iter()
        .zip(columns)
        .map(|(name, values)| Ok(TimeSeries::new(values, Granularity::Monthly, start, name)?))
        .collect()
}

/// Writes series side by side in the input schema, LF line endings.
pub fn write_series_csv<W: Write>(series: &[TimeSeries], out: W) -> Result<(), CliError> {
    let mut writer = csv::WriterBuilder::new().from_writer(out);
    let mut header = vec!["index".to_string()];
    header.extend(series.iter().map(|s| s.label().to_string()));
    writer.write_record(&header).map_err(csv_io)?;
    let len = series.iter().map(TimeSeries::len).min().unwrap_or(0);
    let start = series.first().map_or(0, TimeSeries::start_index);
    for i in 0..len {
        let mut row = vec![(start + i as i64).to_string()];
        row.extend(series.iter().map(|s| number(s.values()[i])));
        writer.write_record(&row).map_err(csv_io)?;
    }
    writer.flush()?;
    Ok(())
}

fn csv_io(err: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(err))
}

/// Shortest representation that parses back to the same `f64`; the same
/// text JSON output uses.
fn number(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateReport {
    pub series: String,
    pub split: SplitSpec,
    pub result: RollingEvalResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub series: String,
    pub split: SplitSpec,
    pub report: SweepReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearEndOutput {
    pub series: String,
    pub table: YearEndTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrgmOutput {
    pub series: String,
    pub fits: Vec<SrgmFitResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistOutput {
    pub series: String,
    pub samples: usize,
    pub ranking: DistRanking,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfOutput {
    pub series: String,
    pub result: AdfResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Report {
    Evaluate(EvaluateReport),
    Sweep(SweepOutput),
    Yearend(YearEndOutput),
    SrgmFit(SrgmOutput),
    DistRank(DistOutput),
    Adf(AdfOutput),
}

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Text(String),
    Int(i64),
    Num(f64),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => number(*x),
            Cell::Empty => String::new(),
        }
    }

    fn text(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.6}"),
            other => other.csv(),
        }
    }

    fn right_aligned(&self) -> bool {
        matches!(self, Cell::Int(_) | Cell::Num(_))
    }
}

fn opt_num(x: Option<f64>) -> Cell {
    x.map_or(Cell::Empty, Cell::Num)
}

struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
    /// Extra lines shown under the text rendering only.
    notes: Vec<String>,
}

impl Report {
    fn table(&self) -> Table {
        match self {
            Report::Evaluate(r) => {
                let m = &r.result.metrics;
                Table {
                    columns: cols(&["index", "actual", "predicted"]),
                    rows: r
                        .result
                        .per_step
                        .iter()
                        .map(|s| vec![Cell::Int(s.index as i64), Cell::Num(s.actual), Cell::Num(s.predicted)])
                        .collect(),
                    notes: vec![
                        format!("series {} model {}", r.series, r.result.config.label()),
                        format!("nMAE {:.6}  nMSE {:.6}  nRMSE {:.6}", m.mae, m.mse, m.rmse),
                    ],
                }
            }
            Report::Sweep(r) => {
                let mut notes = vec![format!("series {}", r.series)];
                if let Some(best) = r.report.best {
                    for (name, (kind, lag)) in [("mae", best.mae), ("mse", best.mse), ("rmse", best.rmse)] {
                        notes.push(format!("best by {name}: {kind}({lag})"));
                    }
                }
                notes.extend(r.report.notices.iter().cloned());
                Table {
                    columns: cols(&["model", "lag", "mae", "mse", "rmse"]),
                    rows: r
                        .report
                        .rows
                        .iter()
                        .map(|row| {
                            vec![
                                Cell::Text(row.kind.to_string()),
                                Cell::Int(row.lag as i64),
                                Cell::Num(row.mae),
                                Cell::Num(row.mse),
                                Cell::Num(row.rmse),
                            ]
                        })
                        .collect(),
                    notes,
                }
            }
            Report::Yearend(r) => {
                let mut columns = vec!["a".to_string()];
                columns.extend((1..=12).map(|m| format!("m{m}")));
                columns.extend(cols(&["sum", "error_pct"]));
                let rows = r
                    .table
                    .all_rows()
                    .map(|row| {
                        let label = if row.months_before == 0 {
                            "actual".to_string()
                        } else {
                            row.months_before.to_string()
                        };
                        let mut cells = vec![Cell::Text(label)];
                        cells.extend(row.values.iter().map(|&v| Cell::Num(v)));
                        cells.push(Cell::Num(row.sum));
                        cells.push(opt_num(row.error_pct));
                        cells
                    })
                    .collect();
                Table {
                    columns,
                    rows,
                    notes: vec![format!(
                        "series {} model {} window starts at position {}",
                        r.series,
                        r.table.config.label(),
                        r.table.window_start
                    )],
                }
            }
            Report::SrgmFit(r) => Table {
                columns: cols(&["model", "params", "sse", "iterations", "converged"]),
                rows: r
                    .fits
                    .iter()
                    .map(|f| {
                        let params = f
                            .params
                            .values()
                            .iter()
                            .map(|v| number(*v))
                            .collect::<Vec<_>>()
                            .join(" ");
                        vec![
                            Cell::Text(f.kind.name().to_string()),
                            Cell::Text(params),
                            Cell::Num(f.sse),
                            Cell::Int(f.iterations as i64),
                            Cell::Text(f.converged.to_string()),
                        ]
                    })
                    .collect(),
                notes: vec![format!("series {}", r.series)],
            },
            Report::DistRank(r) => Table {
                columns: cols(&["distribution", "params", "d_stat", "p_value", "note"]),
                rows: r
                    .ranking
                    .entries
                    .iter()
                    .map(|e| {
                        let params = e.params.as_ref().map_or(String::new(), |p| {
                            p.shape
                                .iter()
                                .chain([&p.loc, &p.scale])
                                .map(|v| number(*v))
                                .collect::<Vec<_>>()
                                .join(" ")
                        });
                        vec![
                            Cell::Text(e.kind.name().to_string()),
                            Cell::Text(params),
                            Cell::Num(e.ks.d_stat),
                            Cell::Num(e.ks.p_value),
                            e.note.clone().map_or(Cell::Empty, Cell::Text),
                        ]
                    })
                    .collect(),
                notes: vec![format!("series {} ({} samples)", r.series, r.samples)],
            },
            Report::Adf(r) => {
                let a = &r.result;
                Table {
                    columns: cols(&["statistic", "p_value", "lags_used", "n_obs", "cv_1pct", "cv_5pct", "cv_10pct"]),
                    rows: vec![vec![
                        Cell::Num(a.statistic),
                        Cell::Num(a.p_value),
                        Cell::Int(a.lags_used as i64),
                        Cell::Int(a.n_obs as i64),
                        Cell::Num(a.critical_values[0]),
                        Cell::Num(a.critical_values[1]),
                        Cell::Num(a.critical_values[2]),
                    ]],
                    notes: vec![format!(
                        "series {}: {}",
                        r.series,
                        if a.p_value < 0.05 {
                            "unit root rejected at 5% (stationary)"
                        } else {
                            "unit root not rejected at 5% (non-stationary)"
                        }
                    )],
                }
            }
        }
    }
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Renders a report. Output is deterministic and ends with a newline.
pub fn render_report(report: &Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| CliError::UnsupportedFormat(format!("json: {e}")))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let table = report.table();
            let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
            writer.write_record(&table.columns).map_err(csv_io)?;
            for row in &table.rows {
                writer
                    .write_record(row.iter().map(Cell::csv))
                    .map_err(csv_io)?;
            }
            let bytes = writer
                .into_inner()
                .map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
            String::from_utf8(bytes).map_err(|e| CliError::Runtime(e.to_string()))
        }
        Format::Text => {
            let table = report.table();
            let rendered: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|r| r.iter().map(Cell::text).collect())
                .collect();
            let widths: Vec<usize> = table
                .columns
                .iter()
                .enumerate()
                .map(|(c, name)| {
                    rendered
                        .iter()
                        .map(|r| r[c].chars().count())
                        .chain([name.chars().count()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let mut out = String::new();
            let line = |cells: Vec<(String, bool)>| {
                let parts: Vec<String> = cells
                    .into_iter()
                    .zip(&widths)
                    .map(|((s, right), &w)| {
                        if right {
                            format!("{s:>w$}")
                        } else {
                            format!("{s:<w$}")
                        }
                    })
                    .collect();
                parts.join("  ").trim_end().to_string()
            };
            out.push_str(&line(table.columns.iter().map(|c| (c.clone(), false)).collect()));
            out.push('\n');
            for (cells, text) in table.rows.iter().zip(rendered) {
                out.push_str(&line(
                    text.into_iter()
                        .zip(cells)
                        .map(|(s, c)| (s, c.right_aligned()))
                        .collect(),
                ));
                out.push('\n');
            }
            for note in table.notes {
                out.push_str(&note);
                out.push('\n');
            }
            Ok(out)
        }
    }
}

/// Process-level settings the library cannot discover on its own.
#[derive(Debug, Clone, Default)]
pub struct Context {
    /// Program to launch as `<program> bridge-stub` when no sidecar is
    /// configured. `None` uses an in-process stub instead.
    pub stub_program: Option<PathBuf>,
    /// Value of `SPIKECAST_FM_CMD`, if set.
    pub fm_cmd_env: Option<String>,
}

impl Context {
    pub fn from_env() -> Self {
        Self {
            stub_program: std::env::current_exe().ok(),
            fm_cmd_env: std::env::var(FM_CMD_ENV).ok().filter(|s| !s.trim().is_empty()),
        }
    }
}

fn open_backend(fm: &FmArgs, ctx: &Context) -> Result<Box<dyn FmBackend>, CliError> {
    if let Some(addr) = &fm.fm_addr {
        return Ok(Box::new(TcpBackend::connect(addr)?));
    }
    if let Some(cmd) = fm.fm_cmd.as_ref().or(ctx.fm_cmd_env.as_ref()) {
        return Ok(Box::new(ProcessBackend::spawn_command_line(cmd)?));
    }
    match &ctx.stub_program {
        Some(program) => {
            let program = program.to_string_lossy();
            Ok(Box::new(ProcessBackend::spawn(&program, &["bridge-stub"])?))
        }
        None => Ok(Box::new(StubBackend)),
    }
}

fn lend(backend: &mut Option<Box<dyn FmBackend>>) -> Option<&mut dyn FmBackend> {
    match backend {
        Some(b) => Some(b.as_mut()),
        None => None,
    }
}

fn select_series(input: &InputArgs) -> Result<TimeSeries, CliError> {
    let mut all = parse_series_csv(&input.input)?;
    match &input.column {
        None => Ok(all.swap_remove(0)),
        Some(name) => {
            let available: Vec<String> = all.iter().map(|s| s.label().to_string()).collect();
            all.into_iter().find(|s| s.label() == name).ok_or_else(|| {
                CliError::Invalid(format!("no column `{name}`; available: {}", available.join(", ")))
            })
        }
    }
}

fn forecaster_config(kind: ModelKind, lag: usize, t: &TransformArgs, fm: &FmArgs) -> Result<ForecasterConfig, CliError> {
    let mut config = ForecasterConfig::new(kind, lag)
        .with_log1p(t.log1p)
        .with_floor0(t.floor0)
        .with_fm_freq(fm.fm_freq);
    if let Some(spec) = t.exogenous() {
        config = config.with_exogenous(spec);
    }
    config.validate()?;
    Ok(config)
}

/// Runs one analysis command and returns its report.
pub fn run(command: &Command, ctx: &Context) -> Result<Report, CliError> {
    match command {
        Command::Evaluate(a) => {
            let series = select_series(&a.input)?;
            let config = forecaster_config(a.model, a.lag, &a.transforms, &a.fm)?;
            let split = a.split.unwrap_or_else(|| SplitSpec::default_for(series.len()));
            let mut backend = match config.kind {
                ModelKind::Fm => Some(open_backend(&a.fm, ctx)?),
                _ => None,
            };
            let result = rolling_eval(&series, config, split, lend(&mut backend))?;
            Ok(Report::Evaluate(EvaluateReport {
                series: series.label().to_string(),
                split,
                result,
            }))
        }
        Command::Sweep(a) => {
            let series = select_series(&a.input)?;
            let settings = SweepSettings {
                use_log1p: a.transforms.log1p,
                use_floor0: a.transforms.floor0,
                exogenous: a.transforms.exogenous(),
                fm_freq: a.fm.fm_freq,
                ..SweepSettings::default()
            };
            if let Some(spec) = settings.exogenous {
                spec.validate()?;
            }
            let split = a.split.unwrap_or_else(|| SplitSpec::default_for(series.len()));
            let mut backend = if a.models.contains(&ModelKind::Fm) {
                Some(open_backend(&a.fm, ctx)?)
            } else {
                None
            };
            let report = lag_sweep(
                &series,
                &a.models,
                &a.lags.lags(),
                split,
                settings,
                lend(&mut backend),
            )?;
            Ok(Report::Sweep(SweepOutput {
                series: series.label().to_string(),
                split,
                report,
            }))
        }
        Command::Yearend(a) => {
            let series = select_series(&a.input)?;
            let config = forecaster_config(a.model, a.lag, &a.transforms, &a.fm)?;
            let window_start = match a.window_start {
                Some(w) => w,
                None => series.len().checked_sub(12).ok_or_else(|| {
                    CliError::Invalid(format!("need at least 12 periods, series has {}", series.len()))
                })?,
            };
            let mut backend = match config.kind {
                ModelKind::Fm => Some(open_backend(&a.fm, ctx)?),
                _ => None,
            };
            let table = year_end_table(&series, config, window_start, lend(&mut backend))?;
            Ok(Report::Yearend(YearEndOutput {
                series: series.label().to_string(),
                table,
            }))
        }
        Command::SrgmFit(a) => {
            let series = select_series(&a.input)?;
            let kinds = if a.kinds.is_empty() {
                SrgmKind::MEAN_VALUE.to_vec()
            } else {
                a.kinds.clone()
            };
            let data = cumulative_from_counts(series.values());
            let fits = srgm_compare(&data, &kinds)?;
            Ok(Report::SrgmFit(SrgmOutput {
                series: series.label().to_string(),
                fits,
            }))
        }
        Command::DistRank(a) => {
            let series = select_series(&a.input)?;
            let samples = if a.raw {
                series.values().to_vec()
            } else {
                cdf_samples(&series)?
            };
            let kinds = if a.dists.is_empty() {
                DistKind::ALL.to_vec()
            } else {
                a.dists.clone()
            };
            Ok(Report::DistRank(DistOutput {
                series: series.label().to_string(),
                samples: samples.len(),
                ranking: rank_distributions(&samples, &kinds),
            }))
        }
        Command::Adf(a) => {
            let series = select_series(&a.input)?;
            let result = adf_test(series.values(), a.max_lag, AdfRegression::Constant)?;
            Ok(Report::Adf(AdfOutput {
                series: series.label().to_string(),
                result,
            }))
        }
        Command::Gen(_) | Command::BridgeStub => Err(CliError::Usage(
            "this command writes data, not a report".into(),
        )),
    }
}

fn output_args(command: &Command) -> Option<&OutputArgs> {
    match command {
        Command::Evaluate(a) => Some(&a.output),
        Command::Sweep(a) => Some(&a.output),
        Command::Yearend(a) => Some(&a.output),
        Command::SrgmFit(a) => Some(&a.output),
        Command::DistRank(a) => Some(&a.output),
        Command::Adf(a) => Some(&a.output),
        Command::Gen(_) | Command::BridgeStub => None,
    }
}

fn deliver<W: Write>(text: &[u8], path: Option<&Path>, stdout: &mut W) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text)?,
    }
    Ok(())
}

fn dispatch<R: BufRead, W: Write>(
    cli: &Cli,
    ctx: &Context,
    stdin: R,
    stdout: &mut W,
) -> Result<(), CliError> {
    match &cli.command {
        Command::BridgeStub => Ok(serve_stub(stdin, stdout)?),
        Command::Gen(g) => {
            let suite = generate_suite(&SuiteSpec::new(g.seed).with_length(g.length))?;
            let series: Vec<TimeSeries> = suite.into_iter().map(|(_, s)| s).collect();
            let mut buf = Vec::new();
            write_series_csv(&series, &mut buf)?;
            deliver(&buf, g.out.as_deref(), stdout)
        }
        command => {
            let report = run(command, ctx)?;
            let output = output_args(command).expect("report commands carry output args");
            let text = render_report(&report, output.format)?;
            deliver(text.as_bytes(), output.out.as_deref(), stdout)
        }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code: 0 success, 1 invalid input or usage, 2 runtime failure.
pub fn execute<I, T, R, W, E>(args: I, ctx: &Context, stdin: R, stdout: &mut W, stderr: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    R: BufRead,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let rendered = err.render().to_string();
            return if err.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
                1
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
                0
            };
        }
    };
    match dispatch(&cli, ctx, stdin, stdout) {
        Ok(()) => 0,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            err.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("spikecast").chain(args.iter().copied());
        let code = execute(argv, &Context::default(), Cursor::new(Vec::new()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn parse_minimal_and_multi_column() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "a.csv", "index,total\n1,4\n2,0\n3,7\n");
        let s = parse_series_csv(&p).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].label(), "total");
        assert_eq!(s[0].values(), &[4.0, 0.0, 7.0]);
        assert_eq!(s[0].start_index(), 1);

        let p = write(&dir, "b.csv", "# exported\r\nindex,experiment,migration\r\n0,1,2\r\n# mid\r\n1,3,4\r\n");
        let s = parse_series_csv(&p).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].label(), "migration");
        assert_eq!(s[1].values(), &[2.0, 4.0]);
    }

    #[test]
    fn parse_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "neg.csv", "index,total\n1,4\n2,-1\n");
        match parse_series_csv(&p) {
            Err(CliError::NegativeCount { row, column, .. }) => {
                assert_eq!(row, 3);
                assert_eq!(column, "total");
            }
            other => panic!("{other:?}"),
        }
        let p = write(&dir, "bad.csv", "index,total\n1,4\n2,x\n");
        let err = parse_series_csv(&p).unwrap_err();
        assert!(matches!(err, CliError::SchemaViolation { row: 3, .. }), "{err}");
        assert!(err.to_string().contains("total"));
        let p = write(&dir, "hdr.csv", "period,total\n1,4\n");
        assert!(matches!(parse_series_csv(&p), Err(CliError::SchemaViolation { .. })));
        let p = write(&dir, "gap.csv", "index,total\n1,4\n3,4\n");
        assert!(matches!(parse_series_csv(&p), Err(CliError::SchemaViolation { .. })));
        let p = write(&dir, "ragged.csv", "index,total\n1,4\n2\n");
        assert!(matches!(parse_series_csv(&p), Err(CliError::SchemaViolation { .. })));
        assert!(matches!(
            parse_series_csv(&dir.path().join("nope.csv")),
            Err(CliError::MissingFile(_))
        ));
    }

    #[test]
    fn lag_and_split_parsing() {
        assert_eq!(parse_lags("1..12").unwrap(), LagRange { first: 1, last: 12 });
        assert_eq!(parse_lags("3").unwrap(), LagRange { first: 3, last: 3 });
        assert_eq!(parse_lags("2..=4").unwrap().lags(), vec![2, 3, 4]);
        assert!(parse_lags("0..3").is_err());
        assert!(parse_lags("5..2").is_err());
        assert_eq!(parse_split("48,60,84").unwrap(), SplitSpec::new(48, 60, 84));
        assert!(parse_split("48,60").is_err());
    }

    #[test]
    fn exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let good = write(&dir, "g.csv", "index,total\n0,1\n1,2\n2,3\n3,4\n");
        let neg = write(&dir, "n.csv", "index,total\n0,1\n1,-2\n");

        let (code, out, _) = run_args(&["evaluate", good.to_str().unwrap(), "--model", "pv", "--split", "1,1,4"]);
        assert_eq!(code, 0);
        assert!(out.contains("nMAE 0.100000"), "{out}");

        assert_eq!(run_args(&["evaluate", good.to_str().unwrap()]).0, 1);
        assert_eq!(run_args(&["bogus"]).0, 1);
        assert_eq!(run_args(&["evaluate", "/no/such.csv", "--model", "pv"]).0, 1);
        assert_eq!(run_args(&["evaluate", neg.to_str().unwrap(), "--model", "pv"]).0, 1);
        assert_eq!(run_args(&["evaluate", good.to_str().unwrap(), "--model", "ma", "--exog-month"]).0, 1);
        assert_eq!(run_args(&["evaluate", good.to_str().unwrap(), "--model", "pv", "--split", "1,9,9"]).0, 1);
        // a sidecar that cannot start is a runtime failure
        assert_eq!(
            run_args(&["evaluate", good.to_str().unwrap(), "--model", "fm", "--split", "1,1,4", "--fm-cmd", "/no/such/sidecar"]).0,
            2
        );
        let flat = write(&dir, "flat.csv", &format!("index,total\n{}", (0..30).map(|i| format!("{i},5\n")).collect::<String>()));
        assert_eq!(run_args(&["adf", flat.to_str().unwrap(), "--max-lag", "2"]).0, 2);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn fm_uses_in_process_stub_by_default() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "g.csv", "index,total\n0,1\n1,2\n2,3\n3,4\n");
        let (code, out, err) = run_args(&["evaluate", p.to_str().unwrap(), "--model", "fm", "--lag", "2", "--split", "2,2,4", "--format", "csv"]);
        assert_eq!(code, 0, "{err}");
        // mean of the last two values
        assert_eq!(out, "index,actual,predicted\n2,3.0,1.5\n3,4.0,2.5\n");
    }

    #[test]
    fn renders_are_deterministic_and_csv_matches_json() {
        let dir = tempfile::tempdir().unwrap();
        let data = (0..40).map(|i| format!("{i},{}\n", (i * 7 % 11) as f64 / 2.0)).collect::<String>();
        let p = write(&dir, "s.csv", &format!("index,total\n{data}"));
        let args = SweepArgs::parse_from_args(p.to_str().unwrap());
        let report = run(&Command::Sweep(args), &Context::default()).unwrap();
        let csv_a = render_report(&report, Format::Csv).unwrap();
        assert_eq!(csv_a, render_report(&report, Format::Csv).unwrap());
        assert_eq!(render_report(&report, Format::Text).unwrap(), render_report(&report, Format::Text).unwrap());

        let json = render_report(&report, Format::Json).unwrap();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(render_report(&back, Format::Csv).unwrap(), csv_a);

        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let rows = value["report"]["rows"].as_array().unwrap();
        let mut lines = csv_a.lines();
        assert_eq!(lines.next(), Some("model,lag,mae,mse,rmse"));
        for (line, row) in lines.zip(rows) {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells[0], row["kind"].as_str().unwrap());
            for (cell, key) in cells[1..].iter().zip(["lag", "mae", "mse", "rmse"]) {
                assert_eq!(*cell, row[key].to_string());
            }
        }
    }

    #[test]
    fn empty_sweep_is_header_only_csv() {
        let report = Report::Sweep(SweepOutput {
            series: "x".into(),
            split: SplitSpec::new(1, 1, 2),
            report: SweepReport {
                rows: vec![],
                best: None,
                notices: vec![],
            },
        });
        assert_eq!(render_report(&report, Format::Csv).unwrap(), "model,lag,mae,mse,rmse\n");
    }

    #[test]
    fn csv_quotes_fields_with_commas() {
        let report = Report::DistRank(DistOutput {
            series: "x".into(),
            samples: 2,
            ranking: DistRanking {
                entries: vec![crate::statfit::RankedDist {
                    kind: DistKind::Beta,
                    params: None,
                    ks: crate::statfit::KsResult { d_stat: 1.0, p_value: 0.0, n: 2 },
                    note: Some("need 3 samples, got 2".into()),
                }],
            },
        });
        let csv = render_report(&report, Format::Csv).unwrap();
        assert!(csv.ends_with("beta,,1.0,0.0,\"need 3 samples, got 2\"\n"), "{csv}");
    }

    impl SweepArgs {
        fn parse_from_args(path: &str) -> Self {
            match Cli::parse_from(["spikecast", "sweep", path, "--lags", "1..3"]).command {
                Command::Sweep(a) => a,
                _ => unreachable!(),
            }
        }
    }
}
