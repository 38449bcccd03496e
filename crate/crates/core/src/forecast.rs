//! The four forecaster families behind one fit/predict contract.
//!
//! * `PV`: previous value.
//! * `MA(lag)`: mean of the last `lag` values.
//! * `AR(lag)`: `o_i = b + sum_j c_j o_{i-j} (+ exogenous terms)`, fitted by
//!   conditional least squares.
//! * `FM(lag)`: zero-shot forecast from a foundation-model sidecar, given the
//!   last `lag` values as context.
//!
//! A [`Forecaster`] refits on every call; the transforms configured in
//! [`ForecasterConfig`] wrap every kind the same way: `log1p` on the
//! history, `expm1` on the raw prediction, then the zero floor.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bridge::{BridgeError, FmBackend};
use crate::lstsq::{self, Matrix};
use crate::series::{log1p_forward, log1p_inverse, SeriesError};

#[derive(Debug, Error)]
pub enum ForecastError {
    #[error("history is empty")]
    EmptyHistory,
    #[error("insufficient history: need {needed} values, have {available}")]
    InsufficientHistory { needed: usize, available: usize },
    #[error("history contains a non-finite value at position {0}")]
    NonFiniteInput(usize),
    #[error("exogenous input mismatch: {0}")]
    ExogMismatch(String),
    #[error("the FM forecaster needs a sidecar backend")]
    MissingBackend,
    #[error("invalid forecaster configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Transform(#[from] SeriesError),
    #[error(transparent)]
    Backend(#[from] BridgeError),
}

/// Model family. The declaration order is the tie-break order in sweeps.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "UPPERCASE")]
pub enum ModelKind {
    Pv,
    Ma,
    Ar,
    Fm,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Pv => "PV",
            ModelKind::Ma => "MA",
            ModelKind::Ar => "AR",
            ModelKind::Fm => "FM",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pv" => Ok(ModelKind::Pv),
            "ma" => Ok(ModelKind::Ma),
            "ar" => Ok(ModelKind::Ar),
            "fm" => Ok(ModelKind::Fm),
            other => Err(format!("unknown model kind `{other}` (expected pv, ma, ar or fm)")),
        }
    }
}

/// Calendar covariates for the AR model.
///
/// Periods are mapped to months by `period_index mod 12`, with 0 the first
/// month of the year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ExogenousSpec {
    /// Month-of-year one-hot with the first month dropped (11 columns).
    pub month_of_year: bool,
    /// Month (1-12) flagged by a 0/1 code-freeze indicator column.
    pub code_freeze_month: Option<u8>,
}

impl ExogenousSpec {
    pub fn validate(&self) -> Result<(), ForecastError> {
        match self.code_freeze_month {
            Some(m) if !(1..=12).contains(&m) => Err(ForecastError::InvalidConfig(format!(
                "code freeze month must be in 1..=12, got {m}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn width(&self) -> usize {
        usize::from(self.month_of_year) * 11 + usize::from(self.code_freeze_month.is_some())
    }

    /// Covariate row for one absolute period index.
    pub fn row(&self, period_index: i64) -> Vec<f64> {
        let month = period_index.rem_euclid(12) as usize;
        let mut row = Vec::with_capacity(self.width());
        if self.month_of_year {
            row.extend((1..12).map(|m| if m == month { 1.0 } else { 0.0 }));
        }
        if let Some(freeze) = self.code_freeze_month {
            row.push(if month + 1 == usize::from(freeze) { 1.0 } else { 0.0 });
        }
        row
    }

    /// Rows for `len` consecutive periods starting at `start_index`.
    pub fn rows(&self, start_index: i64, len: usize) -> Vec<Vec<f64>> {
        (0..len).map(|i| self.row(start_index + i as i64)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecasterConfig {
    pub kind: ModelKind,
    pub lag: usize,
    pub use_log1p: bool,
    pub use_floor0: bool,
    pub exogenous: Option<ExogenousSpec>,
    /// Frequency hint forwarded to the FM sidecar (0 or 1).
    pub fm_freq: u8,
}

impl ForecasterConfig {
    /// Builds a config; PV always gets lag 1.
    pub fn new(kind: ModelKind, lag: usize) -> Self {
        Self {
            kind,
            lag: if kind == ModelKind::Pv { 1 } else { lag },
            use_log1p: false,
            use_floor0: false,
            exogenous: None,
            fm_freq: 0,
        }
    }

    pub fn pv() -> Self {
        Self::new(ModelKind::Pv, 1)
    }

    pub fn ma(lag: usize) -> Self {
        Self::new(ModelKind::Ma, lag)
    }

    pub fn ar(lag: usize) -> Self {
        Self::new(ModelKind::Ar, lag)
    }

    pub fn fm(lag: usize) -> Self {
        Self::new(ModelKind::Fm, lag)
    }

    pub fn with_log1p(mut self, on: bool) -> Self {
        self.use_log1p = on;
        self
    }

    pub fn with_floor0(mut self, on: bool) -> Self {
        self.use_floor0 = on;
        self
    }

    pub fn with_exogenous(mut self, spec: ExogenousSpec) -> Self {
        self.exogenous = Some(spec);
        self
    }

    pub fn with_fm_freq(mut self, freq: u8) -> Self {
        self.fm_freq = freq;
        self
    }

    pub fn validate(&self) -> Result<(), ForecastError> {
        if self.lag == 0 {
            return Err(ForecastError::InvalidConfig("lag must be at least 1".into()));
        }
        if self.kind == ModelKind::Pv && self.lag != 1 {
            return Err(ForecastError::InvalidConfig("PV always uses lag 1".into()));
        }
        if self.fm_freq > 1 {
            return Err(ForecastError::InvalidConfig(format!(
                "fm_freq must be 0 or 1, got {}",
                self.fm_freq
            )));
        }
        if let Some(exog) = &self.exogenous {
            exog.validate()?;
            if self.kind != ModelKind::Ar && exog.width() > 0 {
                return Err(ForecastError::InvalidConfig(
                    "exogenous covariates are only used by AR".into(),
                ));
            }
        }
        Ok(())
    }

    fn exog_width(&self) -> usize {
        self.exogenous.map_or(0, |e| e.width())
    }

    /// Shortest history a one-step fit and prediction can work from.
    pub fn min_history(&self) -> usize {
        match self.kind {
            ModelKind::Pv => 1,
            ModelKind::Ma => self.lag,
            // rows (len - lag) must cover 1 + lag + exog unknowns
            ModelKind::Ar => 2 * self.lag + 1 + self.exog_width(),
            ModelKind::Fm => 1,
        }
    }

    /// Short label such as `MA(6)` or `PV`.
    pub fn label(&self) -> String {
        match self.kind {
            ModelKind::Pv => "PV".to_string(),
            kind => format!("{kind}({})", self.lag),
        }
    }
}

/// Fitted autoregression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArModel {
    pub intercept: f64,
    /// `coefficients[j]` multiplies the value `j + 1` steps back.
    pub coefficients: Vec<f64>,
    pub exog_coefficients: Vec<f64>,
    pub residual_variance: f64,
    pub n_obs: usize,
}

impl ArModel {
    pub fn lag(&self) -> usize {
        self.coefficients.len()
    }
}

pub fn pv_predict(history: &[f64]) -> Result<f64, ForecastError> {
    history.last().copied().ok_or(ForecastError::EmptyHistory)
}

pub fn ma_predict(history: &[f64], lag: usize) -> Result<f64, ForecastError> {
    if lag == 0 {
        return Err(ForecastError::InvalidConfig("lag must be at least 1".into()));
    }
    if history.len() < lag {
        return Err(ForecastError::InsufficientHistory {
            needed: lag,
            available: history.len(),
        });
    }
    let window = &history[history.len() - lag..];
    Ok(window.iter().sum::<f64>() / lag as f64)
}

/// Conditional least-squares fit of an AR(`lag`) model with intercept.
///
/// `exog`, when given, holds one covariate row per history value. The first
/// `lag` observations only serve as regressors. Rank-deficient designs get
/// the minimum-norm solution.
pub fn ar_fit(
    history: &[f64],
    lag: usize,
    exog: Option<&[Vec<f64>]>,
) -> Result<ArModel, ForecastError> {
    if lag == 0 {
        return Err(ForecastError::InvalidConfig("lag must be at least 1".into()));
    }
    if let Some(i) = history.iter().position(|v| !v.is_finite()) {
        return Err(ForecastError::NonFiniteInput(i));
    }
    let exog_width = match exog {
        Some(rows) => {
            if rows.len() != history.len() {
                return Err(ForecastError::ExogMismatch(format!(
                    "{} covariate rows for {} history values",
                    rows.len(),
                    history.len()
                )));
            }
            let width = rows.first().map_or(0, Vec::len);
            if rows.iter().any(|r| r.len() != width) {
                return Err(ForecastError::ExogMismatch("ragged covariate rows".into()));
            }
            if rows.iter().flatten().any(|v| !v.is_finite()) {
                return Err(ForecastError::ExogMismatch("non-finite covariate".into()));
            }
            width
        }
        None => 0,
    };
    let unknowns = 1 + lag + exog_width;
    let rows = history.len().saturating_sub(lag);
    if history.len() <= lag || rows < unknowns {
        return Err(ForecastError::InsufficientHistory {
            needed: lag + unknowns,
            available: history.len(),
        });
    }

    let design = Matrix::from_fn(rows, unknowns, |r, c| {
        let i = r + lag;
        match c {
            0 => 1.0,
            c if c <= lag => history[i - c],
            c => exog.expect("exog width > 0")[i][c - lag - 1],
        }
    });
    let fit = lstsq::solve(&design, &history[lag..]);

    let dof = rows - unknowns;
    Ok(ArModel {
        intercept: fit.coefficients[0],
        coefficients: fit.coefficients[1..=lag].to_vec(),
        exog_coefficients: fit.coefficients[lag + 1..].to_vec(),
        residual_variance: if dof > 0 { fit.sse / dof as f64 } else { 0.0 },
        n_obs: rows,
    })
}

pub fn ar_predict(
    model: &ArModel,
    history: &[f64],
    exog_next: Option<&[f64]>,
) -> Result<f64, ForecastError> {
    let lag = model.lag();
    if history.len() < lag {
        return Err(ForecastError::InsufficientHistory {
            needed: lag,
            available: history.len(),
        });
    }
    let exog_term = match (exog_next, model.exog_coefficients.len()) {
        (None, 0) => 0.0,
        (Some(row), n) if row.len() == n => row
            .iter()
            .zip(&model.exog_coefficients)
            .map(|(x, c)| x * c)
            .sum(),
        (row, n) => {
            return Err(ForecastError::ExogMismatch(format!(
                "model has {n} covariate coefficients, got {} values",
                row.map_or(0, <[f64]>::len)
            )))
        }
    };
    let n = history.len();
    let ar_term: f64 = model
        .coefficients
        .iter()
        .enumerate()
        .map(|(j, c)| c * history[n - 1 - j])
        .sum();
    Ok(model.intercept + ar_term + exog_term)
}

/// A configured model ready to produce one-step-ahead forecasts.
///
/// Every call refits on the supplied history, so the same forecaster can
/// walk an expanding window. Fitted AR state is kept for inspection.
pub struct Forecaster<'b> {
    config: ForecasterConfig,
    backend: Option<&'b mut dyn FmBackend>,
    last_ar_fit: Option<ArModel>,
}

impl std::fmt::Debug for Forecaster<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Forecaster")
            .field("config", &self.config)
            .field("has_backend", &self.backend.is_some())
            .finish()
    }
}

pub fn make_forecaster<'b>(
    config: ForecasterConfig,
    fm_backend: Option<&'b mut dyn FmBackend>,
) -> Result<Forecaster<'b>, ForecastError> {
    config.validate()?;
    if config.kind == ModelKind::Fm && fm_backend.is_none() {
        return Err(ForecastError::MissingBackend);
    }
    Ok(Forecaster {
        config,
        backend: fm_backend,
        last_ar_fit: None,
    })
}

impl Forecaster<'_> {
    pub fn config(&self) -> &ForecasterConfig {
        &self.config
    }

    /// The model fitted by the most recent AR call, in transformed scale.
    pub fn last_ar_fit(&self) -> Option<&ArModel> {
        self.last_ar_fit.as_ref()
    }

    /// Fits on the whole `history` and predicts the next value.
    ///
    /// `start_index` is the absolute period index of `history[0]`; it only
    /// matters when calendar covariates are configured.
    pub fn fit_predict_one(
        &mut self,
        history: &[f64],
        start_index: i64,
    ) -> Result<f64, ForecastError> {
        if history.is_empty() {
            return Err(ForecastError::EmptyHistory);
        }
        if let Some(i) = history.iter().position(|v| !v.is_finite()) {
            return Err(ForecastError::NonFiniteInput(i));
        }
        let transformed: Vec<f64>;
        let working: &[f64] = if self.config.use_log1p {
            transformed = history
                .iter()
                .map(|&v| log1p_forward(v))
                .collect::<Result<_, _>>()?;
            &transformed
        } else {
            history
        };

        let raw = self.predict_raw(working, start_index)?;
        let mut value = if self.config.use_log1p {
            log1p_inverse(raw)
        } else {
            raw
        };
        if self.config.use_floor0 {
            value = value.max(0.0);
        }
        Ok(value)
    }

    fn predict_raw(&mut self, history: &[f64], start_index: i64) -> Result<f64, ForecastError> {
        let lag = self.config.lag;
        match self.config.kind {
            ModelKind::Pv => pv_predict(history),
            ModelKind::Ma => ma_predict(history, lag),
            ModelKind::Ar => match self.config.exogenous.filter(|e| e.width() > 0) {
                None => {
                    let model = ar_fit(history, lag, None)?;
                    let value = ar_predict(&model, history, None)?;
                    self.last_ar_fit = Some(model);
                    Ok(value)
                }
                Some(spec) => {
                    let rows = spec.rows(start_index, history.len());
                    let next = spec.row(start_index + history.len() as i64);
                    let model = ar_fit(history, lag, Some(&rows))?;
                    let value = ar_predict(&model, history, Some(&next))?;
                    self.last_ar_fit = Some(model);
                    Ok(value)
                }
            },
            ModelKind::Fm => {
                let backend = self.backend.as_mut().ok_or(ForecastError::MissingBackend)?;
                let context = &history[history.len().saturating_sub(lag)..];
                let out = backend.forecast(context, 1, self.config.fm_freq)?;
                out.first().copied().ok_or_else(|| {
                    ForecastError::Backend(BridgeError::Protocol("empty forecast".into()))
                })
            }
        }
    }
}

/// Convenience wrapper: build a forecaster and predict one step.
pub fn fit_predict_one(
    forecaster: &mut Forecaster<'_>,
    history: &[f64],
    start_index: i64,
) -> Result<f64, ForecastError> {
    forecaster.fit_predict_one(history, start_index)
}
