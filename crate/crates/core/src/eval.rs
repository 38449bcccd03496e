//! Evaluation protocols: expanding-window one-step evaluation, lag sweeps,
//! iterated multi-step forecasts and year-end estimate tables.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bridge::FmBackend;
use crate::forecast::{make_forecaster, ExogenousSpec, ForecastError, Forecaster, ForecasterConfig, ModelKind};
use crate::series::{compute_metrics, Forecast, MetricSet, SeriesError, TimeSeries};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("fiscal window starting at {start} needs 12 periods, series has {len}")]
    WindowOutOfRange { start: usize, len: usize },
    #[error("sweep report has no rows")]
    EmptyReport,
    #[error(transparent)]
    Forecast(#[from] ForecastError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Index boundaries, each exclusive. The test region is
/// `validation_end..test_end`; everything before it is history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_end: usize,
    pub validation_end: usize,
    pub test_end: usize,
}

impl SplitSpec {
    pub fn new(train_end: usize, validation_end: usize, test_end: usize) -> Self {
        Self {
            train_end,
            validation_end,
            test_end,
        }
    }

    /// 4/7 train, 1/7 validation, 2/7 test (for 84 months: 48, 12, 24).
    pub fn default_for(len: usize) -> Self {
        Self::new(len * 4 / 7, len * 5 / 7, len)
    }

    pub fn validate(&self, len: usize) -> Result<(), EvalError> {
        let ok = 0 < self.train_end
            && self.train_end <= self.validation_end
            && self.validation_end <= self.test_end
            && self.test_end <= len;
        if !ok {
            return Err(EvalError::InvalidSplit(format!(
                "need 0 < {} <= {} <= {} <= {len}",
                self.train_end, self.validation_end, self.test_end
            )));
        }
        if self.validation_end == self.test_end {
            return Err(EvalError::InvalidSplit("test region is empty".into()));
        }
        Ok(())
    }

    pub fn test_range(&self) -> std::ops::Range<usize> {
        self.validation_end..self.test_end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub index: usize,
    pub actual: f64,
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollingEvalResult {
    pub config: ForecasterConfig,
    pub per_step: Vec<StepResult>,
    /// Errors after dividing both sides by the full-series total.
    pub metrics: MetricSet,
}

/// Walks the test region one step at a time. The prediction for index `i`
/// is fitted on `values[..i]` only.
pub fn rolling_eval(
    series: &TimeSeries,
    config: ForecasterConfig,
    split: SplitSpec,
    fm_backend: Option<&mut dyn FmBackend>,
) -> Result<RollingEvalResult, EvalError> {
    split.validate(series.len())?;
    let needed = config.min_history();
    if split.validation_end < needed {
        return Err(ForecastError::InsufficientHistory {
            needed,
            available: split.validation_end,
        }
        .into());
    }
    let normalizer = series.total();
    if normalizer <= 0.0 {
        return Err(SeriesError::AllZeroSeries.into());
    }
    let mut forecaster = make_forecaster(config, fm_backend)?;
    let values = series.values();
    let mut per_step = Vec::with_capacity(split.test_end - split.validation_end);
    for i in split.test_range() {
        let predicted = forecaster.fit_predict_one(&values[..i], series.start_index())?;
        per_step.push(StepResult {
            index: i,
            actual: values[i],
            predicted,
        });
    }
    let actual: Vec<f64> = per_step.iter().map(|s| s.actual / normalizer).collect();
    let predicted: Vec<f64> = per_step.iter().map(|s| s.predicted / normalizer).collect();
    Ok(RollingEvalResult {
        config,
        per_step,
        metrics: compute_metrics(&actual, &predicted)?,
    })
}

/// Transform and covariate settings shared by every cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    pub use_log1p: bool,
    pub use_floor0: bool,
    /// Applied to AR cells only.
    pub exogenous: Option<ExogenousSpec>,
    pub fm_freq: u8,
    pub max_lag: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            use_log1p: false,
            use_floor0: false,
            exogenous: None,
            fm_freq: 0,
            max_lag: 12,
        }
    }
}

impl SweepSettings {
    pub fn config(&self, kind: ModelKind, lag: usize) -> ForecasterConfig {
        let mut config = ForecasterConfig::new(kind, lag)
            .with_log1p(self.use_log1p)
            .with_floor0(self.use_floor0)
            .with_fm_freq(self.fm_freq);
        if kind == ModelKind::Ar {
            if let Some(spec) = self.exogenous {
                config = config.with_exogenous(spec);
            }
        }
        config
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Mae,
    Mse,
    Rmse,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Mae, Metric::Mse, Metric::Rmse];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Mae => "mae",
            Metric::Mse => "mse",
            Metric::Rmse => "rmse",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown metric `{s}`, expected mae, mse or rmse"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kind: ModelKind,
    pub lag: usize,
    pub mae: f64,
    pub mse: f64,
    pub rmse: f64,
}

impl SweepRow {
    pub fn metric(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Mae => self.mae,
            Metric::Mse => self.mse,
            Metric::Rmse => self.rmse,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestCells {
    pub mae: (ModelKind, usize),
    pub mse: (ModelKind, usize),
    pub rmse: (ModelKind, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub best: Option<BestCells>,
    pub notices: Vec<String>,
}

/// Evaluates every `(kind, lag)` cell with [`rolling_eval`]. PV has no lag
/// and gets a single row at lag 1. Rows come out in kind order, then lag.
pub fn lag_sweep(
    series: &TimeSeries,
    kinds: &[ModelKind],
    lags: &[usize],
    split: SplitSpec,
    settings: SweepSettings,
    mut fm_backend: Option<&mut dyn FmBackend>,
) -> Result<SweepReport, EvalError> {
    if let Some(&bad) = lags.iter().find(|&&l| l == 0 || l > settings.max_lag) {
        return Err(EvalError::InvalidSweep(format!(
            "lag {bad} outside 1..={}",
            settings.max_lag
        )));
    }
    let mut kinds = kinds.to_vec();
    kinds.sort();
    kinds.dedup();
    let mut lags = lags.to_vec();
    lags.sort_unstable();
    lags.dedup();

    let mut rows = Vec::new();
    let mut notices = Vec::new();
    for kind in kinds {
        if kind == ModelKind::Fm && fm_backend.is_none() {
            notices.push("FM rows skipped: no foundation-model backend configured".to_string());
            continue;
        }
        let cell_lags: &[usize] = if kind == ModelKind::Pv { &[1] } else { &lags };
        for &lag in cell_lags {
            let result = rolling_eval(
                series,
                settings.config(kind, lag),
                split,
                reborrow(&mut fm_backend),
            )?;
            rows.push(SweepRow {
                kind,
                lag,
                mae: result.metrics.mae,
                mse: result.metrics.mse,
                rmse: result.metrics.rmse,
            });
        }
    }
    let best = best_cells(&rows);
    Ok(SweepReport {
        rows,
        best,
        notices,
    })
}

fn reborrow<'a>(backend: &'a mut Option<&mut dyn FmBackend>) -> Option<&'a mut dyn FmBackend> {
    match backend {
        Some(b) => Some(&mut **b),
        None => None,
    }
}

fn argmin(rows: &[SweepRow], metric: Metric) -> Option<(ModelKind, usize)> {
    rows.iter()
        .min_by(|a, b| {
            a.metric(metric)
                .total_cmp(&b.metric(metric))
                .then(a.lag.cmp(&b.lag))
                .then(a.kind.cmp(&b.kind))
        })
        .map(|r| (r.kind, r.lag))
}

fn best_cells(rows: &[SweepRow]) -> Option<BestCells> {
    Some(BestCells {
        mae: argmin(rows, Metric::Mae)?,
        mse: argmin(rows, Metric::Mse)?,
        rmse: argmin(rows, Metric::Rmse)?,
    })
}

/// Lowest-error cell; ties go to the smaller lag, then to kind order.
pub fn select_best(report: &SweepReport, metric: Metric) -> Result<(ModelKind, usize), EvalError> {
    argmin(&report.rows, metric).ok_or(EvalError::EmptyReport)
}

fn iterate(
    forecaster: &mut Forecaster<'_>,
    history: &mut Vec<f64>,
    start_index: i64,
    horizon: usize,
) -> Result<Vec<f64>, EvalError> {
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let next = forecaster.fit_predict_one(history, start_index)?;
        history.push(next);
        out.push(next);
    }
    Ok(out)
}

/// Iterated multi-step forecast: predict one step, append it to the
/// history, refit, repeat.
pub fn ims_forecast(
    series: &TimeSeries,
    config: ForecasterConfig,
    horizon: usize,
    fm_backend: Option<&mut dyn FmBackend>,
) -> Result<Forecast, EvalError> {
    if horizon == 0 {
        return Err(EvalError::ZeroHorizon);
    }
    let mut forecaster = make_forecaster(config, fm_backend)?;
    let mut history = series.values().to_vec();
    let values = iterate(&mut forecaster, &mut history, series.start_index(), horizon)?;
    let origin = series.start_index() + series.len() as i64 - 1;
    Ok(Forecast::new(origin, values))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearEndRow {
    /// 0 for the actual row, otherwise -12..=-1.
    pub months_before: i32,
    /// Number of leading entries that are actuals.
    pub known: usize,
    pub values: Vec<f64>,
    pub sum: f64,
    /// `(sum - actual sum) / actual sum`; `None` when the actual sum is 0.
    pub error_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearEndTable {
    pub config: ForecasterConfig,
    /// Position of the first window month within the series.
    pub window_start: usize,
    pub actual: YearEndRow,
    /// Rows for 12, 11, ..., 1 months before year end.
    pub rows: Vec<YearEndRow>,
}

impl YearEndTable {
    /// Actual row followed by the forecast rows.
    pub fn all_rows(&self) -> impl Iterator<Item = &YearEndRow> {
        std::iter::once(&self.actual).chain(&self.rows)
    }
}

/// Year-end totals estimated at each of the 12 months before year end. Row
/// `A` keeps the first `12 + A` actuals of the window and fills the rest with
/// an iterated forecast from the history up to that point.
pub fn year_end_table(
    series: &TimeSeries,
    config: ForecasterConfig,
    window_start: usize,
    mut fm_backend: Option<&mut dyn FmBackend>,
) -> Result<YearEndTable, EvalError> {
    let values = series.values();
    if window_start + 12 > values.len() {
        return Err(EvalError::WindowOutOfRange {
            start: window_start,
            len: values.len(),
        });
    }
    let actual_values = values[window_start..window_start + 12].to_vec();
    let actual_sum: f64 = actual_values.iter().sum();
    let error_pct = |sum: f64| (actual_sum != 0.0).then(|| (sum - actual_sum) / actual_sum);

    let mut rows = Vec::with_capacity(12);
    for months_before in -12i32..=-1 {
        let known = (12 + months_before) as usize;
        let prefix = series.prefix(window_start + known)?;
        let forecast = ims_forecast(
            &prefix,
            config,
            (-months_before) as usize,
            reborrow(&mut fm_backend),
        )?;
        let mut row_values = actual_values[..known].to_vec();
        row_values.extend(forecast.values);
        let sum = row_values.iter().sum();
        rows.push(YearEndRow {
            months_before,
            known,
            values: row_values,
            sum,
            error_pct: error_pct(sum),
        });
    }
    Ok(YearEndTable {
        config,
        window_start,
        actual: YearEndRow {
            months_before: 0,
            known: 12,
            values: actual_values,
            sum: actual_sum,
            error_pct: error_pct(actual_sum),
        },
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::StubBackend;
    use proptest::prelude::*;

    fn monthly(values: &[f64]) -> TimeSeries {
        TimeSeries::monthly(values.to_vec(), "t").unwrap()
    }

    #[test]
    fn pv_rolling_example() {
        let s = monthly(&[1.0, 2.0, 3.0, 4.0]);
        let r = rolling_eval(&s, ForecasterConfig::pv(), SplitSpec::new(1, 1, 4), None).unwrap();
        let predicted: Vec<f64> = r.per_step.iter().map(|p| p.predicted).collect();
        let actual: Vec<f64> = r.per_step.iter().map(|p| p.actual).collect();
        assert_eq!(predicted, vec![1.0, 2.0, 3.0]);
        assert_eq!(actual, vec![2.0, 3.0, 4.0]);
        assert!((r.metrics.mae - 0.1).abs() < 1e-15);
        let indices: Vec<usize> = r.per_step.iter().map(|p| p.index).collect();
        assert_eq!(indices, vec![1, 2, 3]);
    }

    #[test]
    fn constant_series_has_zero_error() {
        let s = monthly(&[5.0; 30]);
        for config in [
            ForecasterConfig::pv(),
            ForecasterConfig::ma(4),
            ForecasterConfig::ar(3),
            ForecasterConfig::ar(2).with_log1p(true),
        ] {
            let r = rolling_eval(&s, config, SplitSpec::new(15, 20, 30), None).unwrap();
            assert!(r.metrics.mae < 1e-12, "{config:?} {:?}", r.metrics);
        }
    }

    #[test]
    fn split_validation() {
        let s = monthly(&[1.0; 10]);
        for bad in [
            SplitSpec::new(0, 5, 10),
            SplitSpec::new(6, 5, 10),
            SplitSpec::new(3, 5, 11),
            SplitSpec::new(3, 10, 10),
        ] {
            assert!(matches!(
                rolling_eval(&s, ForecasterConfig::pv(), bad, None),
                Err(EvalError::InvalidSplit(_))
            ));
        }
        assert!(matches!(
            rolling_eval(&s, ForecasterConfig::ar(3), SplitSpec::new(2, 3, 10), None),
            Err(EvalError::Forecast(ForecastError::InsufficientHistory { needed: 7, .. }))
        ));
        assert_eq!(SplitSpec::default_for(84), SplitSpec::new(48, 60, 84));
    }

    #[test]
    fn sweep_cardinality_and_best() {
        let s = monthly(&[3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0, 5.0, 3.0, 5.0, 8.0, 9.0, 7.0]);
        let report = lag_sweep(
            &s,
            &[ModelKind::Pv, ModelKind::Ma],
            &[1, 2, 3],
            SplitSpec::new(6, 8, 14),
            SweepSettings::default(),
            None,
        )
        .unwrap();
        assert_eq!(report.rows.len(), 4);
        let best = report.best.unwrap();
        let min = report.rows.iter().map(|r| r.mae).fold(f64::INFINITY, f64::min);
        let row = report.rows.iter().find(|r| (r.kind, r.lag) == best.mae).unwrap();
        assert_eq!(row.mae, min);
    }

    #[test]
    fn sweep_skips_fm_without_backend() {
        let s = monthly(&[2.0, 3.0, 1.0, 4.0, 2.0, 5.0, 3.0, 2.0]);
        let report = lag_sweep(
            &s,
            &[ModelKind::Fm, ModelKind::Pv],
            &[1, 2],
            SplitSpec::new(4, 4, 8),
            SweepSettings::default(),
            None,
        )
        .unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.notices.len(), 1);

        let mut stub = StubBackend;
        let report = lag_sweep(
            &s,
            &[ModelKind::Fm, ModelKind::Pv],
            &[1, 2],
            SplitSpec::new(4, 4, 8),
            SweepSettings::default(),
            Some(&mut stub),
        )
        .unwrap();
        assert_eq!(report.rows.len(), 3);
        assert!(report.notices.is_empty());
    }

    #[test]
    fn sweep_rejects_lag_beyond_cap() {
        let s = monthly(&[1.0; 40]);
        assert!(matches!(
            lag_sweep(&s, &[ModelKind::Ma], &[13], SplitSpec::new(20, 30, 40), SweepSettings::default(), None),
            Err(EvalError::InvalidSweep(_))
        ));
    }

    #[test]
    fn noiseless_ar2_wins_sweep() {
        let mut v = vec![10.0, 12.0];
        for t in 2..60 {
            let next = 5.0 + 0.5 * v[t - 1] - 0.3 * v[t - 2];
            v.push(next);
        }
        let s = monthly(&v);
        let report = lag_sweep(
            &s,
            &[ModelKind::Pv, ModelKind::Ma, ModelKind::Ar],
            &(1..=4).collect::<Vec<_>>(),
            SplitSpec::new(30, 40, 60),
            SweepSettings::default(),
            None,
        )
        .unwrap();
        for row in report.rows.iter().filter(|r| r.kind == ModelKind::Ar && r.lag >= 2) {
            assert!(row.mae <= 1e-8, "{row:?}");
        }
        let (kind, lag) = report.best.unwrap().mae;
        assert_eq!(kind, ModelKind::Ar);
        assert!(lag >= 2);
    }

    fn row(kind: ModelKind, lag: usize, mae: f64) -> SweepRow {
        SweepRow {
            kind,
            lag,
            mae,
            mse: mae * mae,
            rmse: mae,
        }
    }

    #[test]
    fn select_best_examples() {
        let report = |rows: Vec<SweepRow>| SweepReport {
            best: best_cells(&rows),
            rows,
            notices: vec![],
        };
        let single = report(vec![row(ModelKind::Ma, 4, 0.3)]);
        assert_eq!(select_best(&single, Metric::Mae).unwrap(), (ModelKind::Ma, 4));

        let tie = report(vec![row(ModelKind::Ma, 3, 0.2), row(ModelKind::Ar, 2, 0.2)]);
        assert_eq!(select_best(&tie, Metric::Mae).unwrap(), (ModelKind::Ar, 2));

        let same_lag = report(vec![row(ModelKind::Ar, 1, 0.2), row(ModelKind::Pv, 1, 0.2)]);
        assert_eq!(select_best(&same_lag, Metric::Rmse).unwrap(), (ModelKind::Pv, 1));

        let plain = report(vec![row(ModelKind::Ma, 3, 0.2), row(ModelKind::Ar, 1, 0.1)]);
        assert_eq!(select_best(&plain, Metric::Mae).unwrap(), (ModelKind::Ar, 1));

        assert!(matches!(
            select_best(&report(vec![]), Metric::Mae),
            Err(EvalError::EmptyReport)
        ));
    }

    #[test]
    fn ims_examples() {
        let f = ims_forecast(&monthly(&[4.0, 9.0, 7.0]), ForecasterConfig::pv(), 3, None).unwrap();
        assert_eq!(f.values, vec![7.0; 3]);
        assert_eq!(f.origin_index, 2);

        let f = ims_forecast(&monthly(&[2.0, 4.0]), ForecasterConfig::ma(2), 2, None).unwrap();
        assert_eq!(f.values, vec![3.0, 3.5]);

        let f = ims_forecast(&monthly(&[8.0, 4.0, 2.0, 1.0]), ForecasterConfig::ar(1), 2, None).unwrap();
        assert!((f.values[0] - 0.5).abs() < 1e-8, "{f:?}");
        assert!((f.values[1] - 0.25).abs() < 1e-8);

        assert!(matches!(
            ims_forecast(&monthly(&[1.0]), ForecasterConfig::pv(), 0, None),
            Err(EvalError::ZeroHorizon)
        ));
    }

    fn seasonal(len: usize) -> TimeSeries {
        let v: Vec<f64> = (0..len)
            .map(|i| (3.0 + 2.0 * ((i % 12) as f64 / 2.0).sin() + (i % 5) as f64).round())
            .collect();
        monthly(&v)
    }

    #[test]
    fn year_end_layout_and_oracle() {
        let s = seasonal(48);
        let config = ForecasterConfig::ar(2).with_floor0(true);
        let table = year_end_table(&s, config, 36, None).unwrap();
        assert_eq!(table.rows.len(), 12);
        assert_eq!(table.actual.error_pct, Some(0.0));
        assert_eq!(table.actual.values, s.values()[36..48].to_vec());
        for (i, r) in table.rows.iter().enumerate() {
            let a = i as i32 - 12;
            assert_eq!(r.months_before, a);
            assert_eq!(r.known, (12 + a) as usize);
            assert_eq!(r.values[..r.known], s.values()[36..36 + r.known]);
            let oracle = ims_forecast(&s.prefix(36 + r.known).unwrap(), config, 12 - r.known, None).unwrap();
            assert_eq!(r.values[r.known..], oracle.values[..]);
            let hand: f64 = r.values.iter().sum();
            let expected = (hand - table.actual.sum) / table.actual.sum;
            assert!((r.error_pct.unwrap() - expected).abs() < 1e-12);
            assert!(r.values.iter().all(|&v| v >= 0.0));
        }
        assert_eq!(table.rows[0].known, 0);
        assert!(matches!(
            year_end_table(&s, config, 40, None),
            Err(EvalError::WindowOutOfRange { .. })
        ));
    }

    #[test]
    fn last_row_zero_error_when_prediction_hits() {
        // PV predicts the last known value; make December equal November
        let mut v: Vec<f64> = (0..24).map(|i| (i % 7) as f64 + 1.0).collect();
        v[23] = v[22];
        let table = year_end_table(&monthly(&v), ForecasterConfig::pv(), 12, None).unwrap();
        assert_eq!(table.rows[11].error_pct, Some(0.0));
    }

    proptest! {
        #[test]
        fn ims_horizon_one_is_single_step(
            v in proptest::collection::vec(0.0..50.0f64, 8..30),
        ) {
            let s = monthly(&v);
            for config in [ForecasterConfig::pv(), ForecasterConfig::ma(3), ForecasterConfig::ar(2)] {
                let ims = ims_forecast(&s, config, 1, None).unwrap();
                let mut f = make_forecaster(config, None).unwrap();
                prop_assert_eq!(ims.values[0], f.fit_predict_one(&v, 0).unwrap());
            }
        }

        #[test]
        fn ims_composes(
            v in proptest::collection::vec(0.0..50.0f64, 8..30),
            h1 in 1usize..5,
            h2 in 1usize..5,
        ) {
            let s = monthly(&v);
            // floored so the extended history stays a valid count series
            let ar = ForecasterConfig::ar(2).with_floor0(true);
            for config in [ForecasterConfig::pv(), ForecasterConfig::ma(3), ar] {
                let whole = ims_forecast(&s, config, h1 + h2, None).unwrap();
                let first = ims_forecast(&s, config, h1, None).unwrap();
                let mut extended = v.clone();
                extended.extend(&first.values);
                let second = ims_forecast(&monthly(&extended), config, h2, None).unwrap();
                let mut joined = first.values.clone();
                joined.extend(second.values);
                prop_assert_eq!(whole.values, joined);
            }
        }

        #[test]
        fn poisoned_future_is_never_read(
            v in proptest::collection::vec(0.0..50.0f64, 20..40),
        ) {
            let split = SplitSpec::new(10, 12, v.len());
            for config in [ForecasterConfig::pv(), ForecasterConfig::ma(3), ForecasterConfig::ar(3)] {
                let full = rolling_eval(&monthly(&v), config, split, None).unwrap();
                for step in &full.per_step {
                    let mut poisoned = v[..step.index].to_vec();
                    poisoned.extend(std::iter::repeat_n(1e9, v.len() - step.index));
                    let prefix_split = SplitSpec::new(10, step.index, step.index + 1);
                    let r = rolling_eval(&monthly(&poisoned), config, prefix_split, None).unwrap();
                    prop_assert_eq!(r.per_step[0].predicted, step.predicted);
                }
            }
        }
    }
}
