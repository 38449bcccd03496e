//! Count time series, normalization, transforms, aggregation and accuracy
//! metrics.
//!
//! Everything here is a pure function of its inputs. Metrics accept values at
//! any scale; the evaluation harness always feeds them normalized values.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series is empty")]
    Empty,
    #[error("value {value} at position {index} is negative or not finite")]
    InvalidValue { index: usize, value: f64 },
    #[error("series sums to zero, normalization is undefined")]
    AllZeroSeries,
    #[error("length mismatch: actual has {actual} values, predicted has {predicted}")]
    LengthMismatch { actual: usize, predicted: usize },
    #[error("metrics need at least one value")]
    EmptyInput,
    #[error("log1p transform needs a non-negative input, got {0}")]
    NegativeInput(f64),
    #[error("cannot aggregate {from:?} into finer granularity {to:?}")]
    FinerTarget { from: Granularity, to: Granularity },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Daily,
    Weekly,
    Monthly,
    Quarterly,
}

impl Granularity {
    /// Number of periods of `self` that make up one period of the next
    /// coarser granularity. Fixed factors, no calendar alignment.
    fn step_factor(self) -> Option<usize> {
        match self {
            Granularity::Daily => Some(7),
            Granularity::Weekly => Some(4),
            Granularity::Monthly => Some(3),
            Granularity::Quarterly => None,
        }
    }

    fn coarser(self) -> Option<Granularity> {
        match self {
            Granularity::Daily => Some(Granularity::Weekly),
            Granularity::Weekly => Some(Granularity::Monthly),
            Granularity::Monthly => Some(Granularity::Quarterly),
            Granularity::Quarterly => None,
        }
    }

    /// Bucket size when aggregating from `self` to `target`, or `None` when
    /// `target` is finer.
    pub fn factor_to(self, target: Granularity) -> Option<usize> {
        let mut factor = 1;
        let mut g = self;
        while g != target {
            factor *= g.step_factor()?;
            g = g.coarser()?;
        }
        Some(factor)
    }
}

/// Ordered non-negative event counts at a fixed granularity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    granularity: Granularity,
    start_index: i64,
    label: String,
}

impl TimeSeries {
    pub fn new(
        values: Vec<f64>,
        granularity: Granularity,
        start_index: i64,
        label: impl Into<String>,
    ) -> Result<Self, SeriesError> {
        if values.is_empty() {
            return Err(SeriesError::Empty);
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(SeriesError::InvalidValue { index, value });
        }
        Ok(Self {
            values,
            granularity,
            start_index,
            label: label.into(),
        })
    }

    /// Monthly series starting at period 0.
    pub fn monthly(values: Vec<f64>, label: impl Into<String>) -> Result<Self, SeriesError> {
        Self::new(values, Granularity::Monthly, 0, label)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Copy holding only the first `len` values.
    pub fn prefix(&self, len: usize) -> Result<Self, SeriesError> {
        Self::new(
            self.values[..len.min(self.values.len())].to_vec(),
            self.granularity,
            self.start_index,
            self.label.clone(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedSeries {
    pub ratios: Vec<f64>,
    pub normalizer: f64,
}

impl NormalizedSeries {
    pub fn denormalize(&self) -> Vec<f64> {
        self.ratios.iter().map(|r| r * self.normalizer).collect()
    }
}

/// Divides every count by the series total.
pub fn normalize(series: &TimeSeries) -> Result<NormalizedSeries, SeriesError> {
    let normalizer = series.total();
    if normalizer <= 0.0 {
        return Err(SeriesError::AllZeroSeries);
    }
    Ok(NormalizedSeries {
        ratios: series.values.iter().map(|v| v / normalizer).collect(),
        normalizer,
    })
}

/// Point forecast for `horizon` periods after `origin_index`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forecast {
    pub origin_index: i64,
    pub values: Vec<f64>,
}

impl Forecast {
    pub fn new(origin_index: i64, values: Vec<f64>) -> Self {
        Self {
            origin_index,
            values,
        }
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }
}

/// Clamps negative forecast values to zero.
pub fn floor_zero(forecast: &Forecast) -> Forecast {
    Forecast {
        origin_index: forecast.origin_index,
        values: forecast.values.iter().map(|v| v.max(0.0)).collect(),
    }
}

pub fn log1p_forward(x: f64) -> Result<f64, SeriesError> {
    if x < 0.0 || x.is_nan() {
        return Err(SeriesError::NegativeInput(x));
    }
    Ok(x.ln_1p())
}

/// Inverse of [`log1p_forward`]. Negative inputs give values in (-1, 0);
/// flooring is a separate step.
pub fn log1p_inverse(y: f64) -> f64 {
    y.exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub mae: f64,
    pub mse: f64,
    pub rmse: f64,
    /// Mean absolute percentage error over periods with a positive actual.
    /// `None` when every actual is zero.
    pub mape: Option<f64>,
    /// Signed relative error of the totals, `(sum(pred) - sum(actual)) / sum(actual)`.
    /// `None` when the actual total is zero.
    pub sum_error_pct: Option<f64>,
}

pub fn compute_metrics(actual: &[f64], predicted: &[f64]) -> Result<MetricSet, SeriesError> {
    if actual.len() != predicted.len() {
        return Err(SeriesError::LengthMismatch {
            actual: actual.len(),
            predicted: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(SeriesError::EmptyInput);
    }
    let n = actual.len() as f64;
    let mut abs_sum = 0.0;
    let mut sq_sum = 0.0;
    let mut pct_sum = 0.0;
    let mut pct_count = 0usize;
    for (&a, &p) in actual.iter().zip(predicted) {
        let diff = a - p;
        abs_sum += diff.abs();
        sq_sum += diff * diff;
        if a > 0.0 {
            pct_sum += diff.abs() / a;
            pct_count += 1;
        }
    }
    let mse = sq_sum / n;
    let actual_total: f64 = actual.iter().sum();
    let predicted_total: f64 = predicted.iter().sum();
    Ok(MetricSet {
        mae: abs_sum / n,
        mse,
        rmse: mse.sqrt(),
        mape: (pct_count > 0).then(|| pct_sum / pct_count as f64),
        sum_error_pct: (actual_total != 0.0)
            .then(|| (predicted_total - actual_total) / actual_total),
    })
}

/// Sums consecutive buckets into a coarser granularity. A trailing partial
/// bucket is dropped.
pub fn aggregate(series: &TimeSeries, target: Granularity) -> Result<TimeSeries, SeriesError> {
    let factor = series
        .granularity
        .factor_to(target)
        .ok_or(SeriesError::FinerTarget {
            from: series.granularity,
            to: target,
        })?;
    let values: Vec<f64> = series
        .values
        .chunks_exact(factor)
        .map(|bucket| bucket.iter().sum())
        .collect();
    TimeSeries::new(
        values,
        target,
        series.start_index.div_euclid(factor as i64),
        series.label.clone(),
    )
}
