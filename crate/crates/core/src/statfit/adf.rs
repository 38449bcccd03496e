//! Augmented Dickey-Fuller test, constant-only regression, with MacKinnon
//! approximate p-values and critical values.

use serde::{Deserialize, Serialize};

use super::dist::normal_cdf;
use super::StatError;
use crate::lstsq::{solve, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdfRegression {
    #[default]
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub p_value: f64,
    pub lags_used: usize,
    pub n_obs: usize,
    /// 1%, 5% and 10% critical values at `n_obs`.
    pub critical_values: [f64; 3],
}

const TAU_MAX: f64 = 2.74;
const TAU_MIN: f64 = -18.83;
const TAU_STAR: f64 = -1.61;
const SMALL_P: [f64; 3] = [2.1659, 1.4412, 0.038269];
const LARGE_P: [f64; 4] = [1.7339, 0.93202, -0.12745, -0.010368];
const CRIT: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];

fn poly(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Approximate p-value of an ADF statistic, constant-only case.
pub fn mackinnon_p(statistic: f64) -> f64 {
    if statistic > TAU_MAX {
        return 1.0;
    }
    if statistic < TAU_MIN {
        return 0.0;
    }
    let z = if statistic <= TAU_STAR {
        poly(&SMALL_P, statistic)
    } else {
        poly(&LARGE_P, statistic)
    };
    normal_cdf(z)
}

/// 1%, 5% and 10% critical values for `n_obs` observations.
pub fn mackinnon_critical_values(n_obs: usize) -> [f64; 3] {
    let inv = 1.0 / n_obs as f64;
    CRIT.map(|c| poly(&c, inv))
}

/// `floor(12 * (n / 100)^(1/4))`.
pub fn default_max_lag(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

struct LagFit {
    gamma: f64,
    se: f64,
    sse: f64,
    n_obs: usize,
}

/// Regresses `dy[t]` on `1, y[t], dy[t-1..t-lags]` for `t` in `first..`,
/// where `dy[t] = y[t+1] - y[t]`.
fn fit_lag(y: &[f64], dy: &[f64], lags: usize, first: usize) -> Result<LagFit, StatError> {
    let rows = dy.len() - first;
    let cols = lags + 2;
    let design = Matrix::from_fn(rows, cols, |r, c| {
        let t = first + r;
        match c {
            0 => 1.0,
            1 => y[t],
            j => dy[t - (j - 1)],
        }
    });
    let fit = solve(&design, &dy[first..]);
    if fit.rank < cols || rows <= cols {
        return Err(StatError::SingularRegression);
    }
    let sigma2 = fit.sse / (rows - cols) as f64;
    let se = (sigma2 * fit.unscaled_covariance[cols + 1]).sqrt();
    if !se.is_finite() || se <= 0.0 {
        return Err(StatError::SingularRegression);
    }
    Ok(LagFit {
        gamma: fit.coefficients[1],
        se,
        sse: fit.sse,
        n_obs: rows,
    })
}

/// ADF test of `series` for a unit root. The augmentation order is chosen by
/// AIC over `0..=max_lag` on a common sample, then refitted on all usable
/// observations. `max_lag` defaults to [`default_max_lag`].
pub fn adf_test(
    series: &[f64],
    max_lag: Option<usize>,
    regression: AdfRegression,
) -> Result<AdfResult, StatError> {
    let AdfRegression::Constant = regression;
    let n = series.len();
    let max_lag = max_lag.unwrap_or_else(|| default_max_lag(n));
    if n < max_lag + 10 {
        return Err(StatError::SeriesTooShort {
            needed: max_lag + 10,
            got: n,
        });
    }
    if let Some(bad) = series.iter().find(|v| !v.is_finite()) {
        return Err(StatError::InvalidParams(format!("non-finite series value {bad}")));
    }
    let dy: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();

    let mut best: Option<(f64, usize)> = None;
    for lags in 0..=max_lag {
        let fit = fit_lag(series, &dy, lags, max_lag)?;
        let nobs = fit.n_obs as f64;
        let aic = nobs * (fit.sse / nobs).ln() + 2.0 * (lags + 2) as f64;
        if best.is_none_or(|(b, _)| aic < b) {
            best = Some((aic, lags));
        }
    }
    let (_, lags_used) = best.expect("at least lag 0 is tried");
    let fit = fit_lag(series, &dy, lags_used, lags_used)?;
    let statistic = fit.gamma / fit.se;
    Ok(AdfResult {
        statistic,
        p_value: mackinnon_p(statistic).clamp(0.0, 1.0),
        lags_used,
        n_obs: fit.n_obs,
        critical_values: mackinnon_critical_values(fit.n_obs),
    })
}
