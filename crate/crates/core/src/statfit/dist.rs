//! Eight continuous distributions in `(shape..., loc, scale)` form, with CDFs,
//! log-densities and maximum-likelihood fitting.
//!
//! Fitting does not free every parameter. The support of the bounded kinds
//! is pinned to a window derived from the samples (`[0, 1]` when all samples
//! lie in it, otherwise `[min, max]`), and only the shape parameters are
//! optimized inside it. Uniform and Exponential have closed-form estimates.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};
use statrs::function::beta::{beta_reg, ln_beta};
use statrs::function::erf::erfc;

use super::StatError;
use crate::optim::{nelder_mead, NelderMeadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistKind {
    Beta,
    WrappedCauchy,
    Uniform,
    Bradford,
    TruncatedNormal,
    FoldedNormal,
    GeneralizedPareto,
    Exponential,
}

impl DistKind {
    pub const ALL: [DistKind; 8] = [
        DistKind::Beta,
        DistKind::WrappedCauchy,
        DistKind::Uniform,
        DistKind::Bradford,
        DistKind::TruncatedNormal,
        DistKind::FoldedNormal,
        DistKind::GeneralizedPareto,
        DistKind::Exponential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistKind::Beta => "beta",
            DistKind::WrappedCauchy => "wrapcauchy",
            DistKind::Uniform => "uniform",
            DistKind::Bradford => "bradford",
            DistKind::TruncatedNormal => "truncnorm",
            DistKind::FoldedNormal => "foldnorm",
            DistKind::GeneralizedPareto => "genpareto",
            DistKind::Exponential => "expon",
        }
    }

    pub fn shape_count(self) -> usize {
        match self {
            DistKind::Beta | DistKind::TruncatedNormal => 2,
            DistKind::Uniform | DistKind::Exponential => 0,
            _ => 1,
        }
    }
}

impl std::fmt::Display for DistKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DistKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DistKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown distribution `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistParams {
    pub shape: Vec<f64>,
    pub loc: f64,
    pub scale: f64,
}

impl DistParams {
    pub fn new(shape: Vec<f64>, loc: f64, scale: f64) -> Self {
        Self { shape, loc, scale }
    }

    pub fn validate(&self, kind: DistKind) -> Result<(), StatError> {
        let bad = |msg: String| Err(StatError::InvalidParams(msg));
        if self.shape.len() != kind.shape_count() {
            return bad(format!(
                "{kind} takes {} shape parameters, got {}",
                kind.shape_count(),
                self.shape.len()
            ));
        }
        if !self.scale.is_finite() || self.scale <= 0.0 || !self.loc.is_finite() {
            return bad(format!("need finite loc and scale > 0, got {}, {}", self.loc, self.scale));
        }
        if self.shape.iter().any(|s| !s.is_finite()) {
            return bad("non-finite shape parameter".into());
        }
        let s = &self.shape;
        match kind {
            DistKind::Beta if s[0] <= 0.0 || s[1] <= 0.0 => bad(format!("beta shapes must be > 0, got {s:?}")),
            DistKind::WrappedCauchy if !(0.0..1.0).contains(&s[0]) => {
                bad(format!("wrapcauchy c must be in [0, 1), got {}", s[0]))
            }
            DistKind::Bradford if s[0] <= 0.0 => bad(format!("bradford c must be > 0, got {}", s[0])),
            DistKind::TruncatedNormal if s[0] >= s[1] => {
                bad(format!("truncnorm needs a < b, got {s:?}"))
            }
            DistKind::FoldedNormal if s[0] < 0.0 => bad(format!("foldnorm c must be >= 0, got {}", s[0])),
            _ => Ok(()),
        }
    }
}

pub(crate) fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

fn normal_ln_pdf(z: f64) -> f64 {
    -0.5 * z * z - 0.5 * (2.0 * PI).ln()
}

/// CDF at `x`.
pub fn dist_cdf(kind: DistKind, params: &DistParams, x: f64) -> Result<f64, StatError> {
    params.validate(kind)?;
    Ok(cdf_unchecked(kind, params, x))
}

fn cdf_unchecked(kind: DistKind, p: &DistParams, x: f64) -> f64 {
    let z = (x - p.loc) / p.scale;
    let s = &p.shape;
    let value = match kind {
        DistKind::Beta => {
            if z <= 0.0 {
                0.0
            } else if z >= 1.0 {
                1.0
            } else {
                beta_reg(s[0], s[1], z)
            }
        }
        DistKind::WrappedCauchy => {
            if z <= 0.0 {
                0.0
            } else if z >= 2.0 * PI {
                1.0
            } else {
                let cr = (1.0 + s[0]) / (1.0 - s[0]);
                if z < PI {
                    (cr * (z / 2.0).tan()).atan() / PI
                } else {
                    1.0 - (cr * ((2.0 * PI - z) / 2.0).tan()).atan() / PI
                }
            }
        }
        DistKind::Uniform => z.clamp(0.0, 1.0),
        DistKind::Bradford => {
            let z = z.clamp(0.0, 1.0);
            (s[0] * z).ln_1p() / s[0].ln_1p()
        }
        DistKind::TruncatedNormal => {
            let (a, b) = (s[0], s[1]);
            if z <= a {
                0.0
            } else if z >= b {
                1.0
            } else {
                let lo = normal_cdf(a);
                (normal_cdf(z) - lo) / (normal_cdf(b) - lo)
            }
        }
        DistKind::FoldedNormal => {
            if z <= 0.0 {
                0.0
            } else {
                let c = s[0];
                // Phi(z - c) + Phi(z + c) - 1
                1.0 - 0.5 * erfc((z - c) / SQRT_2) - 0.5 * erfc((z + c) / SQRT_2)
            }
        }
        DistKind::GeneralizedPareto => {
            let c = s[0];
            if z <= 0.0 {
                0.0
            } else if c == 0.0 {
                -(-z).exp_m1()
            } else if c < 0.0 && z >= -1.0 / c {
                1.0
            } else {
                -(-(c * z).ln_1p() / c).exp_m1()
            }
        }
        DistKind::Exponential => {
            if z <= 0.0 {
                0.0
            } else {
                -(-z).exp_m1()
            }
        }
    };
    value.clamp(0.0, 1.0)
}

/// Log-density at `x`; `-inf` outside the support.
pub fn dist_ln_pdf(kind: DistKind, params: &DistParams, x: f64) -> Result<f64, StatError> {
    params.validate(kind)?;
    Ok(ln_pdf_unchecked(kind, params, x))
}

fn ln_pdf_unchecked(kind: DistKind, p: &DistParams, x: f64) -> f64 {
    let z = (x - p.loc) / p.scale;
    let s = &p.shape;
    let standard = match kind {
        DistKind::Beta => {
            if z <= 0.0 || z >= 1.0 {
                f64::NEG_INFINITY
            } else {
                (s[0] - 1.0) * z.ln() + (s[1] - 1.0) * (-z).ln_1p() - ln_beta(s[0], s[1])
            }
        }
        DistKind::WrappedCauchy => {
            if !(0.0..=2.0 * PI).contains(&z) {
                f64::NEG_INFINITY
            } else {
                let c = s[0];
                (1.0 - c * c).ln() - (2.0 * PI).ln() - (1.0 + c * c - 2.0 * c * z.cos()).ln()
            }
        }
        DistKind::Uniform => {
            if (0.0..=1.0).contains(&z) {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        }
        DistKind::Bradford => {
            if (0.0..=1.0).contains(&z) {
                let c = s[0];
                c.ln() - c.ln_1p().ln() - (c * z).ln_1p()
            } else {
                f64::NEG_INFINITY
            }
        }
        DistKind::TruncatedNormal => {
            let (a, b) = (s[0], s[1]);
            if z < a || z > b {
                f64::NEG_INFINITY
            } else {
                normal_ln_pdf(z) - (normal_cdf(b) - normal_cdf(a)).ln()
            }
        }
        DistKind::FoldedNormal => {
            if z < 0.0 {
                f64::NEG_INFINITY
            } else {
                let c = s[0];
                let (u, v) = (normal_ln_pdf(z - c), normal_ln_pdf(z + c));
                let m = u.max(v);
                m + ((u - m).exp() + (v - m).exp()).ln()
            }
        }
        DistKind::GeneralizedPareto => {
            let c = s[0];
            if z < 0.0 || 1.0 + c * z <= 0.0 {
                f64::NEG_INFINITY
            } else if c == 0.0 {
                -z
            } else {
                -(1.0 + 1.0 / c) * (c * z).ln_1p()
            }
        }
        DistKind::Exponential => {
            if z < 0.0 {
                f64::NEG_INFINITY
            } else {
                -z
            }
        }
    };
    standard - p.scale.ln()
}

pub fn log_likelihood(kind: DistKind, params: &DistParams, samples: &[f64]) -> Result<f64, StatError> {
    params.validate(kind)?;
    Ok(samples.iter().map(|&x| ln_pdf_unchecked(kind, params, x)).sum())
}

/// Support window shared by the bounded kinds.
fn support_window(sorted: &[f64]) -> (f64, f64) {
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    if min >= 0.0 && max <= 1.0 {
        (0.0, 1.0)
    } else {
        (min, max)
    }
}

fn moments(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// Parameters that `dist_fit` optimizes, as an unconstrained vector, and
/// their mapping back to full `DistParams`.
type Builder = Box<dyn Fn(&[f64]) -> Option<DistParams>>;

struct FreeParams {
    start: Vec<f64>,
    build: Builder,
}

fn free_params(kind: DistKind, sorted: &[f64]) -> Option<FreeParams> {
    let (lo, hi) = support_window(sorted);
    let width = hi - lo;
    let fp = match kind {
        DistKind::Uniform | DistKind::Exponential => return None,
        DistKind::Beta => {
            // Open support: widen the window when samples touch its edges.
            let margin = if sorted[0] <= lo || sorted[sorted.len() - 1] >= hi {
                1e-3 * width
            } else {
                0.0
            };
            let (loc, scale) = (lo - margin, width + 2.0 * margin);
            let (m, v) = moments(sorted.iter().map(|x| (x - loc) / scale));
            let common = m * (1.0 - m) / v - 1.0;
            let (a, b) = if common > 0.0 && v > 0.0 {
                (m * common, (1.0 - m) * common)
            } else {
                (1.0, 1.0)
            };
            FreeParams {
                start: vec![a.ln(), b.ln()],
                build: Box::new(move |u| {
                    Some(DistParams::new(vec![u[0].exp(), u[1].exp()], loc, scale))
                }),
            }
        }
        DistKind::WrappedCauchy => {
            let scale = width / (2.0 * PI);
            FreeParams {
                // logistic map keeps c in (0, 1)
                start: vec![(0.1f64 / 0.9).ln()],
                build: Box::new(move |u| {
                    let c = 1.0 / (1.0 + (-u[0]).exp());
                    (c < 1.0).then(|| DistParams::new(vec![c], lo, scale))
                }),
            }
        }
        DistKind::Bradford => FreeParams {
            start: vec![0.0],
            build: Box::new(move |u| Some(DistParams::new(vec![u[0].exp()], lo, width))),
        },
        DistKind::TruncatedNormal => {
            let (m, v) = moments(sorted.iter().copied());
            let sd = if v > 0.0 { v.sqrt() } else { width };
            FreeParams {
                start: vec![m, sd.ln()],
                build: Box::new(move |u| {
                    let (loc, scale) = (u[0], u[1].exp());
                    if !truncnorm_fit_domain(lo, hi, loc, scale) {
                        return None;
                    }
                    let a = (lo - loc) / scale;
                    let b = (hi - loc) / scale;
                    (a < b).then(|| DistParams::new(vec![a, b], loc, scale))
                }),
            }
        }
        DistKind::FoldedNormal => {
            let rms = (sorted.iter().map(|x| (x - lo).powi(2)).sum::<f64>() / sorted.len() as f64)
                .sqrt();
            FreeParams {
                start: vec![0.5, rms.ln()],
                build: Box::new(move |u| {
                    Some(DistParams::new(vec![u[0].abs()], lo, u[1].exp()))
                }),
            }
        }
        DistKind::GeneralizedPareto => {
            let mean = sorted.iter().map(|x| x - lo).sum::<f64>() / sorted.len() as f64;
            FreeParams {
                start: vec![0.1, mean.ln()],
                // c < -1 makes the likelihood unbounded at the upper endpoint
                build: Box::new(move |u| {
                    (u[0] >= -1.0).then(|| DistParams::new(vec![u[0]], lo, u[1].exp()))
                }),
            }
        }
    };
    Some(fp)
}

/// The truncated normal likelihood can keep rising as `loc` runs off to
/// infinity (the shape tends to an exponential), so the fit keeps `loc`
/// within two window widths of the window and `scale` under ten widths.
fn truncnorm_fit_domain(lo: f64, hi: f64, loc: f64, scale: f64) -> bool {
    let width = hi - lo;
    loc >= lo - 2.0 * width && loc <= hi + 2.0 * width && scale <= 10.0 * width
}

/// Maximum-likelihood fit. Samples are sorted first, so the result does not
/// depend on their order.
pub fn dist_fit(kind: DistKind, samples: &[f64]) -> Result<DistParams, StatError> {
    if samples.len() < 3 {
        return Err(StatError::TooFewSamples {
            needed: 3,
            got: samples.len(),
        });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(StatError::SupportViolation(format!("{kind}: non-finite sample")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    if min == max {
        return Err(StatError::DegenerateSamples);
    }

    match kind {
        DistKind::Uniform => return Ok(DistParams::new(vec![], min, max - min)),
        DistKind::Exponential => {
            if min < 0.0 {
                return Err(StatError::SupportViolation(format!(
                    "expon with loc 0 needs non-negative samples, got {min}"
                )));
            }
            let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
            return Ok(DistParams::new(vec![], 0.0, mean));
        }
        _ => {}
    }

    let free = free_params(kind, &sorted).expect("iterative kinds have free parameters");
    let build = &free.build;
    let objective = |u: &[f64]| match build(u) {
        Some(p) if p.validate(kind).is_ok() => {
            -sorted.iter().map(|&x| ln_pdf_unchecked(kind, &p, x)).sum::<f64>()
        }
        _ => f64::INFINITY,
    };
    let minimum = nelder_mead(
        objective,
        &free.start,
        NelderMeadOptions {
            max_iterations: 2000,
            tolerance: 1e-10,
            initial_step: 0.1,
        },
    );
    let params = build(&minimum.point)
        .filter(|p| p.validate(kind).is_ok())
        .ok_or_else(|| StatError::FitFailed(format!("{kind}: optimizer left the legal domain")))?;
    if !minimum.value.is_finite() {
        return Err(StatError::FitFailed(format!("{kind}: likelihood is zero everywhere tried")));
    }
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(shape: &[f64], loc: f64, scale: f64) -> DistParams {
        DistParams::new(shape.to_vec(), loc, scale)
    }

    #[test]
    fn cdf_examples() {
        assert!((dist_cdf(DistKind::Uniform, &p(&[], 0.0, 1.0), 0.3).unwrap() - 0.3).abs() < 1e-15);
        let e = dist_cdf(DistKind::Exponential, &p(&[], 0.0, 1.0), 1.0).unwrap();
        assert!((e - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((e - 0.632121).abs() < 1e-6);
        let b = dist_cdf(DistKind::Bradford, &p(&[1.0], 0.0, 1.0), 1.0).unwrap();
        assert!((b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cdf_limits_for_every_kind() {
        let params = [
            (DistKind::Beta, p(&[2.0, 3.0], 0.0, 1.0)),
            (DistKind::WrappedCauchy, p(&[0.3], 0.0, 1.0 / (2.0 * PI))),
            (DistKind::Uniform, p(&[], 0.0, 1.0)),
            (DistKind::Bradford, p(&[2.0], 0.0, 1.0)),
            (DistKind::TruncatedNormal, p(&[-1.0, 2.0], 0.5, 0.3)),
            (DistKind::FoldedNormal, p(&[1.0], 0.0, 1.0)),
            (DistKind::GeneralizedPareto, p(&[0.2], 0.0, 1.0)),
            (DistKind::Exponential, p(&[], 0.0, 2.0)),
        ];
        for (kind, params) in params {
            assert_eq!(dist_cdf(kind, &params, -1e6).unwrap(), 0.0, "{kind}");
            assert!((dist_cdf(kind, &params, 1e6).unwrap() - 1.0).abs() < 1e-12, "{kind}");
        }
    }

    #[test]
    fn wrapcauchy_zero_c_is_uniform() {
        let params = p(&[0.0], 0.0, 1.0 / (2.0 * PI));
        for x in [0.1, 0.25, 0.5, 0.8] {
            let c = dist_cdf(DistKind::WrappedCauchy, &params, x).unwrap();
            assert!((c - x).abs() < 1e-12, "{x} {c}");
        }
    }

    #[test]
    fn genpareto_negative_shape_has_upper_endpoint() {
        let params = p(&[-0.5], 0.0, 1.0);
        assert_eq!(dist_cdf(DistKind::GeneralizedPareto, &params, 2.0).unwrap(), 1.0);
        let mid = dist_cdf(DistKind::GeneralizedPareto, &params, 1.0).unwrap();
        // 1 - (1 - 0.5)^2
        assert!((mid - 0.75).abs() < 1e-12);
    }

    #[test]
    fn invalid_params_are_rejected() {
        assert!(dist_cdf(DistKind::Uniform, &p(&[], 0.0, 0.0), 0.5).is_err());
        assert!(dist_cdf(DistKind::Beta, &p(&[-1.0, 1.0], 0.0, 1.0), 0.5).is_err());
        assert!(dist_cdf(DistKind::WrappedCauchy, &p(&[1.0], 0.0, 1.0), 0.5).is_err());
        assert!(dist_cdf(DistKind::Bradford, &p(&[], 0.0, 1.0), 0.5).is_err());
    }

    #[test]
    fn pdf_integrates_to_one() {
        let cases = [
            (DistKind::Beta, p(&[2.0, 3.0], 0.0, 1.0), 0.0, 1.0),
            (DistKind::WrappedCauchy, p(&[0.6], 0.0, 1.0 / (2.0 * PI)), 0.0, 1.0),
            (DistKind::Bradford, p(&[3.0], 0.0, 1.0), 0.0, 1.0),
            (DistKind::TruncatedNormal, p(&[-1.0, 2.0], 0.0, 1.0), -1.0, 2.0),
            (DistKind::FoldedNormal, p(&[0.7], 0.0, 1.0), 0.0, 12.0),
            (DistKind::GeneralizedPareto, p(&[-0.5], 0.0, 1.0), 0.0, 2.0),
        ];
        for (kind, params, a, b) in cases {
            let steps = 200_000;
            let h = (b - a) / steps as f64;
            let integral: f64 = (0..steps)
                .map(|i| {
                    let x = a + (i as f64 + 0.5) * h;
                    dist_ln_pdf(kind, &params, x).unwrap().exp() * h
                })
                .sum();
            assert!((integral - 1.0).abs() < 1e-4, "{kind}: {integral}");
        }
    }

    #[test]
    fn fit_uniform_closed_form() {
        let f = dist_fit(DistKind::Uniform, &[0.1, 0.4, 0.9]).unwrap();
        assert!((f.loc - 0.1).abs() < 1e-15);
        assert!((f.scale - 0.8).abs() < 1e-15);
    }

    #[test]
    fn fit_exponential_closed_form() {
        let f = dist_fit(DistKind::Exponential, &[1.0, 2.0, 3.0, 0.5, 3.5]).unwrap();
        assert_eq!(f.loc, 0.0);
        assert!((f.scale - 2.0).abs() < 1e-6);
        assert!(matches!(
            dist_fit(DistKind::Exponential, &[-1.0, 2.0, 3.0]),
            Err(StatError::SupportViolation(_))
        ));
    }

    #[test]
    fn fit_beta_symmetric_samples() {
        let half = [0.05, 0.12, 0.2, 0.31, 0.38, 0.45];
        let samples: Vec<f64> = half.iter().flat_map(|&x| [x, 1.0 - x]).collect();
        let f = dist_fit(DistKind::Beta, &samples).unwrap();
        assert!((f.shape[0] - f.shape[1]).abs() <= 0.05, "{f:?}");
    }

    #[test]
    fn fit_rejects_small_and_degenerate_inputs() {
        assert!(matches!(
            dist_fit(DistKind::Beta, &[0.1, 0.2]),
            Err(StatError::TooFewSamples { .. })
        ));
        for kind in DistKind::ALL {
            assert!(matches!(
                dist_fit(kind, &[0.4, 0.4, 0.4]),
                Err(StatError::DegenerateSamples)
            ));
        }
    }

    #[test]
    fn fitted_likelihood_is_locally_optimal() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let unit: Vec<f64> = (0..60).map(|_| rng.gen::<f64>().powf(1.5)).collect();
        let wide: Vec<f64> = unit.iter().map(|x| 3.0 + 4.0 * x).collect();
        for samples in [&unit, &wide] {
            let mut sorted = samples.clone();
            sorted.sort_by(f64::total_cmp);
            let (lo, hi) = support_window(&sorted);
            for kind in DistKind::ALL {
                if kind.shape_count() == 0 {
                    continue;
                }
                let fit = dist_fit(kind, samples).unwrap();
                let best = log_likelihood(kind, &fit, samples).unwrap();
                for _ in 0..50 {
                    let mut jiggle = || 1.0 + rng.gen_range(-0.05..0.05);
                    let mut q = fit.clone();
                    match kind {
                        DistKind::TruncatedNormal => {
                            q.loc += (jiggle() - 1.0) * (hi - lo);
                            q.scale *= jiggle();
                            q.shape = vec![(lo - q.loc) / q.scale, (hi - q.loc) / q.scale];
                            if !truncnorm_fit_domain(lo, hi, q.loc, q.scale) {
                                continue;
                            }
                        }
                        DistKind::FoldedNormal | DistKind::GeneralizedPareto => {
                            q.shape[0] = (q.shape[0] + (jiggle() - 1.0)).max(-1.0);
                            q.scale *= jiggle();
                        }
                        DistKind::WrappedCauchy => q.shape[0] = (q.shape[0] * jiggle()).min(0.999),
                        _ => q.shape.iter_mut().for_each(|v| *v *= jiggle()),
                    }
                    if q.validate(kind).is_err() {
                        continue;
                    }
                    let other = log_likelihood(kind, &q, samples).unwrap();
                    assert!(best >= other - 1e-7, "{kind}: {best} < {other} at {q:?}");
                }
            }
        }
    }
}
