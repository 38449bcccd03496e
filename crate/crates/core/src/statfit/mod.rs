//! Distribution fitting with Kolmogorov-Smirnov ranking, and the augmented
//! Dickey-Fuller unit-root test.

mod adf;
mod dist;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{normalize, SeriesError, TimeSeries};

pub use adf::{adf_test, default_max_lag, mackinnon_critical_values, mackinnon_p, AdfRegression, AdfResult};
pub use dist::{dist_cdf, dist_fit, dist_ln_pdf, log_likelihood, DistKind, DistParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatError {
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("samples outside the support: {0}")]
    SupportViolation(String),
    #[error("all samples are identical")]
    DegenerateSamples,
    #[error("no samples")]
    EmptySamples,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("fit failed: {0}")]
    FitFailed(String),
    #[error("series of length {got} is too short, need at least {needed}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("regression design is singular")]
    SingularRegression,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub d_stat: f64,
    pub p_value: f64,
    pub n: usize,
}

/// One-sample K-S test of `samples` against the given distribution.
pub fn ks_test(samples: &[f64], kind: DistKind, params: &DistParams) -> Result<KsResult, StatError> {
    if samples.is_empty() {
        return Err(StatError::EmptySamples);
    }
    params.validate(kind)?;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = dist_cdf(kind, params, x)?;
        let above = (i + 1) as f64 / nf - f;
        let below = f - i as f64 / nf;
        d = d.max(above.abs()).max(below.abs());
    }
    let d = d.clamp(0.0, 1.0);
    Ok(KsResult {
        d_stat: d,
        p_value: ks_p_value(d, n),
        n,
    })
}

/// Asymptotic Kolmogorov p-value with the usual finite-sample scaling of `d`.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    kolmogorov_q((sqrt_n + 0.12 + 0.11 / sqrt_n) * d)
}

/// Survival function of the Kolmogorov distribution.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let q = if lambda < 1.18 {
        // theta-function form converges fast for small lambda
        let y = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let sum: f64 = (1..=20)
            .map(|k| {
                let odd = (2 * k - 1) as f64;
                (odd * odd * y).exp()
            })
            .sum();
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * sum
    } else {
        let sum: f64 = (1..=100)
            .map(|k| {
                let kf = k as f64;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * kf * kf * lambda * lambda).exp()
            })
            .sum();
        2.0 * sum
    };
    q.clamp(0.0, 1.0)
}

/// Drops leading zeros except the last one and trailing ones except the first.
pub fn trim_cdf(points: &[f64]) -> Vec<f64> {
    let leading_zeros = points.iter().take_while(|&&p| p == 0.0).count();
    let start = leading_zeros.saturating_sub(1);
    let rest = &points[start..];
    let trailing_ones = rest.iter().rev().take_while(|&&p| p == 1.0).count();
    let mut end = rest.len() - trailing_ones.saturating_sub(1);
    // a run of zeros followed by nothing must not lose its survivor
    if trailing_ones > 0 && end == 0 {
        end = 1;
    }
    rest[..end].to_vec()
}

/// Samples for curve fitting: normalized values, accumulated into an
/// empirical CDF curve, then trimmed.
pub fn cdf_samples(series: &TimeSeries) -> Result<Vec<f64>, StatError> {
    let normalized = normalize(series)?;
    let mut running = 0.0;
    let mut curve: Vec<f64> = normalized
        .ratios
        .iter()
        .map(|r| {
            running += r;
            running.min(1.0)
        })
        .collect();
    // rounding can leave the last point a hair under 1
    if let Some(last) = curve.last_mut() {
        *last = 1.0;
    }
    Ok(trim_cdf(&curve))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedDist {
    pub kind: DistKind,
    pub params: Option<DistParams>,
    pub ks: KsResult,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistRanking {
    pub entries: Vec<RankedDist>,
}

impl DistRanking {
    pub fn best(&self) -> Option<&RankedDist> {
        self.entries.first()
    }
}

/// Fits every requested kind and ranks by K-S p-value, best first. A kind
/// that cannot be fitted stays in the ranking with `p = 0`, `D = 1` and a note.
pub fn rank_distributions(samples: &[f64], kinds: &[DistKind]) -> DistRanking {
    let mut entries: Vec<RankedDist> = kinds
        .iter()
        .map(|&kind| {
            let outcome = dist_fit(kind, samples)
                .and_then(|params| ks_test(samples, kind, &params).map(|ks| (params, ks)));
            match outcome {
                Ok((params, ks)) => RankedDist {
                    kind,
                    params: Some(params),
                    ks,
                    note: None,
                },
                Err(err) => RankedDist {
                    kind,
                    params: None,
                    ks: KsResult {
                        d_stat: 1.0,
                        p_value: 0.0,
                        n: samples.len(),
                    },
                    note: Some(err.to_string()),
                },
            }
        })
        .collect();
    entries.sort_by(|a, b| {
        b.ks.p_value
            .total_cmp(&a.ks.p_value)
            .then(a.kind.cmp(&b.kind))
    });
    DistRanking { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_uniform() -> DistParams {
        DistParams::new(vec![], 0.0, 1.0)
    }

    #[test]
    fn ks_hand_example() {
        let r = ks_test(&[0.25, 0.5, 0.75], DistKind::Uniform, &unit_uniform()).unwrap();
        assert!((r.d_stat - 0.25).abs() < 1e-15);
        assert_eq!(r.n, 3);
    }

    #[test]
    fn ks_quantile_construction() {
        let samples: Vec<f64> = (1..=100).map(|i| (i as f64 - 0.5) / 100.0).collect();
        let r = ks_test(&samples, DistKind::Uniform, &unit_uniform()).unwrap();
        assert!((r.d_stat - 0.005).abs() < 1e-12, "{}", r.d_stat);
        assert!(r.p_value > 0.99);
    }

    #[test]
    fn ks_empty_is_error() {
        assert_eq!(
            ks_test(&[], DistKind::Uniform, &unit_uniform()),
            Err(StatError::EmptySamples)
        );
    }

    #[test]
    fn kolmogorov_reference_values() {
        // tabulated critical values of the limiting distribution
        assert!((kolmogorov_q(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_q(1.2238) - 0.10).abs() < 1e-4);
        assert!((kolmogorov_q(1.6276) - 0.01).abs() < 1e-4);
        // both series agree where they meet
        let lam: f64 = 1.18;
        let small = {
            let y = -std::f64::consts::PI.powi(2) / (8.0 * lam * lam);
            1.0 - (2.0 * std::f64::consts::PI).sqrt() / lam
                * (1..=20).map(|k| (((2 * k - 1) as f64).powi(2) * y).exp()).sum::<f64>()
        };
        assert!((small - kolmogorov_q(lam)).abs() < 1e-12);
        assert_eq!(kolmogorov_q(0.0), 1.0);
        assert!(kolmogorov_q(10.0) < 1e-12);
    }

    #[test]
    fn ks_monte_carlo_accepts_true_distribution() {
        let params = DistParams::new(vec![], 0.0, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut accepted = 0;
        for _ in 0..100 {
            let samples: Vec<f64> = (0..500)
                .map(|_| -2.0 * (1.0 - rng.gen::<f64>()).ln())
                .collect();
            if ks_test(&samples, DistKind::Exponential, &params).unwrap().p_value > 0.05 {
                accepted += 1;
            }
        }
        assert!(accepted >= 90, "{accepted}");
    }

    #[test]
    fn ks_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let params = DistParams::new(vec![2.0, 5.0], 0.0, 1.0);
        for _ in 0..200 {
            let n = rng.gen_range(1..40);
            let samples: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            // empirical CDF just below and at every sample, by counting
            let mut d: f64 = 0.0;
            for &x in &samples {
                let f = dist_cdf(DistKind::Beta, &params, x).unwrap();
                let mut below = 0;
                let mut at_or_below = 0;
                for &y in &samples {
                    below += usize::from(y < x);
                    at_or_below += usize::from(y <= x);
                }
                for step in [below, at_or_below] {
                    d = d.max((step as f64 / n as f64 - f).abs());
                }
            }
            let r = ks_test(&samples, DistKind::Beta, &params).unwrap();
            assert_eq!(r.d_stat, d);
        }
    }

    #[test]
    fn trim_examples() {
        assert_eq!(trim_cdf(&[0.0, 0.0, 0.2, 0.7, 1.0, 1.0]), vec![0.0, 0.2, 0.7, 1.0]);
        assert_eq!(trim_cdf(&[0.1, 0.5]), vec![0.1, 0.5]);
        assert_eq!(trim_cdf(&[0.0, 0.0, 0.0]), vec![0.0]);
        assert_eq!(trim_cdf(&[1.0, 1.0]), vec![1.0]);
        assert!(trim_cdf(&[]).is_empty());
    }

    #[test]
    fn cdf_samples_pipeline() {
        let s = TimeSeries::monthly(vec![0.0, 0.0, 2.0, 6.0, 2.0, 0.0], "x").unwrap();
        assert_eq!(cdf_samples(&s).unwrap(), vec![0.0, 0.2, 0.8, 1.0]);
    }

    #[test]
    fn uniform_samples_keep_uniform_plausible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples: Vec<f64> = (0..200).map(|_| rng.gen::<f64>()).collect();
        let ranking = rank_distributions(&samples, &DistKind::ALL);
        assert_eq!(ranking.entries.len(), 8);
        let find = |kind| ranking.entries.iter().position(|e| e.kind == kind).unwrap();
        let uniform = &ranking.entries[find(DistKind::Uniform)];
        assert!(uniform.ks.p_value > 0.05, "{ranking:#?}");
        assert!(find(DistKind::Uniform) < find(DistKind::Exponential));
        for w in ranking.entries.windows(2) {
            assert!(w[0].ks.p_value >= w[1].ks.p_value);
        }
    }

    #[test]
    fn identical_samples_all_fail() {
        let ranking = rank_distributions(&[0.5, 0.5, 0.5], &DistKind::ALL);
        assert_eq!(ranking.entries.len(), 8);
        for e in &ranking.entries {
            assert!(e.note.is_some() || e.ks.p_value == 0.0);
        }
        // ties resolve in kind order
        let kinds: Vec<DistKind> = ranking.entries.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, DistKind::ALL.to_vec());
    }

    #[test]
    fn single_kind_single_entry() {
        let r = rank_distributions(&[0.1, 0.3, 0.6, 0.9], &[DistKind::Bradford]);
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.entries[0].kind, DistKind::Bradford);
    }

    fn random_params(kind: DistKind, rng: &mut ChaCha8Rng) -> DistParams {
        let loc = rng.gen_range(-2.0..2.0);
        let scale = rng.gen_range(0.1..3.0);
        let shape = match kind {
            DistKind::Beta => vec![rng.gen_range(0.2..5.0), rng.gen_range(0.2..5.0)],
            DistKind::WrappedCauchy => vec![rng.gen_range(0.0..0.99)],
            DistKind::Bradford => vec![rng.gen_range(0.01..10.0)],
            DistKind::TruncatedNormal => {
                let a = rng.gen_range(-3.0..1.0);
                vec![a, a + rng.gen_range(0.1..4.0)]
            }
            DistKind::FoldedNormal => vec![rng.gen_range(0.0..3.0)],
            DistKind::GeneralizedPareto => vec![rng.gen_range(-1.0..1.0)],
            DistKind::Uniform | DistKind::Exponential => vec![],
        };
        DistParams::new(shape, loc, scale)
    }

    #[test]
    fn cdf_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..1000 {
            let kind = DistKind::ALL[i % 8];
            let params = random_params(kind, &mut rng);
            let x1 = rng.gen_range(-6.0..8.0);
            let x2 = x1 + rng.gen_range(0.0..3.0);
            let f1 = dist_cdf(kind, &params, x1).unwrap();
            let f2 = dist_cdf(kind, &params, x2).unwrap();
            assert!(f2 >= f1 - 1e-12, "{kind} {params:?} {x1} {x2} {f1} {f2}");
            assert!((0.0..=1.0).contains(&f1));
        }
    }

    proptest! {
        #[test]
        fn trim_is_idempotent(mut v in proptest::collection::vec(
            prop_oneof![Just(0.0), Just(1.0), 0.0..1.0f64], 0..20)) {
            v.sort_by(f64::total_cmp);
            let once = trim_cdf(&v);
            prop_assert_eq!(trim_cdf(&once), once.clone());
        }

        #[test]
        fn ranking_is_permutation_invariant(
            v in proptest::collection::vec(0.01..0.99f64, 5..25),
            seed in any::<u64>(),
        ) {
            let mut shuffled = v.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..shuffled.len()).rev() {
                shuffled.swap(i, rng.gen_range(0..=i));
            }
            prop_assert_eq!(
                rank_distributions(&v, &DistKind::ALL),
                rank_distributions(&shuffled, &DistKind::ALL)
            );
        }
    }
}
