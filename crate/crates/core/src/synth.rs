//! Seeded generators for spiky, sporadic monthly count series.
//!
//! Every series is a closed-form intensity curve turned into counts. The
//! random stream is SplitMix64 (increment `0x9E3779B97F4A7C15`, mixing
//! multipliers `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`, shifts 30, 27,
//! 31), so a given spec yields the same series everywhere.
//!
//! Counts are `round(l + noise * (P - l))`, floored at 0, where `l` is the
//! intensity and `P` a Poisson(`l`) draw made by inversion. Noise level 1
//! gives plain Poisson counts and 0 gives the rounded intensity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{Granularity, TimeSeries};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid pattern spec: {0}")]
    InvalidSpec(String),
}

/// SplitMix64 generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        mix(self.state)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `lo..=hi` (slight modulo bias is irrelevant here).
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }

    /// Poisson draw by CDF inversion; large means are split into chunks so
    /// `exp(-mean)` never underflows.
    pub fn poisson(&mut self, mean: f64) -> u64 {
        const CHUNK: f64 = 30.0;
        let mut remaining = mean.max(0.0);
        let mut total = 0;
        while remaining > 0.0 {
            let lambda = remaining.min(CHUNK);
            remaining -= lambda;
            let u = self.next_f64();
            let mut k = 0u64;
            let mut p = (-lambda).exp();
            let mut cdf = p;
            while u > cdf && k < 1000 {
                k += 1;
                p *= lambda / k as f64;
                cdf += p;
            }
            total += k;
        }
        total
    }
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    DoubleSpike,
    SmoothDecaySpike,
    StationarySparse,
    TrendWithSpikes,
    RegimeShift,
}

impl PatternKind {
    pub const ALL: [PatternKind; 5] = [
        PatternKind::DoubleSpike,
        PatternKind::SmoothDecaySpike,
        PatternKind::StationarySparse,
        PatternKind::TrendWithSpikes,
        PatternKind::RegimeShift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PatternKind::DoubleSpike => "double_spike",
            PatternKind::SmoothDecaySpike => "smooth_decay_spike",
            PatternKind::StationarySparse => "stationary_sparse",
            PatternKind::TrendWithSpikes => "trend_with_spikes",
            PatternKind::RegimeShift => "regime_shift",
        }
    }
}

impl std::fmt::Display for PatternKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PatternKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PatternKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown pattern `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternSpec {
    pub kind: PatternKind,
    pub length: usize,
    pub base_rate: f64,
    pub spike_amplitude: f64,
    pub spike_width: usize,
    pub noise_level: f64,
    pub seed: u64,
}

pub const DEFAULT_LENGTH: usize = 84;

impl PatternSpec {
    pub fn new(kind: PatternKind) -> Self {
        Self {
            kind,
            length: DEFAULT_LENGTH,
            base_rate: 1.0,
            spike_amplitude: 5.0,
            spike_width: 3,
            noise_level: 1.0,
            seed: 0,
        }
    }

    pub fn with_rates(mut self, base_rate: f64, spike_amplitude: f64, spike_width: usize) -> Self {
        self.base_rate = base_rate;
        self.spike_amplitude = spike_amplitude;
        self.spike_width = spike_width;
        self
    }

    pub fn with_noise(mut self, noise_level: f64) -> Self {
        self.noise_level = noise_level;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_length(mut self, length: usize) -> Self {
        self.length = length;
        self
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |msg: String| Err(SynthError::InvalidSpec(msg));
        if self.length < 12 {
            return bad(format!("length must be at least 12, got {}", self.length));
        }
        for (name, v) in [
            ("base_rate", self.base_rate),
            ("spike_amplitude", self.spike_amplitude),
            ("noise_level", self.noise_level),
        ] {
            if !v.is_finite() || v < 0.0 {
                return bad(format!("{name} must be a finite value >= 0, got {v}"));
            }
        }
        if self.spike_width == 0 {
            return bad("spike_width must be positive".into());
        }
        if self.kind == PatternKind::DoubleSpike && self.length < 6 * self.spike_width + 2 {
            return bad(format!(
                "double_spike with width {} needs length >= {}",
                self.spike_width,
                6 * self.spike_width + 2
            ));
        }
        if self.spike_width * 2 > self.length {
            return bad(format!(
                "spike_width {} too wide for length {}",
                self.spike_width, self.length
            ));
        }
        Ok(())
    }
}

fn gaussian_bump(t: f64, center: f64, width: f64) -> f64 {
    let z = (t - center) / width;
    (-0.5 * z * z).exp()
}

/// Peaks that jump up and fall back within a few periods.
fn sharp_spikes(rng: &mut SplitMix64, len: usize) -> Vec<usize> {
    let count = (len / 18).max(1);
    (0..count).map(|_| rng.range(0, len - 1)).collect()
}

fn sharp_decay(t: f64, start: f64, width: f64) -> f64 {
    if t < start {
        0.0
    } else {
        (-(t - start) * 2.0 / width).exp()
    }
}

/// The noise-free intensity behind [`generate`].
pub fn intensity(spec: &PatternSpec) -> Result<Vec<f64>, SynthError> {
    spec.validate()?;
    let len = spec.length;
    let w = spec.spike_width;
    let wf = w as f64;
    let (base, amp) = (spec.base_rate, spec.spike_amplitude);
    // the shape draws use their own stream so noise never shifts them
    let mut rng = SplitMix64::new(mix(spec.seed ^ 0x5EED_5EED_5EED_5EED));
    let t_of = |i: usize| i as f64;

    let curve: Vec<f64> = match spec.kind {
        PatternKind::DoubleSpike => {
            let half = len / 2;
            let c1 = rng.range(w, half - 2 * w) as f64;
            let c2 = rng.range(half + 2 * w, len - 1 - w) as f64;
            (0..len)
                .map(|i| {
                    let t = t_of(i);
                    base + amp * gaussian_bump(t, c1, wf) + 0.8 * amp * gaussian_bump(t, c2, wf)
                })
                .collect()
        }
        PatternKind::SmoothDecaySpike => {
            let c = rng.range(w, len / 2) as f64;
            (0..len)
                .map(|i| {
                    let t = t_of(i);
                    let shape = if t <= c {
                        gaussian_bump(t, c, wf)
                    } else {
                        (-(t - c) / wf).exp()
                    };
                    base + amp * shape
                })
                .collect()
        }
        PatternKind::StationarySparse => {
            let starts = sharp_spikes(&mut rng, len);
            (0..len)
                .map(|i| {
                    let t = t_of(i);
                    base + amp
                        * starts
                            .iter()
                            .map(|&s| sharp_decay(t, s as f64, wf))
                            .sum::<f64>()
                })
                .collect()
        }
        PatternKind::TrendWithSpikes => {
            let centers = sharp_spikes(&mut rng, len);
            let span = (len - 1) as f64;
            (0..len)
                .map(|i| {
                    let t = t_of(i);
                    let trend = 0.5 * amp * t / span;
                    let spikes: f64 = centers
                        .iter()
                        .map(|&c| gaussian_bump(t, c as f64, wf / 2.0))
                        .sum();
                    base + trend + amp * spikes
                })
                .collect()
        }
        PatternKind::RegimeShift => {
            let at = rng.range(len / 4, 3 * len / 4);
            let upswing = rng.next_u64() & 1 == 0;
            (0..len)
                .map(|i| {
                    let after = i >= at;
                    if after == upswing {
                        base + amp
                    } else {
                        base
                    }
                })
                .collect()
        }
    };
    Ok(curve)
}

/// Integer counts drawn around [`intensity`].
pub fn generate(spec: &PatternSpec) -> Result<TimeSeries, SynthError> {
    let curve = intensity(spec)?;
    let mut rng = SplitMix64::new(spec.seed);
    let values: Vec<f64> = curve
        .iter()
        .map(|&l| {
            let draw = rng.poisson(l) as f64;
            (l + spec.noise_level * (draw - l)).round().max(0.0)
        })
        .collect();
    Ok(TimeSeries::new(values, Granularity::Monthly, 0, spec.kind.name())
        .expect("generated counts are finite and non-negative"))
}

/// Outage root-cause categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootCause {
    Capacity,
    Client,
    Data,
    Database,
    Experiment,
    Frontend,
    Ml,
    Migration,
}

impl RootCause {
    pub const ALL: [RootCause; 8] = [
        RootCause::Capacity,
        RootCause::Client,
        RootCause::Data,
        RootCause::Database,
        RootCause::Experiment,
        RootCause::Frontend,
        RootCause::Ml,
        RootCause::Migration,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RootCause::Capacity => "capacity",
            RootCause::Client => "client",
            RootCause::Data => "data",
            RootCause::Database => "database",
            RootCause::Experiment => "experiment",
            RootCause::Frontend => "frontend",
            RootCause::Ml => "ml",
            RootCause::Migration => "migration",
        }
    }

    /// Pattern used for this category unless overridden.
    pub fn default_pattern(self) -> PatternSpec {
        use PatternKind::*;
        let (kind, base, amp, width) = match self {
            RootCause::Experiment => (DoubleSpike, 2.0, 8.0, 3),
            RootCause::Migration => (SmoothDecaySpike, 0.3, 10.0, 4),
            RootCause::Database => (StationarySparse, 1.0, 5.0, 3),
            RootCause::Frontend => (StationarySparse, 0.1, 3.0, 3),
            RootCause::Capacity => (TrendWithSpikes, 1.5, 6.0, 3),
            RootCause::Data => (RegimeShift, 1.0, 3.0, 3),
            RootCause::Ml => (TrendWithSpikes, 0.5, 4.0, 3),
            RootCause::Client => (StationarySparse, 0.8, 4.0, 3),
        };
        PatternSpec::new(kind).with_rates(base, amp, width)
    }
}

impl std::fmt::Display for RootCause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for RootCause {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RootCause::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown root cause `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub seed: u64,
    /// Length of every default member; overrides keep their own.
    pub length: usize,
    /// Replaces the default pattern of a category. The override's own seed
    /// is mixed with the suite seed.
    pub overrides: BTreeMap<RootCause, PatternSpec>,
}

impl SuiteSpec {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            length: DEFAULT_LENGTH,
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_length(mut self, length: usize) -> Self {
        self.length = length;
        self
    }

    /// Effective spec of one category.
    pub fn member(&self, cause: RootCause) -> PatternSpec {
        let spec = self
            .overrides
            .get(&cause)
            .copied()
            .unwrap_or_else(|| cause.default_pattern().with_length(self.length));
        let tag = (cause as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        spec.with_seed(mix(self.seed ^ tag) ^ spec.seed)
    }
}

/// One series per root cause, in category order, labelled by category.
pub fn generate_suite(spec: &SuiteSpec) -> Result<Vec<(RootCause, TimeSeries)>, SynthError> {
    RootCause::ALL
        .into_iter()
        .map(|cause| {
            let series = generate(&spec.member(cause))?;
            let labelled = TimeSeries::new(
                series.values().to_vec(),
                Granularity::Monthly,
                0,
                cause.name(),
            )
            .expect("generated series are valid");
            Ok((cause, labelled))
        })
        .collect()
}
