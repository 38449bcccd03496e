//! Rolling one-step evaluation with monthly refits, then a lag sweep over
//! PV, MA and AR with lags 1..12.

use spikecast::eval::{lag_sweep, rolling_eval, select_best, Metric, SplitSpec, SweepSettings};
use spikecast::forecast::{ForecasterConfig, ModelKind};
use spikecast::synth::{generate, PatternKind, PatternSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let series = generate(&PatternSpec::new(PatternKind::TrendWithSpikes).with_seed(11))?;
    let split = SplitSpec::default_for(series.len());
    println!("{} months, test region {:?}", series.len(), split.test_range());

    let result = rolling_eval(&series, ForecasterConfig::ma(3), split, None)?;
    for step in result.per_step.iter().take(4) {
        println!("  t={:>2} actual {:>4} predicted {:.2}", step.index, step.actual, step.predicted);
    }
    println!("MA(3) nMAE {:.5}", result.metrics.mae);

    let lags: Vec<usize> = (1..=12).collect();
    let report = lag_sweep(
        &series,
        &[ModelKind::Pv, ModelKind::Ma, ModelKind::Ar],
        &lags,
        split,
        SweepSettings { use_floor0: true, ..Default::default() },
        None,
    )?;
    println!("{} rows", report.rows.len());
    for metric in Metric::ALL {
        let (kind, lag) = select_best(&report, metric)?;
        println!("best by {}: {kind}({lag})", metric.name());
    }
    Ok(())
}
