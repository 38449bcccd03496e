//! Augmented Dickey-Fuller test on a random walk and on white noise.

use spikecast::statfit::{adf_test, AdfRegression};
use spikecast::synth::SplitMix64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = SplitMix64::new(2024);
    // sum of 12 uniforms minus 6 is close enough to a standard normal here
    let mut normal = || (0..12).map(|_| rng.next_f64()).sum::<f64>() - 6.0;

    let noise: Vec<f64> = (0..84).map(|_| normal()).collect();
    let mut level = 0.0;
    let walk: Vec<f64> = (0..84)
        .map(|_| {
            level += normal();
            level
        })
        .collect();

    for (name, series) in [("random walk", &walk), ("white noise", &noise)] {
        let r = adf_test(series, None, AdfRegression::Constant)?;
        println!(
            "{name:<12} stat {:>7.3}  p {:.4}  lags {:>2}  5% cv {:.3}",
            r.statistic, r.p_value, r.lags_used, r.critical_values[1]
        );
    }
    Ok(())
}
