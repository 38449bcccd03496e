//! Fit reliability growth curves to cumulative outage counts and compare
//! them by squared error.

use spikecast::srgm::{cumulative_from_counts, srgm_compare, srgm_mean, srgm_remaining, SrgmKind, SrgmParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // counts that taper off as fixes land
    let counts = [9.0, 8.0, 8.0, 6.0, 5.0, 5.0, 3.0, 3.0, 2.0, 2.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0];
    let data = cumulative_from_counts(&counts);

    for fit in srgm_compare(&data, &SrgmKind::MEAN_VALUE)? {
        println!(
            "{:<14} sse {:>9.3}  converged {}  params {:.4?}",
            fit.kind.name(),
            fit.sse,
            fit.converged,
            fit.params.values()
        );
    }

    let go = SrgmParams::GoelOkumotoMeanValue { eventual_errors: 60.0, detection_rate: 0.2 };
    println!("GO m(10) = {:.3}, remaining after t=10: {:.3}", srgm_mean(&go, 10.0)?, srgm_remaining(&go, 10.0)?);
    Ok(())
}
