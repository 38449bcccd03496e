//! Normalize a monthly series, aggregate it to quarters and score a naive
//! forecast with the normalized error metrics.

use spikecast::series::{aggregate, compute_metrics, normalize, Granularity, TimeSeries};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let monthly = TimeSeries::monthly(
        vec![3.0, 0.0, 1.0, 9.0, 12.0, 4.0, 2.0, 0.0, 1.0, 5.0, 2.0, 1.0],
        "outages",
    )?;

    let normalized = normalize(&monthly)?;
    println!("normalizer {}", normalized.normalizer);
    println!("ratios     {:?}", normalized.ratios);

    let quarterly = aggregate(&monthly, Granularity::Quarterly)?;
    println!("quarterly  {:?}", quarterly.values());

    // previous-value forecast of months 2..12, scored on normalized values
    let actual = &normalized.ratios[1..];
    let predicted = &normalized.ratios[..normalized.ratios.len() - 1];
    let m = compute_metrics(actual, predicted)?;
    println!("nMAE {:.4}  nMSE {:.5}  nRMSE {:.4}", m.mae, m.mse, m.rmse);
    if let Some(pct) = m.sum_error_pct {
        println!("total error {:+.1}%", pct * 100.0);
    }
    Ok(())
}
