//! Year-end total estimates made 12, 11, ..., 1 months before year end with
//! iterated multi-step forecasts.

use spikecast::eval::{ims_forecast, year_end_table};
use spikecast::forecast::ForecasterConfig;
use spikecast::synth::{generate, PatternKind, PatternSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let series = generate(
        &PatternSpec::new(PatternKind::DoubleSpike).with_rates(2.0, 8.0, 3).with_seed(5),
    )?;
    let config = ForecasterConfig::ar(3).with_floor0(true);

    let ahead = ims_forecast(&series.prefix(72)?, config, 3, None)?;
    println!("3-step forecast after month 72: {:.2?}", ahead.values);

    let table = year_end_table(&series, config, series.len() - 12, None)?;
    for row in table.all_rows() {
        let label = match row.months_before {
            0 => "actual".to_string(),
            a => a.to_string(),
        };
        let pct = row.error_pct.map_or("n/a".into(), |e| format!("{:+.1}%", e * 100.0));
        println!("{label:>6}  sum {:>7.2}  error {pct}", row.sum);
    }
    Ok(())
}
