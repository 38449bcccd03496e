//! One-step forecasts from each model family, with and without the log1p
//! and 0-floor transforms and calendar covariates.

use spikecast::bridge::StubBackend;
use spikecast::forecast::{make_forecaster, ExogenousSpec, ForecasterConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let history = [4.0, 2.0, 7.0, 1.0, 0.0, 3.0, 9.0, 2.0, 1.0, 5.0, 3.0, 0.0, 2.0, 6.0, 1.0, 4.0];

    let configs = [
        ("", ForecasterConfig::pv()),
        ("", ForecasterConfig::ma(3)),
        ("", ForecasterConfig::ar(2)),
        (" log1p+floor0", ForecasterConfig::ar(2).with_log1p(true).with_floor0(true)),
        (
            " freeze=Dec",
            ForecasterConfig::ar(1).with_exogenous(ExogenousSpec {
                month_of_year: false,
                code_freeze_month: Some(12),
            }),
        ),
    ];
    for (note, config) in configs {
        let mut f = make_forecaster(config, None)?;
        let next = f.fit_predict_one(&history, 0)?;
        println!("{:<24} -> {next:.3}", format!("{}{note}", config.label()));
    }

    // the foundation-model family goes through a backend; the stub averages
    // the last few values of the context it is sent
    let mut stub = StubBackend;
    let mut fm = make_forecaster(ForecasterConfig::fm(4), Some(&mut stub))?;
    println!("FM(4) via stub           -> {:.3}", fm.fit_predict_one(&history, 0)?);
    Ok(())
}
