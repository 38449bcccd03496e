//! Generate the eight-category synthetic suite and print a compact view of
//! each series.

use spikecast::synth::{generate_suite, intensity, PatternKind, PatternSpec, RootCause, SuiteSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut spec = SuiteSpec::new(42);
    spec.overrides.insert(
        RootCause::Data,
        PatternSpec::new(PatternKind::RegimeShift).with_rates(1.0, 6.0, 3),
    );

    for (cause, series) in generate_suite(&spec)? {
        let zeros = series.values().iter().filter(|&&v| v == 0.0).count();
        let head: Vec<String> = series.values()[..18].iter().map(|v| v.to_string()).collect();
        println!("{:<10} total {:>5} zeros {:>2}  {} ...", cause.name(), series.total(), zeros, head.join(" "));
    }

    let shape = intensity(&PatternSpec::new(PatternKind::SmoothDecaySpike).with_seed(1))?;
    println!("smooth decay intensity peak {:.2}", shape.iter().cloned().fold(0.0, f64::max));
    Ok(())
}
