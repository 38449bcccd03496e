//! Turn a series into its trimmed cumulative curve and rank eight candidate
//! distributions by Kolmogorov-Smirnov p-value.

use spikecast::statfit::{cdf_samples, rank_distributions, DistKind};
use spikecast::synth::{generate, PatternKind, PatternSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let series = generate(&PatternSpec::new(PatternKind::StationarySparse).with_seed(3))?;
    let samples = cdf_samples(&series)?;
    println!("{} curve points", samples.len());

    let ranking = rank_distributions(&samples, &DistKind::ALL);
    for entry in &ranking.entries {
        let params = entry
            .params
            .as_ref()
            .map(|p| format!("shape {:.4?} loc {:.4} scale {:.4}", p.shape, p.loc, p.scale))
            .unwrap_or_else(|| entry.note.clone().unwrap_or_default());
        println!("{:<10} D {:.4}  p {:.4}  {params}", entry.kind.name(), entry.ks.d_stat, entry.ks.p_value);
    }
    Ok(())
}
