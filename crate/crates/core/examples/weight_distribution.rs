//! Distribution shape of connectivity weights: MCW, skewness, kurtosis and
//! normalized Shannon entropy for each metric on a 64-channel record, plus
//! a text histogram of the COH weights.

use conndist::connectivity::{record_connectivity, IcohFold, Metric};
use conndist::distribution::{histogram, summarize_matrix, upper_triangle_weights};
use conndist::signal_model::{
    assemble_source_activity, generate_synthetic_leadfield, generate_synthetic_sources, project_to_scalp,
};
use conndist::spectral::Band;

fn main() -> conndist::Result<()> {
    let library = generate_synthetic_sources(60, 10_000, 200.0, 10.0, 5)?;
    let sources = assemble_source_activity(&library, 800, 60, 0.01, 10_000, 5)?;
    let rec = project_to_scalp(&generate_synthetic_leadfield("egi64", 800, 5)?, &sources)?;
    let mats = record_connectivity(&rec, &Band::alpha(), &Metric::ALL, 512, IcohFold::SignedMean)?;

    println!("metric    MCW   skew   kurt     SE   pairs");
    for m in &mats {
        let s = summarize_matrix(m, 100)?;
        println!(
            "{:<5} {:>6.3} {:>6.2} {:>6.2} {:>6.3} {:>7}",
            m.metric.name(),
            s.mcw,
            s.skewness.unwrap_or(f64::NAN),
            s.kurtosis.unwrap_or(f64::NAN),
            s.entropy,
            s.n_pairs
        );
    }

    let coh = upper_triangle_weights(&mats[0])?;
    let counts = histogram(&coh, 20)?;
    let top = *counts.iter().max().unwrap_or(&1) as f64;
    println!("\nCOH weights, 20 bins over [0, 1]:");
    for (k, c) in counts.iter().enumerate() {
        let bar = "#".repeat((40.0 * *c as f64 / top).round() as usize);
        println!("{:4.2} {c:>5} {bar}", k as f64 / 20.0);
    }
    Ok(())
}
