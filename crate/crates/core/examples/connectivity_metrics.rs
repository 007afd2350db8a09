//! The five connectivity metrics on one simulated 19-channel record, with
//! the volume-conduction check on a duplicated channel.

use conndist::connectivity::{record_connectivity, IcohFold, Metric};
use conndist::signal_model::{
    assemble_source_activity, generate_synthetic_leadfield, generate_synthetic_sources, project_to_scalp,
};
use conndist::spectral::Band;

fn main() -> conndist::Result<()> {
    let library = generate_synthetic_sources(60, 10_000, 200.0, 10.0, 11)?;
    let sources = assemble_source_activity(&library, 800, 60, 0.01, 10_000, 11)?;
    let mut rec = project_to_scalp(&generate_synthetic_leadfield("std19", 800, 11)?, &sources)?;

    // O2 becomes an exact copy of Fp1.
    let fp1 = rec.data.row(0).to_owned();
    rec.data.row_mut(18).assign(&fp1);

    let band = Band::alpha();
    let mats = record_connectivity(&rec, &band, &Metric::ALL, 512, IcohFold::SignedMean)?;
    println!("metric   mean weight   Fp1-Fp2   Fp1-O2(copy)");
    for m in &mats {
        let n = m.n_channels();
        let mean = m.weights.iter().sum::<f64>() / (n * n) as f64;
        println!(
            "{:<6} {mean:>12.3} {:>9.3} {:>14.3}",
            m.metric.name(),
            m.weights[[0, 1]],
            m.weights[[0, 18]]
        );
    }
    Ok(())
}
