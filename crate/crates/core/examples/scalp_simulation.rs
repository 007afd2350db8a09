//! Assemble cortical source activity from a synthetic alpha-peaked library,
//! project it through a synthetic 19-channel lead field, and inspect the
//! scalp record.
//!
//! ```text
//! cargo run --example scalp_simulation
//! ```

use conndist::signal_model::{
    assemble_source_activity, generate_synthetic_leadfield, generate_synthetic_sources, project_to_scalp,
};
use conndist::spectral::bartlett_cross_spectrum;

fn main() -> conndist::Result<()> {
    let fs = 200.0;
    let n_samples = 4000;
    let library = generate_synthetic_sources(40, n_samples, fs, 10.0, 7)?;
    let sources = assemble_source_activity(&library, 600, 40, 0.01, n_samples, 7)?;
    let leadfield = generate_synthetic_leadfield("std19", 600, 7)?;
    let scalp = project_to_scalp(&leadfield, &sources)?;

    println!(
        "{} sources ({} active) x {} samples -> {} channels",
        sources.n_sources(),
        sources.n_active,
        sources.n_samples(),
        scalp.n_channels()
    );

    let cs = bartlett_cross_spectrum(&scalp, 512)?;
    for (ch, label) in scalp.labels.iter().enumerate().step_by(6) {
        let power = cs.power(ch);
        let (peak, _) = power
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty spectrum");
        println!("{label:>4}: spectral peak at {:.2} Hz", cs.freqs[peak]);
    }
    Ok(())
}
