//! A reduced montage x metric experiment: several trials per cell, the
//! per-cell Pearson correlations, and the CSV result set on disk.
//!
//! ```text
//! cargo run --release --example experiment_grid -- /tmp/grid
//! ```

use conndist::pipeline::{run_simulation_experiment, write_results, ExperimentConfig};

fn main() -> conndist::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "conndist_grid".into());
    let cfg = ExperimentConfig {
        montages: vec![19],
        trials: 12,
        n_samples: 4000,
        n_sources: 600,
        n_active: 60,
        library_size: 120,
        ..ExperimentConfig::default()
    };
    cfg.validate()?;

    let tables = run_simulation_experiment(&cfg)?;
    for d in &tables.diagnostics {
        eprintln!("note: {d}");
    }
    println!("{} trial rows", tables.trials.len());
    for c in &tables.correlations {
        println!(
            "{:>3} ch {:<4} {:<12} r = {:>7} {}",
            c.montage,
            c.metric,
            c.pair.label(),
            c.r.map(|r| format!("{r:.3}")).unwrap_or_else(|| "-".into()),
            c.stars
        );
    }

    let echo = serde_json::to_value(&cfg).expect("config serializes");
    let written = write_results(&tables, out.as_ref(), &echo)?;
    println!("wrote {} files under {out}", written.len());
    Ok(())
}
