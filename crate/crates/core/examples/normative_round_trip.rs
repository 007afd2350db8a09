//! Normative mode: store per-subject cross-spectra as files, then recompute
//! COH and iCOH distribution statistics per standard band from the files.

use conndist::connectivity::IcohFold;
use conndist::pipeline::run_normative_analysis;
use conndist::signal_model::{
    assemble_source_activity, generate_synthetic_leadfield, generate_synthetic_sources, project_to_scalp,
};
use conndist::spectral::{bartlett_cross_spectrum, write_cross_spectrum, Band};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("conndist_normative_example");
    std::fs::create_dir_all(&dir)?;

    let library = generate_synthetic_sources(60, 8000, 200.0, 10.0, 4)?;
    let leadfield = generate_synthetic_leadfield("std19", 500, 4)?;
    let mut files = Vec::new();
    for subject in 0..3u64 {
        let src = assemble_source_activity(&library, 500, 60, 0.01, 8000, 40 + subject)?;
        let cs = bartlett_cross_spectrum(&project_to_scalp(&leadfield, &src)?, 512)?;
        let path = dir.join(format!("subject{subject}.csv"));
        write_cross_spectrum(&path, &cs)?;
        files.push(path);
    }

    let bands = Band::standard_set();
    let tables = run_normative_analysis(&files, &bands, 100, IcohFold::SignedMean)?;
    println!("subject   band    metric   MCW    SE");
    for r in &tables.trials {
        println!(
            "{:<9} {:<7} {:<6} {:.3} {:.3}",
            r.subject.as_deref().unwrap_or("?"),
            r.band,
            r.metric,
            r.mcw,
            r.entropy
        );
    }
    Ok(())
}
