//! Bartlett cross-spectrum and coherency of two noisy channels that share
//! a 10 Hz component, and the cross-spectrum file round trip.

use std::f64::consts::PI;

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

use conndist::seed;
use conndist::spectral::{band_slice, bartlett_cross_spectrum, coherency, read_cross_spectrum, write_cross_spectrum, Band};
use conndist::MultichannelRecord;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fs = 200.0;
    let mut rng = seed::rng(3);
    let data = Array2::from_shape_fn((2, 6000), |(ch, t)| {
        let tone = (2.0 * PI * 10.0 * t as f64 / fs + 0.6 * ch as f64).sin();
        tone + 1.5 * rng.sample::<f64, _>(StandardNormal)
    });
    let rec = MultichannelRecord::new(data, fs, vec!["A".into(), "B".into()])?;

    let cs = bartlett_cross_spectrum(&rec, 512)?;
    let coh = coherency(&cs)?;
    println!("{} bins at {:.4} Hz, {} segments", cs.freqs.len(), cs.freqs[0], cs.n_segments);
    for k in band_slice(&cs.freqs, &Band::new("near10", 9.0, 11.0)?)? {
        let c = coh.mats[k][[0, 1]];
        println!("{:6.2} Hz  |C| = {:.3}  Im C = {:+.3}", cs.freqs[k], c.norm(), c.im);
    }

    let dir = std::env::temp_dir().join("conndist_cross_spectrum_example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("ab.csv");
    write_cross_spectrum(&path, &cs)?;
    let back = read_cross_spectrum(&path)?;
    println!("round trip exact: {}", back == cs);
    Ok(())
}
