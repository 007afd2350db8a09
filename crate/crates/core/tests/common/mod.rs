#![allow(dead_code)]

use conndist::pipeline::ExperimentConfig;

/// A grid small enough for debug-speed tests: 20 s at 100 Hz, 300 dipoles.
pub fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        montages: vec![19],
        trials: 5,
        fs: 100.0,
        n_samples: 2000,
        n_sources: 300,
        n_active: 30,
        library_size: 60,
        segment_samples: 128,
        ..ExperimentConfig::default()
    }
}

pub fn small_config_toml(extra: &str) -> String {
    format!(
        "montages = [19]\ntrials = 5\nfs = 100.0\nn_samples = 2000\nn_sources = 300\nn_active = 30\n\
         library_size = 60\nsegment_samples = 128\n{extra}"
    )
}
