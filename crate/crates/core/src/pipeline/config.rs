//! Experiment configuration, read from TOML.
//!
//! ```toml
//! montages = [19, 64]
//! metrics = ["COH", "iCOH", "PLV", "PLI", "AEC"]
//! trials = 100
//! fs = 200.0
//! n_samples = 10000
//! n_sources = 3002
//! n_active = 200
//! noise_sigma = 0.01
//! segment_samples = 512
//! n_bins = 100
//! master_seed = 1
//! source_mode = "synthetic"            # or { file = "library.csv" }
//! leadfield_mode = "synthetic"         # or { file = "leadfields/" }
//!
//! [[bands]]
//! name = "alpha"
//! lo = 8.0
//! hi = 13.0
//!
//! [window]
//! window_seconds = 6.0
//! overlap_seconds = 0.5
//! plv_overlap_seconds = 0.0
//! ```
//!
//! Missing keys take the defaults of [`ExperimentConfig::default`].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::connectivity::{IcohFold, Metric, WindowConfig};
use crate::error::{Error, Result};
use crate::montage::BUILTIN_CHANNEL_COUNTS;
use crate::spectral::{Band, DEFAULT_SEGMENT_SAMPLES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputMode {
    Synthetic,
    /// Source mode: one library matrix file. Lead-field mode: a directory
    /// holding `leadfield_<channels>.csv` per montage.
    File(PathBuf),
}

/// Sliding-window settings. PLV uses `plv_overlap_seconds`, PLI and AEC use
/// `overlap_seconds`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowSettings {
    pub window_seconds: f64,
    pub overlap_seconds: f64,
    pub plv_overlap_seconds: f64,
}

impl Default for WindowSettings {
    fn default() -> Self {
        Self {
            window_seconds: 6.0,
            overlap_seconds: 0.5,
            plv_overlap_seconds: 0.0,
        }
    }
}

impl WindowSettings {
    pub fn for_metric(&self, metric: Metric) -> Result<WindowConfig> {
        let overlap = match metric {
            Metric::Plv => self.plv_overlap_seconds,
            _ => self.overlap_seconds,
        };
        WindowConfig::new(self.window_seconds, overlap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub montages: Vec<usize>,
    pub metrics: Vec<Metric>,
    pub bands: Vec<Band>,
    pub trials: usize,
    pub fs: f64,
    pub n_samples: usize,
    pub n_sources: usize,
    pub n_active: usize,
    pub noise_sigma: f64,
    pub segment_samples: usize,
    pub window: WindowSettings,
    pub n_bins: usize,
    pub master_seed: u64,
    pub source_mode: InputMode,
    pub leadfield_mode: InputMode,
    /// Rows in the synthetic source pool.
    pub library_size: usize,
    /// Resonance centre of synthetic sources, Hz.
    pub alpha_hz: f64,
    pub icoh_fold: IcohFold,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            montages: BUILTIN_CHANNEL_COUNTS.to_vec(),
            metrics: Metric::ALL.to_vec(),
            bands: vec![Band::alpha()],
            trials: 100,
            fs: 200.0,
            n_samples: 10_000,
            n_sources: 3002,
            n_active: 200,
            noise_sigma: 0.01,
            segment_samples: DEFAULT_SEGMENT_SAMPLES,
            window: WindowSettings::default(),
            n_bins: 100,
            master_seed: 1,
            source_mode: InputMode::Synthetic,
            leadfield_mode: InputMode::Synthetic,
            library_size: 1772,
            alpha_hz: 10.0,
            icoh_fold: IcohFold::SignedMean,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.montages.is_empty() || self.metrics.is_empty() || self.bands.is_empty() {
            return bad("montages, metrics and bands must be non-empty".into());
        }
        if self.leadfield_mode == InputMode::Synthetic {
            if let Some(n) = self.montages.iter().find(|n| !BUILTIN_CHANNEL_COUNTS.contains(n)) {
                return bad(format!("no built-in montage with {n} channels"));
            }
        }
        if self.trials < 3 {
            return bad(format!("at least 3 trials are needed for correlations, got {}", self.trials));
        }
        for (name, v) in [
            ("n_samples", self.n_samples),
            ("n_sources", self.n_sources),
            ("segment_samples", self.segment_samples),
            ("n_bins", self.n_bins),
            ("library_size", self.library_size),
        ] {
            if v == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if self.n_active > self.n_sources {
            return bad(format!(
                "n_active {} exceeds n_sources {}",
                self.n_active, self.n_sources
            ));
        }
        if self.source_mode == InputMode::Synthetic && self.n_active > self.library_size {
            return bad(format!(
                "n_active {} exceeds library_size {}",
                self.n_active, self.library_size
            ));
        }
        if !(self.fs > 0.0) || !(self.noise_sigma > 0.0) {
            return bad("fs and noise_sigma must be positive".into());
        }
        for band in &self.bands {
            band.check_nyquist(self.fs)
                .map_err(|e| Error::InvalidConfig(format!("band `{}`: {e}", band.name)))?;
        }
        for &m in &self.metrics {
            self.window
                .for_metric(m)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        }
        Ok(())
    }
}
