//! The montage x metric x band simulation grid.
//!
//! One trial is one realization of cortical activity: `n_active` pool rows
//! plus noise dipoles, shuffled. The same realization is projected through
//! every montage's lead field, so montages differ only in electrode layout.
//!
//! Seeds:
//! - source pool: `(master_seed, "library")`
//! - source space (dipole positions): `(master_seed, "leadfield")`, shared by
//!   all montages
//! - trial `t`: `(master_seed, "trial", t)`
//!
//! Each stream depends only on its key, so adding trials leaves earlier trials
//! unchanged and the output does not depend on the worker count.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::config::{ExperimentConfig, InputMode};
use super::output::{correlate_cells, sort_rows, ResultTables, TrialRow};
use crate::connectivity::{compute_metric, MetricInputs};
use crate::distribution::summarize_matrix;
use crate::error::{Error, Result};
use crate::seed::{derive_seed, tag};
use crate::signal_model::{
    assemble_source_activity, generate_synthetic_leadfield, generate_synthetic_sources, project_to_scalp,
    LeadField, MultichannelRecord, SourceLibrary,
};
use crate::spectral::{bandpass_analytic, bartlett_cross_spectrum, coherency, RECOMMENDED_MIN_SEGMENTS};

/// Fraction of failed cells above which the whole run fails.
pub const MAX_FAILED_FRACTION: f64 = 0.5;

pub fn library_seed(master_seed: u64) -> u64 {
    derive_seed(master_seed, &[tag("library")])
}

pub fn leadfield_seed(master_seed: u64) -> u64 {
    derive_seed(master_seed, &[tag("leadfield")])
}

pub fn trial_seed(master_seed: u64, trial: usize) -> u64 {
    derive_seed(master_seed, &[tag("trial"), trial as u64])
}

/// Source pool for a configuration (generated or loaded, rows normalized).
pub fn load_library(cfg: &ExperimentConfig) -> Result<SourceLibrary> {
    match &cfg.source_mode {
        InputMode::Synthetic => generate_synthetic_sources(
            cfg.library_size,
            cfg.n_samples,
            cfg.fs,
            cfg.alpha_hz,
            library_seed(cfg.master_seed),
        ),
        InputMode::File(path) => {
            let mut lib = SourceLibrary::read(path)?;
            if lib.fs != cfg.fs {
                return Err(Error::InvalidConfig(format!(
                    "source library sampled at {} Hz, configuration says {} Hz",
                    lib.fs, cfg.fs
                )));
            }
            lib.normalize_rows();
            Ok(lib)
        }
    }
}

/// Lead field for one montage (generated or loaded).
pub fn load_leadfield(cfg: &ExperimentConfig, n_channels: usize) -> Result<LeadField> {
    let lf = match &cfg.leadfield_mode {
        InputMode::Synthetic => {
            generate_synthetic_leadfield(&n_channels.to_string(), cfg.n_sources, leadfield_seed(cfg.master_seed))?
        }
        InputMode::File(dir) => LeadField::read(&dir.join(format!("leadfield_{n_channels}.csv")))?,
    };
    if lf.n_channels() != n_channels || lf.n_sources() != cfg.n_sources {
        return Err(Error::ShapeMismatch(format!(
            "lead field for montage {n_channels} is {}x{}, expected {n_channels}x{}",
            lf.n_channels(),
            lf.n_sources(),
            cfg.n_sources
        )));
    }
    Ok(lf)
}

struct TrialOutput {
    rows: Vec<TrialRow>,
    failures: Vec<(String, String)>,
    diagnostics: Vec<String>,
}

/// Runs the full grid. Trials run on the current rayon pool.
pub fn run_simulation_experiment(cfg: &ExperimentConfig) -> Result<ResultTables> {
    cfg.validate()?;
    let library = load_library(cfg)?;
    let leadfields = cfg
        .montages
        .iter()
        .map(|&n| load_leadfield(cfg, n))
        .collect::<Result<Vec<_>>>()?;

    let outputs: Vec<TrialOutput> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, &library, &leadfields, t))
        .collect();

    let mut tables = ResultTables::default();
    let mut diagnostics = BTreeSet::new();
    for out in outputs {
        tables.trials.extend(out.rows);
        tables.failures.extend(out.failures);
        diagnostics.extend(out.diagnostics);
    }
    tables.diagnostics = diagnostics.into_iter().collect();

    let total = cfg.trials * cfg.montages.len() * cfg.metrics.len() * cfg.bands.len();
    let failed = tables.failures.len();
    if failed as f64 > MAX_FAILED_FRACTION * total as f64 {
        return Err(Error::ExperimentFailed { failed, total });
    }

    let band_names: Vec<String> = cfg.bands.iter().map(|b| b.name.clone()).collect();
    sort_rows(&mut tables.trials, &band_names);
    tables.correlations = correlate_cells(&tables.trials);
    Ok(tables)
}

fn run_trial(cfg: &ExperimentConfig, library: &SourceLibrary, leadfields: &[LeadField], t: usize) -> TrialOutput {
    let mut out = TrialOutput {
        rows: Vec::new(),
        failures: Vec::new(),
        diagnostics: Vec::new(),
    };
    let sources = match assemble_source_activity(
        library,
        cfg.n_sources,
        cfg.n_active,
        cfg.noise_sigma,
        cfg.n_samples,
        trial_seed(cfg.master_seed, t),
    ) {
        Ok(s) => s,
        Err(e) => {
            for &m in &cfg.montages {
                fail_all(cfg, &mut out, m, t, &e);
            }
            return out;
        }
    };
    for (lf, &montage) in leadfields.iter().zip(&cfg.montages) {
        match project_to_scalp(lf, &sources) {
            Ok(rec) => run_montage(cfg, &rec, montage, t, &mut out),
            Err(e) => fail_all(cfg, &mut out, montage, t, &e),
        }
    }
    out
}

fn fail_all(cfg: &ExperimentConfig, out: &mut TrialOutput, montage: usize, t: usize, e: &Error) {
    for &metric in &cfg.metrics {
        for band in &cfg.bands {
            out.failures
                .push((format!("montage={montage} metric={metric} band={} trial={t}", band.name), e.to_string()));
        }
    }
}

fn run_montage(cfg: &ExperimentConfig, rec: &MultichannelRecord, montage: usize, t: usize, out: &mut TrialOutput) {
    let coh = if cfg.metrics.iter().any(|m| m.is_spectral()) {
        Some(bartlett_cross_spectrum(rec, cfg.segment_samples).and_then(|cs| {
            if cs.is_under_averaged() {
                out.diagnostics.push(format!(
                    "cross-spectra averaged over {} segments (fewer than {RECOMMENDED_MIN_SEGMENTS})",
                    cs.n_segments
                ));
            }
            coherency(&cs)
        }))
    } else {
        None
    };
    for band in &cfg.bands {
        let analytic = if cfg.metrics.iter().any(|m| !m.is_spectral()) {
            Some(bandpass_analytic(rec, band))
        } else {
            None
        };
        for &metric in &cfg.metrics {
            let cell = format!("montage={montage} metric={metric} band={} trial={t}", band.name);
            let result = (|| {
                let inputs = MetricInputs {
                    coherency: match (&coh, metric.is_spectral()) {
                        (Some(Ok(c)), true) => Some(c),
                        (Some(Err(e)), true) => return Err(Error::InvalidInput(e.to_string())),
                        _ => None,
                    },
                    analytic: match (&analytic, metric.is_spectral()) {
                        (Some(Ok(a)), false) => Some(a),
                        (Some(Err(e)), false) => return Err(Error::InvalidInput(e.to_string())),
                        _ => None,
                    },
                    icoh_fold: cfg.icoh_fold,
                };
                let window = cfg.window.for_metric(metric)?;
                let m = compute_metric(metric, band, &window, &inputs)?;
                summarize_matrix(&m, cfg.n_bins)
            })();
            match result {
                Ok(s) => out.rows.push(TrialRow {
                    montage,
                    metric,
                    band: band.name.clone(),
                    trial: t,
                    subject: None,
                    mcw: s.mcw,
                    skewness: s.skewness,
                    kurtosis: s.kurtosis,
                    entropy: s.entropy,
                    n_pairs: s.n_pairs,
                }),
                Err(e) => out.failures.push((cell, e.to_string())),
            }
        }
    }
}
