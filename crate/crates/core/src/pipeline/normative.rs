//! COH / iCOH analysis of stored cross-spectra.
//!
//! Each input file is one subject (one scatter point per band and metric).
//! Files that fail to parse or normalize are skipped and reported in
//! [`ResultTables::failures`].

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::output::{correlate_cells, sort_rows, ResultTables, TrialRow};
use crate::connectivity::{coherence_matrix, icoh_matrix, IcohFold, Metric};
use crate::distribution::summarize_matrix;
use crate::error::{Error, Result};
use crate::spectral::{coherency, read_cross_spectrum, Band, CrossSpectrum};

/// Expands a glob pattern into a sorted file list.
pub fn expand_inputs(pattern: &str) -> Result<Vec<PathBuf>> {
    let paths = glob::glob(pattern).map_err(|e| Error::InvalidConfig(format!("bad glob `{pattern}`: {e}")))?;
    let mut files: Vec<PathBuf> = paths
        .filter_map(|p| p.ok())
        .filter(|p| p.is_file() && !p.to_string_lossy().ends_with(".meta.json"))
        .collect();
    files.sort();
    Ok(files)
}

/// TrialRows for one in-memory cross-spectrum.
pub fn analyze_cross_spectrum(
    cs: &CrossSpectrum,
    bands: &[Band],
    n_bins: usize,
    icoh_fold: IcohFold,
    subject_index: usize,
    subject: &str,
) -> Result<Vec<TrialRow>> {
    let c = coherency(cs)?;
    let mut rows = Vec::with_capacity(2 * bands.len());
    for band in bands {
        for metric in [Metric::Coh, Metric::Icoh] {
            let m = match metric {
                Metric::Coh => coherence_matrix(&c, band)?,
                _ => icoh_matrix(&c, band, icoh_fold)?,
            };
            let s = summarize_matrix(&m, n_bins)?;
            rows.push(TrialRow {
                montage: cs.n_channels(),
                metric,
                band: band.name.clone(),
                trial: subject_index,
                subject: Some(subject.to_string()),
                mcw: s.mcw,
                skewness: s.skewness,
                kurtosis: s.kurtosis,
                entropy: s.entropy,
                n_pairs: s.n_pairs,
            });
        }
    }
    Ok(rows)
}

fn subject_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn run_normative_analysis(
    inputs: &[PathBuf],
    bands: &[Band],
    n_bins: usize,
    icoh_fold: IcohFold,
) -> Result<ResultTables> {
    if bands.is_empty() {
        return Err(Error::InvalidConfig("no bands given".into()));
    }
    let results: Vec<(PathBuf, Result<Vec<TrialRow>>)> = inputs
        .par_iter()
        .enumerate()
        .map(|(k, path)| {
            let rows = read_cross_spectrum(path)
                .and_then(|cs| analyze_cross_spectrum(&cs, bands, n_bins, icoh_fold, k, &subject_name(path)));
            (path.clone(), rows)
        })
        .collect();

    let mut tables = ResultTables::default();
    for (path, r) in results {
        match r {
            Ok(rows) => tables.trials.extend(rows),
            Err(e) => {
                tables
                    .diagnostics
                    .push(format!("skipped {}: {e}", path.display()));
                tables.failures.push((path.display().to_string(), e.to_string()));
            }
        }
    }
    if tables.trials.is_empty() {
        return Err(Error::NoData);
    }
    let band_names: Vec<String> = bands.iter().map(|b| b.name.clone()).collect();
    sort_rows(&mut tables.trials, &band_names);
    tables.correlations = correlate_cells(&tables.trials);
    Ok(tables)
}
