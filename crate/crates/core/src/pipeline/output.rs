//! Result tables and their on-disk layout.
//!
//! `write_results` produces, inside the output directory:
//!
//! - `trials.csv`: one row per (montage, metric, band, trial)
//! - `correlations.csv`: MCW against skewness, kurtosis and entropy per
//!   (montage, metric, band)
//! - `summary.json`: configuration echo plus per-combination aggregates
//! - `scatter/<montage>_<metric>_<band>_<y>.csv`: `mcw,<y>` pairs for
//!   plotting, `y` in {skewness, kurtosis, entropy}
//!
//! Missing statistics are written as empty fields.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::connectivity::Metric;
use crate::error::{Error, Result};
use crate::inference::{pearson_correlation, significance_stars};
use crate::matrix_io::{fmt_f64, write_json};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    /// Channel count of the montage.
    pub montage: usize,
    pub metric: Metric,
    pub band: String,
    /// Trial index, or subject index in normative mode.
    pub trial: usize,
    /// Input file stem in normative mode.
    pub subject: Option<String>,
    pub mcw: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    pub entropy: f64,
    pub n_pairs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatPair {
    McwSkewness,
    McwKurtosis,
    McwEntropy,
}

impl StatPair {
    pub const ALL: [StatPair; 3] = [StatPair::McwSkewness, StatPair::McwKurtosis, StatPair::McwEntropy];

    pub fn label(self) -> &'static str {
        match self {
            StatPair::McwSkewness => "mcw_skewness",
            StatPair::McwKurtosis => "mcw_kurtosis",
            StatPair::McwEntropy => "mcw_entropy",
        }
    }

    fn y_name(self) -> &'static str {
        &self.label()[4..]
    }

    fn y(self, row: &TrialRow) -> Option<f64> {
        match self {
            StatPair::McwSkewness => row.skewness,
            StatPair::McwKurtosis => row.kurtosis,
            StatPair::McwEntropy => Some(row.entropy),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub montage: usize,
    pub metric: Metric,
    pub band: String,
    pub pair: StatPair,
    /// `None` when the correlation is undefined (constant series, < 3 points).
    pub r: Option<f64>,
    pub p: Option<f64>,
    pub n: usize,
    pub stars: String,
}

/// Cells keyed by (montage, metric, band) in first-seen order of bands.
pub type CellKey = (usize, Metric, String);

/// Groups rows by cell, keeping the rows' existing order inside each cell.
pub fn group_cells(rows: &[TrialRow]) -> Vec<(CellKey, Vec<&TrialRow>)> {
    let mut band_order: Vec<&str> = Vec::new();
    for r in rows {
        if !band_order.contains(&r.band.as_str()) {
            band_order.push(&r.band);
        }
    }
    let mut cells: BTreeMap<(usize, Metric, usize), Vec<&TrialRow>> = BTreeMap::new();
    for r in rows {
        let b = band_order.iter().position(|b| *b == r.band).expect("collected");
        cells.entry((r.montage, r.metric, b)).or_default().push(r);
    }
    cells
        .into_iter()
        .map(|((m, metric, b), v)| ((m, metric, band_order[b].to_string()), v))
        .collect()
}

/// Pearson correlations of MCW with each statistic for every cell.
pub fn correlate_cells(rows: &[TrialRow]) -> Vec<CorrelationRow> {
    let mut out = Vec::new();
    for ((montage, metric, band), cell) in group_cells(rows) {
        for pair in StatPair::ALL {
            let (x, y): (Vec<f64>, Vec<f64>) = cell
                .iter()
                .filter_map(|r| pair.y(r).map(|y| (r.mcw, y)))
                .unzip();
            let n = x.len();
            let (r, p) = match pearson_correlation(&x, &y) {
                Ok(c) => (Some(c.r), Some(c.p)),
                Err(_) => (None, None),
            };
            out.push(CorrelationRow {
                montage,
                metric,
                band: band.clone(),
                pair,
                r,
                p,
                n,
                stars: p.map(significance_stars).unwrap_or("").to_string(),
            });
        }
    }
    out
}

/// Canonical (montage, metric, band, trial) order, with `bands` giving the
/// band order.
pub fn sort_rows(rows: &mut [TrialRow], bands: &[String]) {
    let band_pos = |b: &str| bands.iter().position(|x| x == b).unwrap_or(usize::MAX);
    rows.sort_by(|a, b| {
        (a.montage, a.metric, band_pos(&a.band), a.trial)
            .cmp(&(b.montage, b.metric, band_pos(&b.band), b.trial))
            .then_with(|| a.band.cmp(&b.band))
    });
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn write_trials_csv(path: &Path, rows: &[TrialRow]) -> Result<()> {
    let mut out = create(path)?;
    let io_err = |e| Error::io(path, e);
    writeln!(out, "montage,metric,band,trial,subject,mcw,skewness,kurtosis,entropy,n_pairs").map_err(io_err)?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.montage,
            r.metric,
            r.band,
            r.trial,
            r.subject.as_deref().unwrap_or(""),
            fmt_f64(r.mcw),
            opt(r.skewness),
            opt(r.kurtosis),
            fmt_f64(r.entropy),
            r.n_pairs
        )
        .map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

pub fn write_correlations_csv(path: &Path, rows: &[CorrelationRow]) -> Result<()> {
    let mut out = create(path)?;
    let io_err = |e| Error::io(path, e);
    writeln!(out, "montage,metric,band,pair,r,p,n,stars").map_err(io_err)?;
    for c in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            c.montage,
            c.metric,
            c.band,
            c.pair.label(),
            opt(c.r),
            opt(c.p),
            c.n,
            c.stars
        )
        .map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// Reads back a `trials.csv` written by [`write_trials_csv`].
pub fn read_trials_csv(path: &Path) -> Result<Vec<TrialRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::parse(path, e.to_string()))?;
    let mut rows = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::parse(path, e.to_string()))?;
        let bad = |what: &str| Error::parse(path, format!("line {}: bad {what}", line + 2));
        let num = |k: usize, what: &str| rec[k].parse::<f64>().map_err(|_| bad(what));
        let opt_num = |k: usize, what: &str| -> Result<Option<f64>> {
            if rec[k].is_empty() {
                Ok(None)
            } else {
                num(k, what).map(Some)
            }
        };
        rows.push(TrialRow {
            montage: rec[0].parse().map_err(|_| bad("montage"))?,
            metric: rec[1].parse().map_err(|_| bad("metric"))?,
            band: rec[2].to_string(),
            trial: rec[3].parse().map_err(|_| bad("trial"))?,
            subject: (!rec[4].is_empty()).then(|| rec[4].to_string()),
            mcw: num(5, "mcw")?,
            skewness: opt_num(6, "skewness")?,
            kurtosis: opt_num(7, "kurtosis")?,
            entropy: num(8, "entropy")?,
            n_pairs: rec[9].parse().map_err(|_| bad("n_pairs"))?,
        });
    }
    Ok(rows)
}

#[derive(Debug, Serialize)]
struct Aggregate {
    montage: usize,
    metric: Metric,
    band: String,
    rows: usize,
    mcw: Stat,
    skewness: Stat,
    kurtosis: Stat,
    entropy: Stat,
}

#[derive(Debug, Serialize)]
struct Stat {
    n: usize,
    mean: Option<f64>,
    median: Option<f64>,
    min: Option<f64>,
    max: Option<f64>,
}

impl Stat {
    fn of(values: impl Iterator<Item = Option<f64>>) -> Self {
        let mut v: Vec<f64> = values.flatten().collect();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n == 0 {
            return Self { n, mean: None, median: None, min: None, max: None };
        }
        let median = if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        };
        Self {
            n,
            mean: Some(v.iter().sum::<f64>() / n as f64),
            median: Some(median),
            min: Some(v[0]),
            max: Some(v[n - 1]),
        }
    }
}

/// Everything a run produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTables {
    pub trials: Vec<TrialRow>,
    pub correlations: Vec<CorrelationRow>,
    /// Cells that failed, as `(cell description, error message)`.
    pub failures: Vec<(String, String)>,
    pub diagnostics: Vec<String>,
}

/// Writes the full result set; returns the paths written.
pub fn write_results(
    tables: &ResultTables,
    out_dir: &Path,
    config: &serde_json::Value,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();

    let trials = out_dir.join("trials.csv");
    write_trials_csv(&trials, &tables.trials)?;
    written.push(trials);

    let corr = out_dir.join("correlations.csv");
    write_correlations_csv(&corr, &tables.correlations)?;
    written.push(corr);

    let cells = group_cells(&tables.trials);
    if !cells.is_empty() {
        let scatter_dir = out_dir.join("scatter");
        std::fs::create_dir_all(&scatter_dir).map_err(|e| Error::io(&scatter_dir, e))?;
        for ((montage, metric, band), rows) in &cells {
            for pair in StatPair::ALL {
                let y = pair.y_name();
                let path = scatter_dir.join(format!("{montage}_{metric}_{band}_{y}.csv"));
                let mut out = create(&path)?;
                let io_err = |e| Error::io(&path, e);
                writeln!(out, "mcw,{y}").map_err(io_err)?;
                for r in rows {
                    if let Some(v) = pair.y(r) {
                        writeln!(out, "{},{}", fmt_f64(r.mcw), fmt_f64(v)).map_err(io_err)?;
                    }
                }
                out.flush().map_err(io_err)?;
                written.push(path);
            }
        }
    }

    let aggregates: Vec<Aggregate> = cells
        .iter()
        .map(|((montage, metric, band), rows)| Aggregate {
            montage: *montage,
            metric: *metric,
            band: band.clone(),
            rows: rows.len(),
            mcw: Stat::of(rows.iter().map(|r| Some(r.mcw))),
            skewness: Stat::of(rows.iter().map(|r| r.skewness)),
            kurtosis: Stat::of(rows.iter().map(|r| r.kurtosis)),
            entropy: Stat::of(rows.iter().map(|r| Some(r.entropy))),
        })
        .collect();
    let summary = serde_json::json!({
        "config": config,
        "n_trial_rows": tables.trials.len(),
        "n_correlation_rows": tables.correlations.len(),
        "combinations": aggregates,
        "failures": tables
            .failures
            .iter()
            .map(|(cell, err)| serde_json::json!({"cell": cell, "error": err}))
            .collect::<Vec<_>>(),
        "diagnostics": tables.diagnostics,
    });
    let summary_path = out_dir.join("summary.json");
    write_json(&summary_path, &summary)?;
    written.push(summary_path);
    Ok(written)
}
