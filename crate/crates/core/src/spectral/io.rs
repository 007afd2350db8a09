//! Long-format cross-spectrum files.
//!
//! ```text
//! freq_hz,ch_i,ch_j,re,im
//! 1.171875,0,0,12.5,0
//! 1.171875,0,1,3.25,-0.5
//! ...
//! ```
//!
//! `ch_i` and `ch_j` are 0-based indices into the sidecar's `labels`; only
//! `i <= j` is stored and the lower triangle is the conjugate. The sidecar
//! `<stem>.meta.json` holds `{"labels": [...], "n_segments": K}`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::Array2;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CrossSpectrum;
use crate::error::{Error, Result};
use crate::matrix_io::{fmt_f64, read_json, sidecar_path, write_json};

const HEADER: [&str; 5] = ["freq_hz", "ch_i", "ch_j", "re", "im"];

#[derive(Debug, Serialize, Deserialize)]
struct CrossSpectrumMeta {
    labels: Vec<String>,
    n_segments: usize,
}

pub fn write_cross_spectrum(path: &Path, cs: &CrossSpectrum) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io_err = |e| Error::io(path, e);
    writeln!(out, "{}", HEADER.join(",")).map_err(io_err)?;
    let n = cs.n_channels();
    for (f, m) in cs.freqs.iter().zip(&cs.mats) {
        let f = fmt_f64(*f);
        for i in 0..n {
            for j in i..n {
                let z = m[[i, j]];
                writeln!(out, "{f},{i},{j},{},{}", fmt_f64(z.re), fmt_f64(z.im)).map_err(io_err)?;
            }
        }
    }
    out.flush().map_err(io_err)?;
    write_json(
        &sidecar_path(path),
        &CrossSpectrumMeta {
            labels: cs.labels.clone(),
            n_segments: cs.n_segments,
        },
    )
}

pub fn read_cross_spectrum(path: &Path) -> Result<CrossSpectrum> {
    let meta: CrossSpectrumMeta = read_json(&sidecar_path(path))?;
    let n = meta.labels.len();
    if n == 0 {
        return Err(Error::parse(sidecar_path(path), "no channel labels"));
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::parse(path, e.to_string()))?;
    let header = reader
        .headers()
        .map_err(|e| Error::parse(path, e.to_string()))?;
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(Error::parse(
            path,
            format!("header must be `{}`", HEADER.join(",")),
        ));
    }

    let mut freqs: Vec<f64> = Vec::new();
    let mut by_freq: HashMap<u64, usize> = HashMap::new();
    let mut mats: Vec<Array2<Complex64>> = Vec::new();
    let mut seen: Vec<Array2<bool>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let line = line + 2;
        let record = record.map_err(|e| Error::parse(path, e.to_string()))?;
        if record.len() != 5 {
            return Err(Error::parse(path, format!("line {line}: expected 5 fields")));
        }
        let num = |k: usize| -> Result<f64> {
            record[k]
                .parse::<f64>()
                .map_err(|_| Error::parse(path, format!("line {line}: `{}` is not a number", &record[k])))
        };
        let idx = |k: usize| -> Result<usize> {
            record[k]
                .parse::<usize>()
                .ok()
                .filter(|&c| c < n)
                .ok_or_else(|| Error::parse(path, format!("line {line}: bad channel index `{}`", &record[k])))
        };
        let (f, i, j, re, im) = (num(0)?, idx(1)?, idx(2)?, num(3)?, num(4)?);
        if i > j {
            return Err(Error::parse(path, format!("line {line}: ch_i > ch_j")));
        }
        if !(f.is_finite() && re.is_finite() && im.is_finite()) {
            return Err(Error::parse(path, format!("line {line}: non-finite value")));
        }
        let k = match by_freq.get(&f.to_bits()) {
            Some(&k) => k,
            None => {
                if freqs.last().is_some_and(|&last| f <= last) {
                    return Err(Error::parse(
                        path,
                        format!("line {line}: frequency {f} breaks strictly increasing order"),
                    ));
                }
                freqs.push(f);
                mats.push(Array2::zeros((n, n)));
                seen.push(Array2::from_elem((n, n), false));
                by_freq.insert(f.to_bits(), freqs.len() - 1);
                freqs.len() - 1
            }
        };
        if seen[k][[i, j]] {
            return Err(Error::parse(path, format!("line {line}: duplicate entry ({f}, {i}, {j})")));
        }
        seen[k][[i, j]] = true;
        if i == j {
            if re < 0.0 || im.abs() > 1e-9 * re.abs().max(f64::MIN_POSITIVE) {
                return Err(Error::parse(
                    path,
                    format!("line {line}: diagonal entry must be real and non-negative"),
                ));
            }
            mats[k][[i, i]] = Complex64::new(re, 0.0);
        } else {
            mats[k][[i, j]] = Complex64::new(re, im);
            mats[k][[j, i]] = Complex64::new(re, -im);
        }
    }
    if freqs.is_empty() {
        return Err(Error::parse(path, "no data rows"));
    }
    for (k, s) in seen.iter().enumerate() {
        for i in 0..n {
            for j in i..n {
                if !s[[i, j]] {
                    return Err(Error::parse(
                        path,
                        format!("missing entry ({}, {i}, {j})", freqs[k]),
                    ));
                }
            }
        }
    }
    Ok(CrossSpectrum {
        freqs,
        mats,
        n_segments: meta.n_segments,
        labels: meta.labels,
    })
}
