//! Cortical source activity and its projection onto the scalp.
//!
//! A [`SourceActivity`] holds one row per dipole; a [`LeadField`] maps those
//! dipoles onto the electrodes of a montage; [`project_to_scalp`] is the
//! linear forward model `V = G X`.
//!
//! Active rows are drawn from a [`SourceLibrary`] (real recordings loaded from
//! disk, or [`generate_synthetic_sources`]); the remaining dipoles carry
//! low-amplitude white Gaussian noise.

use std::path::Path;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::matrix_io::{self, MatrixMeta};
use crate::montage::Montage;
use crate::seed;

/// Regularizer of the inverse-square gain surrogate.
pub const LEADFIELD_EPSILON: f64 = 0.1;

/// Knee of the `1/(f + knee)` background spectrum of synthetic sources, Hz.
const BACKGROUND_KNEE_HZ: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SourceActivity {
    pub data: Array2<f64>,
    pub fs: f64,
    pub n_active: usize,
}

impl SourceActivity {
    pub fn new(data: Array2<f64>, fs: f64, n_active: usize) -> Result<Self> {
        check_fs(fs)?;
        check_nonempty_finite(&data, "source activity")?;
        if n_active > data.nrows() {
            return Err(Error::InvalidInput(format!(
                "{n_active} active sources exceed {} rows",
                data.nrows()
            )));
        }
        Ok(Self { data, fs, n_active })
    }

    pub fn n_sources(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.data.ncols()
    }
}

/// Pool of candidate active-source time series.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceLibrary {
    pub data: Array2<f64>,
    pub fs: f64,
    pub origin: String,
}

impl SourceLibrary {
    pub fn new(data: Array2<f64>, fs: f64, origin: impl Into<String>) -> Result<Self> {
        check_fs(fs)?;
        check_nonempty_finite(&data, "source library")?;
        Ok(Self {
            data,
            fs,
            origin: origin.into(),
        })
    }

    pub fn n_library(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.data.ncols()
    }

    /// Removes each row's mean and scales it to unit variance. Constant rows
    /// become all-zero.
    pub fn normalize_rows(&mut self) {
        for mut row in self.data.rows_mut() {
            let n = row.len() as f64;
            let mean = row.sum() / n;
            let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let scale = if var > 0.0 { 1.0 / var.sqrt() } else { 0.0 };
            row.mapv_inplace(|v| (v - mean) * scale);
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let (data, meta) = matrix_io::read_matrix(path)?;
        let fs = meta
            .fs
            .ok_or_else(|| Error::parse(matrix_io::sidecar_path(path), "missing `fs`"))?;
        Self::new(data, fs, meta.origin.unwrap_or_else(|| path.display().to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let meta = MatrixMeta {
            kind: "sources".into(),
            fs: Some(self.fs),
            labels: (0..self.n_library()).map(|i| format!("src{i}")).collect(),
            origin: Some(self.origin.clone()),
            ..Default::default()
        };
        matrix_io::write_matrix(path, &self.data, &meta)
    }
}

/// Channels x sources gain matrix bound to a montage.
#[derive(Debug, Clone, PartialEq)]
pub struct LeadField {
    pub gain: Array2<f64>,
    pub montage: String,
    pub labels: Vec<String>,
}

impl LeadField {
    pub fn new(gain: Array2<f64>, montage: impl Into<String>, labels: Vec<String>) -> Result<Self> {
        check_nonempty_finite(&gain, "lead field")?;
        if labels.len() != gain.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "{} channel labels for a {}-row lead field",
                labels.len(),
                gain.nrows()
            )));
        }
        if let Some(c) = gain.rows().into_iter().position(|r| r.iter().all(|&g| g == 0.0)) {
            return Err(Error::InvalidInput(format!(
                "lead field row {c} ({}) is all zeros",
                labels[c]
            )));
        }
        Ok(Self {
            gain,
            montage: montage.into(),
            labels,
        })
    }

    pub fn n_channels(&self) -> usize {
        self.gain.nrows()
    }

    pub fn n_sources(&self) -> usize {
        self.gain.ncols()
    }

    pub fn read(path: &Path) -> Result<Self> {
        let (gain, meta) = matrix_io::read_matrix(path)?;
        let labels = if meta.labels.is_empty() {
            (1..=gain.nrows()).map(|i| format!("ch{i}")).collect()
        } else {
            meta.labels
        };
        let montage = meta
            .montage
            .unwrap_or_else(|| format!("file{}", gain.nrows()));
        Self::new(gain, montage, labels)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let meta = MatrixMeta {
            kind: "leadfield".into(),
            labels: self.labels.clone(),
            montage: Some(self.montage.clone()),
            ..Default::default()
        };
        matrix_io::write_matrix(path, &self.gain, &meta)
    }
}

/// Scalp recording: channels x samples.
#[derive(Debug, Clone, PartialEq)]
pub struct MultichannelRecord {
    pub data: Array2<f64>,
    pub fs: f64,
    pub labels: Vec<String>,
}

impl MultichannelRecord {
    pub fn new(data: Array2<f64>, fs: f64, labels: Vec<String>) -> Result<Self> {
        check_fs(fs)?;
        check_nonempty_finite(&data, "record")?;
        if labels.len() != data.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "{} channel labels for a {}-channel record",
                labels.len(),
                data.nrows()
            )));
        }
        Ok(Self { data, fs, labels })
    }

    /// Record with labels `ch1..chN`.
    pub fn unlabeled(data: Array2<f64>, fs: f64) -> Result<Self> {
        let labels = (1..=data.nrows()).map(|i| format!("ch{i}")).collect();
        Self::new(data, fs, labels)
    }

    pub fn n_channels(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.data.ncols()
    }

    pub fn read(path: &Path) -> Result<Self> {
        let (data, meta) = matrix_io::read_matrix(path)?;
        let fs = meta
            .fs
            .ok_or_else(|| Error::parse(matrix_io::sidecar_path(path), "missing `fs`"))?;
        if meta.labels.is_empty() {
            Self::unlabeled(data, fs)
        } else {
            Self::new(data, fs, meta.labels)
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let meta = MatrixMeta {
            kind: "record".into(),
            fs: Some(self.fs),
            labels: self.labels.clone(),
            ..Default::default()
        };
        matrix_io::write_matrix(path, &self.data, &meta)
    }
}

/// Builds `n_total` source rows: `n_active` distinct library rows (first
/// `n_samples` samples) plus white Gaussian noise rows with standard deviation
/// `noise_sigma`, in a seed-determined row order.
pub fn assemble_source_activity(
    library: &SourceLibrary,
    n_total: usize,
    n_active: usize,
    noise_sigma: f64,
    n_samples: usize,
    seed: u64,
) -> Result<SourceActivity> {
    if n_total == 0 || n_samples == 0 {
        return Err(Error::EmptyRequest("zero sources or samples"));
    }
    if n_active > n_total {
        return Err(Error::InvalidInput(format!(
            "{n_active} active sources exceed {n_total} total"
        )));
    }
    if n_active > library.n_library() {
        return Err(Error::InsufficientLibrary {
            requested: n_active,
            available: library.n_library(),
        });
    }
    if n_samples > library.n_samples() {
        return Err(Error::InsufficientSamples {
            requested: n_samples,
            available: library.n_samples(),
        });
    }
    if !(noise_sigma > 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "noise sigma must be positive, got {noise_sigma}"
        )));
    }
    let noise = Normal::new(0.0, noise_sigma).expect("validated sigma");

    let mut rng = seed::rng(seed::mix_seed(seed, seed::tag("assemble")));
    let chosen = rand::seq::index::sample(&mut rng, library.n_library(), n_active).into_vec();
    // slot -> logical source: < n_active is a library pick, otherwise noise
    let mut order: Vec<usize> = (0..n_total).collect();
    order.shuffle(&mut rng);

    let mut data = vec![0.0; n_total * n_samples];
    data.par_chunks_mut(n_samples)
        .zip(order.par_iter())
        .for_each(|(row, &logical)| {
            if logical < n_active {
                let src = library.data.row(chosen[logical]);
                for (dst, &v) in row.iter_mut().zip(src.iter()) {
                    *dst = v;
                }
            } else {
                let mut r = seed::rng(seed::derive_seed(seed, &[seed::tag("noise"), logical as u64]));
                for dst in row.iter_mut() {
                    *dst = noise.sample(&mut r);
                }
            }
        });
    let data = Array2::from_shape_vec((n_total, n_samples), data).expect("sized above");
    SourceActivity::new(data, library.fs, n_active)
}

/// Independent unit-variance source rows with a `1/(f + 1 Hz)` background
/// and a resonant component near `alpha_hz`.
///
/// Each row draws its own resonance centre (`alpha_hz` +/- 1 Hz), bandwidth
/// (1 to 3 Hz) and resonance-to-background amplitude ratio (1 to 4,
/// log-uniform), so the pool is spectrally heterogeneous the way recordings
/// from different cortical areas are.
pub fn generate_synthetic_sources(
    n_sources: usize,
    n_samples: usize,
    fs: f64,
    alpha_hz: f64,
    seed: u64,
) -> Result<SourceLibrary> {
    if n_sources == 0 || n_samples == 0 {
        return Err(Error::EmptyRequest("zero sources or samples"));
    }
    check_fs(fs)?;
    let nyquist = fs / 2.0;
    if !(alpha_hz > 0.0 && alpha_hz < nyquist) {
        return Err(Error::BandOutOfRange {
            lo: alpha_hz,
            hi: alpha_hz,
            nyquist,
        });
    }

    let shaping = background_shaping(n_samples, fs);
    let fft = {
        let mut planner = FftPlanner::<f64>::new();
        (planner.plan_fft_forward(n_samples), planner.plan_fft_inverse(n_samples))
    };

    let mut data = vec![0.0; n_sources * n_samples];
    data.par_chunks_mut(n_samples)
        .enumerate()
        .for_each(|(row_idx, row)| {
            let mut rng = seed::rng(seed::derive_seed(seed, &[seed::tag("synthetic"), row_idx as u64]));
            let centre = (alpha_hz + rng.random_range(-1.0..=1.0)).clamp(0.05 * nyquist, 0.95 * nyquist);
            let bandwidth = rng.random_range(1.0..=3.0);
            let ratio = rng.random_range(0.0..=4.0f64.ln()).exp();

            let mut spectrum: Vec<Complex64> = (0..n_samples)
                .map(|_| Complex64::new(rng.sample(StandardNormal), 0.0))
                .collect();
            fft.0.process(&mut spectrum);
            for (bin, gain) in spectrum.iter_mut().zip(shaping.iter()) {
                *bin *= *gain;
            }
            fft.1.process(&mut spectrum);
            let mut background: Vec<f64> = spectrum.iter().map(|c| c.re).collect();
            standardize(&mut background);

            let mut resonance = resonator(&mut rng, n_samples, fs, centre, bandwidth);
            standardize(&mut resonance);

            for ((dst, b), a) in row.iter_mut().zip(&background).zip(&resonance) {
                *dst = b + ratio * a;
            }
            standardize(row);
        });
    let data = Array2::from_shape_vec((n_sources, n_samples), data).expect("sized above");
    SourceLibrary::new(data, fs, format!("synthetic(alpha={alpha_hz}Hz, seed={seed})"))
}

/// Amplitude gain per FFT bin for the `1/(f + knee)` power law; DC removed.
fn background_shaping(n: usize, fs: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                let f = k.min(n - k) as f64 * fs / n as f64;
                1.0 / (f + BACKGROUND_KNEE_HZ).sqrt()
            }
        })
        .collect()
}

/// Second-order autoregressive resonator driven by white noise.
fn resonator<R: Rng>(rng: &mut R, n: usize, fs: f64, centre_hz: f64, bandwidth_hz: f64) -> Vec<f64> {
    let r = (-std::f64::consts::PI * bandwidth_hz / fs).exp();
    let a1 = 2.0 * r * (2.0 * std::f64::consts::PI * centre_hz / fs).cos();
    let a2 = -r * r;
    let burn_in = (4.0 * fs / bandwidth_hz).ceil() as usize;
    let (mut y1, mut y2) = (0.0, 0.0);
    let mut out = Vec::with_capacity(n);
    for t in 0..burn_in + n {
        let e: f64 = rng.sample(StandardNormal);
        let y = a1 * y1 + a2 * y2 + e;
        y2 = y1;
        y1 = y;
        if t >= burn_in {
            out.push(y);
        }
    }
    out
}

fn standardize(x: &mut [f64]) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let scale = if var > 0.0 { 1.0 / var.sqrt() } else { 0.0 };
    x.iter_mut().for_each(|v| *v = (*v - mean) * scale);
}

/// Surrogate gain matrix for a built-in montage label; see
/// [`synthetic_leadfield_for`].
pub fn generate_synthetic_leadfield(montage: &str, n_sources: usize, seed: u64) -> Result<LeadField> {
    synthetic_leadfield_for(&Montage::builtin(montage)?, n_sources, seed)
}

/// Places `n_sources` points uniformly inside the unit ball and sets
/// `gain = 1 / (eps + |electrode - source|^2)`, each row scaled to a maximum
/// of 1. Source positions depend on `seed` only, so different montages built
/// with the same seed share one source space.
pub fn synthetic_leadfield_for(montage: &Montage, n_sources: usize, seed: u64) -> Result<LeadField> {
    if n_sources == 0 {
        return Err(Error::EmptyRequest("zero sources"));
    }
    let sources = source_positions(n_sources, seed);
    let mut gain = Array2::zeros((montage.n_channels(), n_sources));
    for (mut row, e) in gain.rows_mut().into_iter().zip(&montage.positions) {
        for (g, p) in row.iter_mut().zip(&sources) {
            let d2 = (e[0] - p[0]).powi(2) + (e[1] - p[1]).powi(2) + (e[2] - p[2]).powi(2);
            *g = 1.0 / (LEADFIELD_EPSILON + d2);
        }
        let max = row.fold(0.0f64, |m, &g| m.max(g));
        row.mapv_inplace(|g| g / max);
    }
    LeadField::new(gain, montage.name.clone(), montage.labels.clone())
}

/// Uniform points in the unit ball.
pub fn source_positions(n_sources: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = seed::rng(seed::mix_seed(seed, seed::tag("source-space")));
    (0..n_sources)
        .map(|_| loop {
            let p: [f64; 3] = [
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
            ];
            if p[0] * p[0] + p[1] * p[1] + p[2] * p[2] <= 1.0 {
                break p;
            }
        })
        .collect()
}

/// `V = G X`.
pub fn project_to_scalp(lf: &LeadField, src: &SourceActivity) -> Result<MultichannelRecord> {
    if lf.n_sources() != src.n_sources() {
        return Err(Error::ShapeMismatch(format!(
            "lead field has {} sources, activity has {}",
            lf.n_sources(),
            src.n_sources()
        )));
    }
    let data = lf.gain.dot(&src.data);
    MultichannelRecord::new(data, src.fs, lf.labels.clone())
}

fn check_fs(fs: f64) -> Result<()> {
    if fs > 0.0 && fs.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("sampling rate must be positive, got {fs}")))
    }
}

fn check_nonempty_finite(data: &Array2<f64>, what: &str) -> Result<()> {
    if data.nrows() == 0 || data.ncols() == 0 {
        return Err(Error::InvalidInput(format!("{what} is empty")));
    }
    if let Some(((r, c), v)) = data.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "{what} has non-finite value {v} at ({r}, {c})"
        )));
    }
    Ok(())
}
