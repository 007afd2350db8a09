//! Coupling metrics and their channel x channel weight matrices.
//!
//! COH and iCOH are read from a coherency matrix averaged over the bins of a
//! band. PLV, PLI and AEC are computed in sliding windows over a band-limited
//! analytic record and averaged across windows.
//!
//! Weight matrices are symmetric and live in `[0, 1]`. iCOH and AEC are
//! signed quantities; their weights are magnitudes and the signed band or
//! window averages are kept in [`ConnectivityMatrix::signed_raw`].

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ndarray::{s, Array2, ArrayView1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix_io::{read_matrix, sidecar_path, write_matrix, MatrixMeta};
use crate::signal_model::MultichannelRecord;
use crate::spectral::{
    band_slice, bandpass_analytic, bartlett_cross_spectrum, coherency, wrap_phase, AnalyticRecord, Band,
    CoherencyMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "COH")]
    Coh,
    #[serde(rename = "iCOH")]
    Icoh,
    #[serde(rename = "PLV")]
    Plv,
    #[serde(rename = "PLI")]
    Pli,
    #[serde(rename = "AEC")]
    Aec,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Coh, Metric::Icoh, Metric::Plv, Metric::Pli, Metric::Aec];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Coh => "COH",
            Metric::Icoh => "iCOH",
            Metric::Plv => "PLV",
            Metric::Pli => "PLI",
            Metric::Aec => "AEC",
        }
    }

    /// Metrics computed from the cross-spectrum rather than analytic signals.
    pub fn is_spectral(self) -> bool {
        matches!(self, Metric::Coh | Metric::Icoh)
    }

    /// Window layout used for this metric by default: no overlap for PLV,
    /// 0.5 s overlap for PLI and AEC.
    pub fn default_window(self) -> WindowConfig {
        match self {
            Metric::Plv => WindowConfig::new(6.0, 0.0).expect("valid"),
            _ => WindowConfig::new(6.0, 0.5).expect("valid"),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidInput(format!("unknown metric `{s}`")))
    }
}

/// Sliding-window layout in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub window_seconds: f64,
    pub overlap_seconds: f64,
}

impl WindowConfig {
    pub fn new(window_seconds: f64, overlap_seconds: f64) -> Result<Self> {
        if !(window_seconds > 0.0 && overlap_seconds >= 0.0 && overlap_seconds < window_seconds) {
            return Err(Error::InvalidInput(format!(
                "window {window_seconds} s with overlap {overlap_seconds} s (need 0 <= overlap < window)"
            )));
        }
        Ok(Self {
            window_seconds,
            overlap_seconds,
        })
    }

    pub fn window_samples(&self, fs: f64) -> usize {
        (self.window_seconds * fs).round().max(1.0) as usize
    }

    pub fn step_samples(&self, fs: f64) -> usize {
        let w = self.window_samples(fs);
        let overlap = (self.overlap_seconds * fs).round() as usize;
        w.saturating_sub(overlap).max(1)
    }

    /// `floor((n - window) / step) + 1`, or 0 when one window does not fit.
    pub fn n_windows(&self, n_samples: usize, fs: f64) -> usize {
        let w = self.window_samples(fs);
        if n_samples < w {
            0
        } else {
            (n_samples - w) / self.step_samples(fs) + 1
        }
    }

    /// Sample ranges `[start, end)` of all windows.
    pub fn windows(&self, n_samples: usize, fs: f64) -> Vec<(usize, usize)> {
        let (w, step) = (self.window_samples(fs), self.step_samples(fs));
        (0..self.n_windows(n_samples, fs))
            .map(|k| (k * step, k * step + w))
            .collect()
    }
}

/// How iCOH is collapsed over a band.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IcohFold {
    /// `|mean_f Im C(f)|`
    #[default]
    SignedMean,
    /// `mean_f |Im C(f)|`
    MeanMagnitude,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityMatrix {
    pub metric: Metric,
    pub band: Band,
    pub weights: Array2<f64>,
    pub signed_raw: Option<Array2<f64>>,
    pub labels: Vec<String>,
}

impl ConnectivityMatrix {
    pub fn n_channels(&self) -> usize {
        self.weights.nrows()
    }

    /// Largest `|w_ij - w_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n_channels();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.weights[[i, j]] - self.weights[[j, i]]).abs());
            }
        }
        worst
    }

    /// Writes the weight matrix with a `{metric, band, montage}` sidecar. The
    /// band is stored as `name:lo:hi`.
    pub fn write(&self, path: &Path, montage: Option<&str>) -> Result<()> {
        let meta = MatrixMeta {
            kind: "connectivity".into(),
            labels: self.labels.clone(),
            montage: montage.map(str::to_owned),
            metric: Some(self.metric.name().into()),
            band: Some(format!("{}:{}:{}", self.band.name, self.band.lo, self.band.hi)),
            ..MatrixMeta::default()
        };
        write_matrix(path, &self.weights, &meta)
    }

    /// Reads a matrix written by [`ConnectivityMatrix::write`]; `signed_raw`
    /// is not stored and comes back as `None`.
    pub fn read(path: &Path) -> Result<Self> {
        let (weights, meta) = read_matrix(path)?;
        let field = |v: Option<String>, name: &str| {
            v.ok_or_else(|| Error::parse(sidecar_path(path), format!("sidecar lacks `{name}`")))
        };
        let metric: Metric = field(meta.metric, "metric")?
            .parse()
            .map_err(|e: Error| Error::parse(sidecar_path(path), e.to_string()))?;
        let band = Band::parse(&field(meta.band, "band")?)
            .map_err(|e| Error::parse(sidecar_path(path), e.to_string()))?;
        let n = weights.nrows();
        if weights.ncols() != n || meta.labels.len() != n {
            return Err(Error::parse(
                path,
                format!("{}x{} weights with {} labels", n, weights.ncols(), meta.labels.len()),
            ));
        }
        Ok(Self {
            metric,
            band,
            weights,
            signed_raw: None,
            labels: meta.labels,
        })
    }
}

/// Magnitude-squared coherence averaged over the band's bins.
pub fn coherence_matrix(c: &CoherencyMatrix, band: &Band) -> Result<ConnectivityMatrix> {
    let bins = band_slice(&c.freqs, band)?;
    let n = c.labels.len();
    let nb = bins.len() as f64;
    let mut weights = Array2::<f64>::eye(n);
    for i in 0..n {
        for j in i + 1..n {
            let v = bins.iter().map(|&k| c.mats[k][[i, j]].norm_sqr()).sum::<f64>() / nb;
            weights[[i, j]] = v;
            weights[[j, i]] = v;
        }
    }
    Ok(ConnectivityMatrix {
        metric: Metric::Coh,
        band: band.clone(),
        weights,
        signed_raw: None,
        labels: c.labels.clone(),
    })
}

/// Imaginary part of coherency collapsed over the band, folded to magnitude.
pub fn icoh_matrix(c: &CoherencyMatrix, band: &Band, fold: IcohFold) -> Result<ConnectivityMatrix> {
    let bins = band_slice(&c.freqs, band)?;
    let n = c.labels.len();
    let nb = bins.len() as f64;
    let mut weights = Array2::<f64>::zeros((n, n));
    let mut signed = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in i + 1..n {
            let mean = bins.iter().map(|&k| c.mats[k][[i, j]].im).sum::<f64>() / nb;
            let w = match fold {
                IcohFold::SignedMean => mean.abs(),
                IcohFold::MeanMagnitude => {
                    bins.iter().map(|&k| c.mats[k][[i, j]].im.abs()).sum::<f64>() / nb
                }
            };
            signed[[i, j]] = mean;
            signed[[j, i]] = -mean;
            weights[[i, j]] = w.min(1.0);
            weights[[j, i]] = w.min(1.0);
        }
    }
    Ok(ConnectivityMatrix {
        metric: Metric::Icoh,
        band: band.clone(),
        weights,
        signed_raw: Some(signed),
        labels: c.labels.clone(),
    })
}

fn check_windows(a: &AnalyticRecord, w: &WindowConfig) -> Result<Vec<(usize, usize)>> {
    let windows = w.windows(a.n_samples(), a.fs);
    if windows.is_empty() {
        return Err(Error::TooShort {
            n_samples: a.n_samples(),
            window_samples: w.window_samples(a.fs),
        });
    }
    Ok(windows)
}

/// Evaluates `pair(i, j)` for every `i < j` in parallel and fills a symmetric
/// matrix with `diagonal` on the diagonal.
fn pairwise<F>(n: usize, diagonal: f64, pair: F) -> Result<(Array2<f64>, Array2<f64>)>
where
    F: Fn(usize, usize) -> Result<(f64, f64)> + Sync,
{
    let rows: Vec<Vec<(f64, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| (i + 1..n).map(|j| pair(i, j)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let mut weights = Array2::<f64>::from_elem((n, n), 0.0);
    let mut raw = Array2::<f64>::from_elem((n, n), 0.0);
    for i in 0..n {
        weights[[i, i]] = diagonal;
        raw[[i, i]] = diagonal;
        for (k, &(w, r)) in rows[i].iter().enumerate() {
            let j = i + 1 + k;
            weights[[i, j]] = w;
            weights[[j, i]] = w;
            raw[[i, j]] = r;
            raw[[j, i]] = r;
        }
    }
    Ok((weights, raw))
}

/// Phase-locking value, averaged over windows.
pub fn plv_matrix(a: &AnalyticRecord, w: &WindowConfig) -> Result<ConnectivityMatrix> {
    let windows = check_windows(a, w)?;
    let cos = a.phase.mapv(f64::cos);
    let sin = a.phase.mapv(f64::sin);
    let (weights, _) = pairwise(a.n_channels(), 1.0, |i, j| {
        let total: f64 = windows
            .iter()
            .map(|&(lo, hi)| {
                let (mut re, mut im) = (0.0, 0.0);
                for t in lo..hi {
                    // exp(i(phi_i - phi_j))
                    re += cos[[i, t]] * cos[[j, t]] + sin[[i, t]] * sin[[j, t]];
                    im += sin[[i, t]] * cos[[j, t]] - cos[[i, t]] * sin[[j, t]];
                }
                (re * re + im * im).sqrt() / (hi - lo) as f64
            })
            .sum();
        let v = (total / windows.len() as f64).min(1.0);
        Ok((v, v))
    })?;
    Ok(ConnectivityMatrix {
        metric: Metric::Plv,
        band: a.band.clone(),
        weights,
        signed_raw: None,
        labels: a.labels.clone(),
    })
}

/// Phase-lag index, averaged over windows.
pub fn pli_matrix(a: &AnalyticRecord, w: &WindowConfig) -> Result<ConnectivityMatrix> {
    let windows = check_windows(a, w)?;
    let (weights, _) = pairwise(a.n_channels(), 0.0, |i, j| {
        let pi = a.phase.row(i);
        let pj = a.phase.row(j);
        let total: f64 = windows
            .iter()
            .map(|&(lo, hi)| {
                let s: f64 = (lo..hi).map(|t| sign(wrap_phase(pi[t] - pj[t]))).sum();
                s.abs() / (hi - lo) as f64
            })
            .sum();
        let v = total / windows.len() as f64;
        Ok((v, v))
    })?;
    Ok(ConnectivityMatrix {
        metric: Metric::Pli,
        band: a.band.clone(),
        weights,
        signed_raw: None,
        labels: a.labels.clone(),
    })
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Amplitude-envelope correlation, averaged over windows. Windows in which
/// either envelope is constant are skipped for that pair.
pub fn aec_matrix(a: &AnalyticRecord, w: &WindowConfig) -> Result<ConnectivityMatrix> {
    let windows = check_windows(a, w)?;
    let n = a.n_channels();
    // per channel, per window: centred samples and their norm (None if constant)
    let centred: Vec<Vec<Option<(Vec<f64>, f64)>>> = (0..n)
        .into_par_iter()
        .map(|ch| {
            windows
                .iter()
                .map(|&(lo, hi)| centre(a.envelope.slice(s![ch, lo..hi])))
                .collect()
        })
        .collect();
    let (weights, signed) = pairwise(n, 1.0, |i, j| {
        let mut total = 0.0;
        let mut used = 0usize;
        for k in 0..windows.len() {
            if let (Some((xi, ni)), Some((xj, nj))) = (&centred[i][k], &centred[j][k]) {
                let dot: f64 = xi.iter().zip(xj).map(|(p, q)| p * q).sum();
                total += (dot / (ni * nj)).clamp(-1.0, 1.0);
                used += 1;
            }
        }
        if used == 0 {
            return Err(Error::DegenerateEnvelope(i, j));
        }
        let r = total / used as f64;
        Ok((r.abs(), r))
    })?;
    Ok(ConnectivityMatrix {
        metric: Metric::Aec,
        band: a.band.clone(),
        weights,
        signed_raw: Some(signed),
        labels: a.labels.clone(),
    })
}

fn centre(x: ArrayView1<f64>) -> Option<(Vec<f64>, f64)> {
    let (min, max) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if min == max {
        return None;
    }
    let mean = x.sum() / x.len() as f64;
    let c: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    (norm > 0.0).then_some((c, norm))
}

/// Inputs needed to evaluate any metric for one record and band.
pub struct MetricInputs<'a> {
    pub coherency: Option<&'a CoherencyMatrix>,
    pub analytic: Option<&'a AnalyticRecord>,
    pub icoh_fold: IcohFold,
}

/// Dispatches to the metric's constructor. `window` is ignored for the
/// spectral metrics.
pub fn compute_metric(
    metric: Metric,
    band: &Band,
    window: &WindowConfig,
    inputs: &MetricInputs<'_>,
) -> Result<ConnectivityMatrix> {
    let missing = |what: &str| Error::InvalidInput(format!("{metric} needs {what}"));
    match metric {
        Metric::Coh => coherence_matrix(inputs.coherency.ok_or_else(|| missing("a coherency matrix"))?, band),
        Metric::Icoh => icoh_matrix(
            inputs.coherency.ok_or_else(|| missing("a coherency matrix"))?,
            band,
            inputs.icoh_fold,
        ),
        Metric::Plv => plv_matrix(inputs.analytic.ok_or_else(|| missing("an analytic record"))?, window),
        Metric::Pli => pli_matrix(inputs.analytic.ok_or_else(|| missing("an analytic record"))?, window),
        Metric::Aec => aec_matrix(inputs.analytic.ok_or_else(|| missing("an analytic record"))?, window),
    }
}

/// Every metric in `metrics` for one record and band, each with its
/// [`Metric::default_window`]. The cross-spectrum and the analytic signal
/// are each computed once, and only if some metric needs them.
pub fn record_connectivity(
    rec: &MultichannelRecord,
    band: &Band,
    metrics: &[Metric],
    segment_samples: usize,
    icoh_fold: IcohFold,
) -> Result<Vec<ConnectivityMatrix>> {
    let coh = if metrics.iter().any(|m| m.is_spectral()) {
        Some(coherency(&bartlett_cross_spectrum(rec, segment_samples)?)?)
    } else {
        None
    };
    let analytic = if metrics.iter().any(|m| !m.is_spectral()) {
        Some(bandpass_analytic(rec, band)?)
    } else {
        None
    };
    let inputs = MetricInputs {
        coherency: coh.as_ref(),
        analytic: analytic.as_ref(),
        icoh_fold,
    };
    metrics
        .iter()
        .map(|&m| compute_metric(m, band, &m.default_window(), &inputs))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use crate::signal_model::{generate_synthetic_sources, LeadField, SourceActivity};
    use proptest::prelude::{any, prop_assert, proptest, ProptestConfig};
    use rand::Rng;
    use rand_distr::StandardNormal;
    use rustfft::num_complex::Complex64;
    use std::f64::consts::PI;

    const FS: f64 = 200.0;

    fn alpha_record(n_ch: usize, n: usize, s: u64) -> MultichannelRecord {
        let lib = generate_synthetic_sources(n_ch, n, FS, 10.0, s).unwrap();
        MultichannelRecord::unlabeled(lib.data, FS).unwrap()
    }

    fn phases(rows: Vec<Vec<f64>>, fs: f64) -> AnalyticRecord {
        let n = rows[0].len();
        let phase = Array2::from_shape_fn((rows.len(), n), |(i, t)| wrap_phase(rows[i][t]));
        let envelope = Array2::from_elem((rows.len(), n), 1.0);
        AnalyticRecord::new(phase, envelope, fs, Band::alpha()).unwrap()
    }

    fn envelopes(rows: Vec<Vec<f64>>, fs: f64) -> AnalyticRecord {
        let n = rows[0].len();
        let envelope = Array2::from_shape_fn((rows.len(), n), |(i, t)| rows[i][t]);
        AnalyticRecord::new(Array2::zeros((rows.len(), n)), envelope, fs, Band::alpha()).unwrap()
    }

    fn weight(m: &[ConnectivityMatrix], metric: Metric, i: usize, j: usize) -> f64 {
        m.iter().find(|c| c.metric == metric).unwrap().weights[[i, j]]
    }

    #[test]
    fn duplicated_channel_identities() {
        let mut rec = alpha_record(3, 6000, 1);
        let first = rec.data.row(0).to_owned();
        rec.data.row_mut(2).assign(&first);
        let all = record_connectivity(&rec, &Band::alpha(), &Metric::ALL, 512, IcohFold::SignedMean).unwrap();
        for m in [Metric::Coh, Metric::Plv, Metric::Aec] {
            assert!((weight(&all, m, 0, 2) - 1.0).abs() < 1e-9, "{m}");
        }
        for m in [Metric::Icoh, Metric::Pli] {
            assert!(weight(&all, m, 0, 2).abs() < 1e-9, "{m}");
        }
    }

    #[test]
    fn diagonal_conventions() {
        let rec = alpha_record(3, 3000, 2);
        let all = record_connectivity(&rec, &Band::alpha(), &Metric::ALL, 256, IcohFold::SignedMean).unwrap();
        for c in &all {
            let d = if matches!(c.metric, Metric::Icoh | Metric::Pli) { 0.0 } else { 1.0 };
            assert!(c.weights.diag().iter().all(|&v| v == d), "{}", c.metric);
        }
    }

    #[test]
    fn coherence_matches_straight_line_oracle() {
        let mut rng = seed::rng(3);
        let (n_ch, l, k_seg) = (3, 64, 6);
        let x = Array2::from_shape_fn((n_ch, l * k_seg), |_| rng.sample::<f64, _>(StandardNormal));
        let fs = 64.0;
        let band = Band::new("b", 8.0, 13.0).unwrap();
        let rec = MultichannelRecord::unlabeled(x.clone(), fs).unwrap();
        let got = record_connectivity(&rec, &band, &[Metric::Coh, Metric::Icoh], l, IcohFold::SignedMean).unwrap();

        let dft = |ch: usize, seg: usize, k: usize| {
            let s: Vec<f64> = x.row(ch).iter().skip(seg * l).take(l).copied().collect();
            let mean = s.iter().sum::<f64>() / l as f64;
            s.iter().enumerate().fold(Complex64::new(0.0, 0.0), |z, (t, &v)| {
                z + Complex64::from_polar(v - mean, -2.0 * PI * (k * t) as f64 / l as f64)
            })
        };
        let s = |i: usize, j: usize, k: usize| {
            (0..k_seg).fold(Complex64::new(0.0, 0.0), |a, seg| a + dft(i, seg, k) * dft(j, seg, k).conj())
        };
        let bins: Vec<usize> = (8..=13).collect(); // 1 Hz grid
        for i in 0..n_ch {
            for j in i + 1..n_ch {
                let (mut coh, mut im) = (0.0, 0.0);
                for &k in &bins {
                    let c = s(i, j, k) / (s(i, i, k).re * s(j, j, k).re).sqrt();
                    coh += c.norm_sqr();
                    im += c.im;
                }
                coh /= bins.len() as f64;
                im /= bins.len() as f64;
                assert!((got[0].weights[[i, j]] - coh).abs() < 1e-10);
                assert!((got[1].weights[[i, j]] - im.abs()).abs() < 1e-10);
                assert!((got[1].signed_raw.as_ref().unwrap()[[i, j]] - im).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn quadrature_tones_have_unit_imaginary_coherency() {
        let (l, k_seg, fs) = (64, 8, 64.0);
        let f0 = 10.0;
        let n = l * k_seg;
        let mut x = Array2::zeros((2, n));
        for t in 0..n {
            let ph = 2.0 * PI * f0 * t as f64 / fs;
            x[[0, t]] = ph.cos();
            x[[1, t]] = (ph - PI / 2.0).cos();
        }
        let cs = bartlett_cross_spectrum(&MultichannelRecord::unlabeled(x, fs).unwrap(), l).unwrap();
        let k = cs.freqs.iter().position(|&f| f == f0).unwrap();
        let s12 = cs.mats[k][[0, 1]];
        let c12 = s12 / (cs.mats[k][[0, 0]].re * cs.mats[k][[1, 1]].re).sqrt();
        assert!((c12.im - 1.0).abs() < 1e-12, "{c12}");
        assert!(c12.re.abs() < 1e-12);
    }

    #[test]
    fn plv_examples() {
        let n = 1200;
        let mut rng = seed::rng(4);
        let base: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
        let shifted: Vec<f64> = base.iter().map(|p| p + 1.3).collect();
        let a = phases(vec![base.clone(), base.clone(), shifted], FS);
        let m = plv_matrix(&a, &Metric::Plv.default_window()).unwrap();
        assert!((m.weights[[0, 1]] - 1.0).abs() < 1e-12);
        assert!((m.weights[[0, 2]] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plv_of_random_phases_follows_rayleigh() {
        let n = 200;
        let w = WindowConfig::new(n as f64, 0.0).unwrap();
        let mut rng = seed::rng(5);
        let mut total = 0.0;
        for _ in 0..200 {
            let rows = (0..2).map(|_| (0..n).map(|_| rng.random_range(-PI..PI)).collect()).collect();
            total += plv_matrix(&phases(rows, 1.0), &w).unwrap().weights[[0, 1]];
        }
        let mean = total / 200.0;
        let expect = PI.sqrt() / (2.0 * (n as f64).sqrt());
        assert!((mean - expect).abs() < 0.5 * expect, "{mean} vs {expect}");
    }

    #[test]
    fn pli_examples() {
        let n = 2400;
        let mut rng = seed::rng(6);
        let base: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
        let lagging: Vec<f64> = base.iter().map(|p| p - 0.7).collect();
        let alternating: Vec<f64> = base
            .iter()
            .enumerate()
            .map(|(t, p)| if t % 2 == 0 { p + 0.4 } else { p - 0.4 })
            .collect();
        let a = phases(vec![base.clone(), base, lagging, alternating], FS);
        let m = pli_matrix(&a, &Metric::Pli.default_window()).unwrap();
        assert_eq!(m.weights[[0, 1]], 0.0);
        assert!((m.weights[[0, 2]] - 1.0).abs() < 1e-12);
        assert!(m.weights[[0, 3]] < 2.0 / (n as f64).sqrt());
    }

    #[test]
    fn aec_examples() {
        let n = 2400;
        let mut rng = seed::rng(7);
        let e: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        let affine: Vec<f64> = e.iter().map(|v| 2.0 * v + 3.0).collect();
        let a = envelopes(vec![e.clone(), e, affine], FS);
        let m = aec_matrix(&a, &Metric::Aec.default_window()).unwrap();
        assert!((m.weights[[0, 1]] - 1.0).abs() < 1e-12);
        assert!((m.weights[[0, 2]] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn aec_of_independent_envelopes_scales_as_inverse_sqrt_n() {
        let n = 400;
        let w = WindowConfig::new(n as f64, 0.0).unwrap();
        let mut rng = seed::rng(8);
        let mut total = 0.0;
        for _ in 0..200 {
            let rows = (0..2).map(|_| (0..n).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
            total += aec_matrix(&envelopes(rows, 1.0), &w).unwrap().weights[[0, 1]];
        }
        let mean = total / 200.0;
        let scale = 1.0 / (n as f64).sqrt();
        assert!((mean - scale).abs() < 0.5 * scale, "{mean} vs {scale}");
    }

    #[test]
    fn aec_constant_envelope_is_degenerate() {
        let a = envelopes(vec![vec![1.0; 1300], (0..1300).map(|t| t as f64).collect()], FS);
        assert!(matches!(
            aec_matrix(&a, &Metric::Aec.default_window()),
            Err(Error::DegenerateEnvelope(0, 1))
        ));
    }

    #[test]
    fn short_record_is_rejected() {
        let a = phases(vec![vec![0.0; 100], vec![0.0; 100]], FS);
        assert!(matches!(
            plv_matrix(&a, &Metric::Plv.default_window()),
            Err(Error::TooShort { n_samples: 100, window_samples: 1200 })
        ));
    }

    #[test]
    fn window_count_matches_counting_oracle() {
        for (win, overlap, fs, n) in [(6.0, 0.5, 200.0, 10_000), (6.0, 0.0, 200.0, 10_000), (1.0, 0.25, 10.0, 95), (2.0, 1.9, 50.0, 777)] {
            let w = WindowConfig::new(win, overlap).unwrap();
            let (len, step) = (w.window_samples(fs), w.step_samples(fs));
            let mut count = 0;
            let mut start = 0;
            while start + len <= n {
                count += 1;
                start += step;
            }
            assert_eq!(w.n_windows(n, fs), count);
            assert_eq!(w.windows(n, fs).len(), count);
        }
        assert_eq!(Metric::Plv.default_window().n_windows(10_000, 200.0), 8);
        assert_eq!(Metric::Pli.default_window().n_windows(10_000, 200.0), 9);
        assert!(WindowConfig::new(6.0, 6.0).is_err());
    }

    #[test]
    fn zero_lag_mixing_is_invisible_to_lagged_metrics() {
        let src = generate_synthetic_sources(1, 10_000, FS, 10.0, 9).unwrap();
        let gains = Array2::from_shape_vec((4, 1), vec![1.0, 0.7, 0.4, 0.2]).unwrap();
        let labels = (0..4).map(|i| format!("c{i}")).collect();
        let lf = LeadField::new(gains, "rank1", labels).unwrap();
        let rec = crate::signal_model::project_to_scalp(&lf, &SourceActivity::new(src.data, FS, 1).unwrap()).unwrap();
        let all = record_connectivity(&rec, &Band::alpha(), &Metric::ALL, 512, IcohFold::SignedMean).unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(weight(&all, Metric::Icoh, i, j) < 0.05);
                assert!(weight(&all, Metric::Pli, i, j) < 0.05);
                assert!(weight(&all, Metric::Coh, i, j) > 0.9);
                assert!(weight(&all, Metric::Plv, i, j) > 0.9);
            }
        }
    }

    #[test]
    fn metric_names() {
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.name()));
        }
        assert_eq!("icoh".parse::<Metric>().unwrap(), Metric::Icoh);
        assert!("wpli".parse::<Metric>().is_err());
    }

    #[test]
    fn matrix_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rec = alpha_record(3, 3000, 10);
        let m = record_connectivity(&rec, &Band::alpha(), &[Metric::Pli], 256, IcohFold::SignedMean)
            .unwrap()
            .remove(0);
        let path = dir.path().join("pli.csv");
        m.write(&path, Some("std19")).unwrap();
        let back = ConnectivityMatrix::read(&path).unwrap();
        assert_eq!(back, m);
        let meta: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(sidecar_path(&path)).unwrap()).unwrap();
        assert_eq!(meta["metric"], "PLI");
        assert_eq!(meta["band"], "alpha:8:13");
        assert_eq!(meta["montage"], "std19");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn weights_are_symmetric_and_bounded(s in any::<u64>(), n_ch in 2usize..5) {
            let rec = alpha_record(n_ch, 2600, s);
            let all = record_connectivity(&rec, &Band::alpha(), &Metric::ALL, 256, IcohFold::SignedMean).unwrap();
            for c in &all {
                prop_assert!(c.asymmetry() == 0.0);
                prop_assert!(c.weights.iter().all(|&w| (0.0..=1.0).contains(&w)));
            }
        }

        #[test]
        fn weights_ignore_channel_scale(s in any::<u64>(), c in 0.05f64..20.0) {
            let rec = alpha_record(3, 2600, s);
            let mut scaled = rec.clone();
            scaled.data.row_mut(1).mapv_inplace(|v| v * c);
            let a = record_connectivity(&rec, &Band::alpha(), &Metric::ALL, 256, IcohFold::SignedMean).unwrap();
            let b = record_connectivity(&scaled, &Band::alpha(), &Metric::ALL, 256, IcohFold::SignedMean).unwrap();
            for (x, y) in a.iter().zip(&b) {
                for (u, v) in x.weights.iter().zip(y.weights.iter()) {
                    prop_assert!((u - v).abs() < 1e-9, "{} {} {}", x.metric, u, v);
                }
            }
        }
    }
}
