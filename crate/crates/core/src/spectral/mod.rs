//! Spectral estimation.
//!
//! Cross-spectra use Bartlett's method: the record is cut into consecutive
//! non-overlapping segments, each segment is demeaned and transformed without
//! a taper, and the per-segment products `X_i(f) X_j(f)*` are averaged. Power
//! is normalized one-sided (`2 / L^2`), so summing the diagonal over the
//! retained bins approximates the signal variance. DC and Nyquist bins are
//! dropped.
//!
//! Time-domain metrics need instantaneous phase and envelope; those come from
//! [`bandpass_analytic`], a zero-phase band-pass followed by the analytic
//! signal, both done in one pass in the frequency domain.

mod io;

pub use io::{read_cross_spectrum, write_cross_spectrum};

use ndarray::Array2;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal_model::MultichannelRecord;

/// Below this many segments the estimate is flagged as under-averaged.
pub const RECOMMENDED_MIN_SEGMENTS: usize = 20;

/// Segment length giving a 0.390625 Hz grid at 200 Hz.
pub const DEFAULT_SEGMENT_SAMPLES: usize = 512;

/// Prototype order of the band-pass Butterworth magnitude response.
pub const BUTTERWORTH_ORDER: i32 = 4;

/// A named frequency band; both edges inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(name: impl Into<String>, lo: f64, hi: f64) -> Result<Self> {
        let name = name.into();
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "band `{name}` needs 0 < lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { name, lo, hi })
    }

    pub fn alpha() -> Self {
        Self {
            name: "alpha".into(),
            lo: 8.0,
            hi: 13.0,
        }
    }

    /// delta, theta, alpha and beta over the 1.17-19.14 Hz normative grid.
    /// Interior edges (4, 8, 13 Hz) fall between grid points of the
    /// 0.390625 Hz axis, so no bin belongs to two bands there.
    pub fn standard_set() -> Vec<Self> {
        vec![
            Self { name: "delta".into(), lo: 1.17, hi: 4.0 },
            Self { name: "theta".into(), lo: 4.0, hi: 8.0 },
            Self::alpha(),
            Self { name: "beta".into(), lo: 13.0, hi: 19.15 },
        ]
    }

    /// Looks up one of [`Band::standard_set`] by name.
    pub fn named(name: &str) -> Option<Self> {
        Self::standard_set().into_iter().find(|b| b.name == name)
    }

    /// Parses `name` (a standard band) or `name:lo:hi`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        match parts.as_slice() {
            [name] => Self::named(name)
                .ok_or_else(|| Error::InvalidInput(format!("unknown band `{name}`"))),
            [name, lo, hi] => {
                let num = |s: &str| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidInput(format!("bad band edge `{s}` in `{spec}`")))
                };
                Self::new(name.trim(), num(lo)?, num(hi)?)
            }
            _ => Err(Error::InvalidInput(format!(
                "band spec `{spec}` is not `name` or `name:lo:hi`"
            ))),
        }
    }

    /// Parses a comma-separated list of band specs.
    pub fn parse_list(spec: &str) -> Result<Vec<Self>> {
        spec.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(Self::parse)
            .collect()
    }

    pub fn check_nyquist(&self, fs: f64) -> Result<()> {
        let nyquist = fs / 2.0;
        if self.lo > 0.0 && self.hi < nyquist {
            Ok(())
        } else {
            Err(Error::BandOutOfRange {
                lo: self.lo,
                hi: self.hi,
                nyquist,
            })
        }
    }
}

/// Per-frequency Hermitian channel x channel matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSpectrum {
    pub freqs: Vec<f64>,
    pub mats: Vec<Array2<Complex64>>,
    pub n_segments: usize,
    pub labels: Vec<String>,
}

impl CrossSpectrum {
    pub fn n_channels(&self) -> usize {
        self.labels.len()
    }

    /// Fewer segments than [`RECOMMENDED_MIN_SEGMENTS`] were averaged.
    pub fn is_under_averaged(&self) -> bool {
        self.n_segments < RECOMMENDED_MIN_SEGMENTS
    }

    /// Auto-spectrum of one channel.
    pub fn power(&self, channel: usize) -> Vec<f64> {
        self.mats.iter().map(|m| m[[channel, channel]].re).collect()
    }
}

/// Cross-spectrum normalized to unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherencyMatrix {
    pub freqs: Vec<f64>,
    pub mats: Vec<Array2<Complex64>>,
    pub labels: Vec<String>,
}

/// Band-limited instantaneous phase (wrapped to (-pi, pi]) and envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticRecord {
    pub phase: Array2<f64>,
    pub envelope: Array2<f64>,
    pub fs: f64,
    pub band: Band,
    pub labels: Vec<String>,
}

impl AnalyticRecord {
    pub fn new(phase: Array2<f64>, envelope: Array2<f64>, fs: f64, band: Band) -> Result<Self> {
        if phase.dim() != envelope.dim() {
            return Err(Error::ShapeMismatch(format!(
                "phase {:?} vs envelope {:?}",
                phase.dim(),
                envelope.dim()
            )));
        }
        if !(fs > 0.0) {
            return Err(Error::InvalidInput(format!("sampling rate must be positive, got {fs}")));
        }
        let labels = (1..=phase.nrows()).map(|i| format!("ch{i}")).collect();
        Ok(Self {
            phase,
            envelope,
            fs,
            band,
            labels,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.phase.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {} channels",
                labels.len(),
                self.phase.nrows()
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n_channels(&self) -> usize {
        self.phase.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.phase.ncols()
    }
}

/// Frequencies of the bins kept by [`bartlett_cross_spectrum`].
pub fn bartlett_freqs(fs: f64, segment_samples: usize) -> Vec<f64> {
    (1..segment_samples / 2)
        .map(|k| k as f64 * fs / segment_samples as f64)
        .collect()
}

pub fn bartlett_cross_spectrum(rec: &MultichannelRecord, segment_samples: usize) -> Result<CrossSpectrum> {
    if segment_samples < 4 {
        return Err(Error::InvalidInput(format!(
            "segment of {segment_samples} samples has no bins between DC and Nyquist"
        )));
    }
    let n_segments = rec.n_samples() / segment_samples;
    if n_segments < 2 {
        return Err(Error::TooFewSegments {
            segments: n_segments,
            segment_samples,
        });
    }
    let n_ch = rec.n_channels();
    let n_bins = segment_samples / 2 - 1;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(segment_samples);

    // spectra[seg * n_ch + ch][bin]
    let spectra: Vec<Vec<Complex64>> = (0..n_segments * n_ch)
        .into_par_iter()
        .map(|idx| {
            let (seg, ch) = (idx / n_ch, idx % n_ch);
            let start = seg * segment_samples;
            let x = rec.data.row(ch);
            let x = x.slice(ndarray::s![start..start + segment_samples]);
            let mean = x.sum() / segment_samples as f64;
            let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();
            fft.process(&mut buf);
            buf[1..=n_bins].to_vec()
        })
        .collect();

    let scale = 2.0 / (segment_samples as f64).powi(2) / n_segments as f64;
    let mats: Vec<Array2<Complex64>> = (0..n_bins)
        .into_par_iter()
        .map(|bin| {
            let mut m = Array2::<Complex64>::zeros((n_ch, n_ch));
            for i in 0..n_ch {
                for j in i..n_ch {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for seg in 0..n_segments {
                        let xi = spectra[seg * n_ch + i][bin];
                        let xj = spectra[seg * n_ch + j][bin];
                        acc += xi * xj.conj();
                    }
                    acc *= scale;
                    if i == j {
                        acc.im = 0.0;
                        m[[i, i]] = acc;
                    } else {
                        m[[i, j]] = acc;
                        m[[j, i]] = acc.conj();
                    }
                }
            }
            m
        })
        .collect();

    Ok(CrossSpectrum {
        freqs: bartlett_freqs(rec.fs, segment_samples),
        mats,
        n_segments,
        labels: rec.labels.clone(),
    })
}

/// `C_ij(f) = S_ij(f) / sqrt(S_ii(f) S_jj(f))`, diagonal exactly 1.
pub fn coherency(cs: &CrossSpectrum) -> Result<CoherencyMatrix> {
    let n = cs.n_channels();
    let mats = cs
        .mats
        .iter()
        .zip(&cs.freqs)
        .map(|(s, &f)| {
            let power: Vec<f64> = (0..n).map(|i| s[[i, i]].re).collect();
            if let Some(i) = power.iter().position(|&p| !(p > 0.0)) {
                return Err(Error::ZeroPowerChannel {
                    channel: cs.labels[i].clone(),
                    freq_hz: f,
                });
            }
            let norm: Vec<f64> = power.iter().map(|p| p.sqrt()).collect();
            let mut c = Array2::<Complex64>::zeros((n, n));
            for i in 0..n {
                c[[i, i]] = Complex64::new(1.0, 0.0);
                for j in i + 1..n {
                    let v = s[[i, j]] / (norm[i] * norm[j]);
                    c[[i, j]] = v;
                    c[[j, i]] = v.conj();
                }
            }
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherencyMatrix {
        freqs: cs.freqs.clone(),
        mats,
        labels: cs.labels.clone(),
    })
}

/// Indices `k` with `band.lo <= freqs[k] <= band.hi`.
pub fn band_slice(freqs: &[f64], band: &Band) -> Result<Vec<usize>> {
    let idx: Vec<usize> = freqs
        .iter()
        .enumerate()
        .filter(|(_, &f)| f >= band.lo && f <= band.hi)
        .map(|(k, _)| k)
        .collect();
    if idx.is_empty() {
        Err(Error::EmptyBand(band.name.clone()))
    } else {
        Ok(idx)
    }
}

/// Squared magnitude response of a band-pass Butterworth filter applied
/// forward and backward, i.e. the zero-phase gain.
pub fn zero_phase_bandpass_gain(f: f64, lo: f64, hi: f64) -> f64 {
    if f <= 0.0 {
        return 0.0;
    }
    let centre2 = lo * hi;
    let x = (f * f - centre2) / (f * (hi - lo));
    1.0 / (1.0 + x.powi(2 * BUTTERWORTH_ORDER))
}

/// Band-pass to `band` with zero phase and take the analytic signal.
pub fn bandpass_analytic(rec: &MultichannelRecord, band: &Band) -> Result<AnalyticRecord> {
    band.check_nyquist(rec.fs)?;
    let n = rec.n_samples();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    // bin weights: band-pass gain times the analytic mask (0, 1 at DC and
    // Nyquist, 2 for positive frequencies, 0 for negative ones)
    let weights: Vec<f64> = (0..n)
        .map(|k| {
            let mask = if k == 0 || 2 * k == n {
                1.0
            } else if 2 * k < n {
                2.0
            } else {
                0.0
            };
            let f = k as f64 * rec.fs / n as f64;
            mask * zero_phase_bandpass_gain(f, band.lo, band.hi) / n as f64
        })
        .collect();

    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..rec.n_channels())
        .into_par_iter()
        .map(|ch| {
            let mut buf: Vec<Complex64> = rec
                .data
                .row(ch)
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect();
            fwd.process(&mut buf);
            for (b, w) in buf.iter_mut().zip(&weights) {
                *b *= *w;
            }
            inv.process(&mut buf);
            buf.iter()
                .map(|z| (wrap_phase(z.arg()), z.norm()))
                .unzip()
        })
        .collect();

    let mut phase = Array2::zeros((rec.n_channels(), n));
    let mut envelope = Array2::zeros((rec.n_channels(), n));
    for (ch, (p, e)) in rows.into_iter().enumerate() {
        phase.row_mut(ch).assign(&ndarray::Array1::from(p));
        envelope.row_mut(ch).assign(&ndarray::Array1::from(e));
    }
    AnalyticRecord::new(phase, envelope, rec.fs, band.clone())?.with_labels(rec.labels.clone())
}

/// Maps an angle into (-pi, pi].
pub fn wrap_phase(a: f64) -> f64 {
    use std::f64::consts::PI;
    let mut w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w += 2.0 * PI;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use proptest::prelude::{any, prop_assert, proptest, ProptestConfig};
    use rand::Rng;
    use rand_distr::StandardNormal;
    use std::f64::consts::PI;

    fn record(data: Array2<f64>, fs: f64) -> MultichannelRecord {
        MultichannelRecord::unlabeled(data, fs).unwrap()
    }

    fn white(n_ch: usize, n: usize, s: u64) -> Array2<f64> {
        let mut rng = seed::rng(s);
        Array2::from_shape_fn((n_ch, n), |_| rng.sample(StandardNormal))
    }

    fn tone(freq: f64, fs: f64, n: usize, phase: f64) -> Vec<f64> {
        (0..n)
            .map(|t| (2.0 * PI * freq * t as f64 / fs + phase).cos())
            .collect()
    }

    #[test]
    fn sinusoid_power_peaks_at_its_bin() {
        let fs = 200.0;
        let f0 = 40.0 * fs / 512.0;
        let x = Array2::from_shape_vec((1, 512 * 8), tone(f0, fs, 512 * 8, 0.3)).unwrap();
        let cs = bartlett_cross_spectrum(&record(x, fs), 512).unwrap();
        let p = cs.power(0);
        let k = (0..p.len()).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
        assert_eq!(cs.freqs[k], f0);
        // a unit cosine has variance 1/2, all of it in one bin
        assert!((p[k] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn default_grid_resolution() {
        let f = bartlett_freqs(200.0, DEFAULT_SEGMENT_SAMPLES);
        assert_eq!(f[1] - f[0], 0.390625);
        assert_eq!(f[0], 0.390625);
        assert_eq!(f.len(), 255);
    }

    #[test]
    fn matches_naive_dft_oracle() {
        let (n_ch, l, k_seg) = (3, 16, 4);
        let x = white(n_ch, l * k_seg, 8);
        let cs = bartlett_cross_spectrum(&record(x.clone(), 10.0), l).unwrap();
        assert_eq!(cs.n_segments, 4);
        for (b, m) in cs.mats.iter().enumerate() {
            let k = b + 1;
            for i in 0..n_ch {
                for j in 0..n_ch {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for seg in 0..k_seg {
                        let dft = |ch: usize| {
                            let s = &x.row(ch).to_vec()[seg * l..(seg + 1) * l];
                            let mean = s.iter().sum::<f64>() / l as f64;
                            s.iter().enumerate().fold(Complex64::new(0.0, 0.0), |z, (t, &v)| {
                                let ang = -2.0 * PI * (k * t) as f64 / l as f64;
                                z + Complex64::from_polar(v - mean, ang)
                            })
                        };
                        acc += dft(i) * dft(j).conj();
                    }
                    let expect = acc * 2.0 / (l * l * k_seg) as f64;
                    let expect = if i == j { Complex64::new(expect.re, 0.0) } else { expect };
                    assert!((m[[i, j]] - expect).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn too_few_segments() {
        assert!(matches!(
            bartlett_cross_spectrum(&record(white(2, 600, 1), 200.0), 512),
            Err(Error::TooFewSegments { segments: 1, .. })
        ));
    }

    #[test]
    fn duplicated_channel_is_fully_coherent() {
        let mut x = white(2, 4096, 2);
        let first = x.row(0).to_owned();
        x.row_mut(1).assign(&first);
        let c = coherency(&bartlett_cross_spectrum(&record(x, 100.0), 128).unwrap()).unwrap();
        for m in &c.mats {
            assert!((m[[0, 1]].norm() - 1.0).abs() < 1e-12);
            assert_eq!(m[[0, 0]], Complex64::new(1.0, 0.0));
            assert_eq!(m[[1, 1]], Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn zero_power_channel_is_reported() {
        let mut x = white(2, 1024, 3);
        x.row_mut(1).fill(5.0);
        let cs = bartlett_cross_spectrum(&record(x, 100.0), 128).unwrap();
        assert!(matches!(coherency(&cs), Err(Error::ZeroPowerChannel { .. })));
    }

    #[test]
    fn independent_noise_coherence_bias_is_one_over_k() {
        let (l, k) = (64, 50);
        let mut total = 0.0;
        let mut count = 0usize;
        for rep in 0..200 {
            let cs = bartlett_cross_spectrum(&record(white(2, l * k, 1000 + rep), 1.0), l).unwrap();
            let c = coherency(&cs).unwrap();
            for m in &c.mats {
                total += m[[0, 1]].norm_sqr();
                count += 1;
            }
        }
        let mean = total / count as f64;
        let expect = 1.0 / k as f64;
        assert!((mean - expect).abs() < 0.5 * expect, "mean |C|^2 = {mean}");
    }

    #[test]
    fn white_noise_parseval() {
        let x = white(1, 512 * 40, 4);
        let cs = bartlett_cross_spectrum(&record(x, 200.0), 512).unwrap();
        let total: f64 = cs.power(0).iter().sum();
        // unit variance minus the dropped DC and Nyquist bins
        let expect = 1.0 - 1.0 / 512.0;
        assert!((total - expect).abs() < 0.05 * expect, "total {total}");
    }

    #[test]
    fn normative_alpha_slice() {
        let freqs: Vec<f64> = (0..=47).map(|k| 1.17 + 0.39 * k as f64).collect();
        assert!((freqs.last().unwrap() - 19.5).abs() < 1e-9);
        let freqs = &freqs[..=46];
        let idx = band_slice(freqs, &Band::alpha()).unwrap();
        assert_eq!(idx.len(), 13);
        assert!((freqs[idx[0]] - 8.19).abs() < 1e-9);
        assert!((freqs[*idx.last().unwrap()] - 12.87).abs() < 1e-9);

        // the exact 200 Hz / 512-sample grid selects the same number of bins
        let exact = bartlett_freqs(200.0, 512);
        assert_eq!(band_slice(&exact, &Band::alpha()).unwrap().len(), 13);
        let freqs: Vec<f64> = freqs.to_vec();

        let below = Band::new("low", 0.1, 0.5).unwrap();
        assert!(matches!(band_slice(&freqs, &below), Err(Error::EmptyBand(_))));
        let all = Band::new("all", 0.5, 50.0).unwrap();
        assert_eq!(band_slice(&freqs, &all).unwrap(), (0..freqs.len()).collect::<Vec<_>>());
    }

    #[test]
    fn standard_bands_partition_the_grid() {
        let freqs: Vec<f64> = (3..=49).map(|k| k as f64 * 0.390625).collect();
        let mut seen = vec![0; freqs.len()];
        for b in Band::standard_set() {
            for k in band_slice(&freqs, &b).unwrap() {
                seen[k] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1), "{seen:?}");
    }

    #[test]
    fn band_parsing() {
        assert_eq!(Band::parse("alpha").unwrap(), Band::alpha());
        let b = Band::parse("mu:9:11").unwrap();
        assert_eq!((b.name.as_str(), b.lo, b.hi), ("mu", 9.0, 11.0));
        assert!(Band::parse("gamma").is_err());
        assert!(Band::parse("x:5:2").is_err());
        assert_eq!(Band::parse_list("alpha, beta").unwrap().len(), 2);
        assert!(Band::alpha().check_nyquist(20.0).is_err());
    }

    #[test]
    fn sinusoid_envelope_is_flat() {
        let fs = 200.0;
        let x = Array2::from_shape_vec((1, 4000), tone(10.0, fs, 4000, 0.0)).unwrap();
        let a = bandpass_analytic(&record(x, fs), &Band::alpha()).unwrap();
        let env: Vec<f64> = a.envelope.row(0).iter().skip(400).take(3200).copied().collect();
        let m = env.iter().sum::<f64>() / env.len() as f64;
        let sd = (env.iter().map(|e| (e - m).powi(2)).sum::<f64>() / env.len() as f64).sqrt();
        assert!(sd / m < 0.05, "cv {}", sd / m);
        assert!((m - 1.0).abs() < 0.05);
    }

    #[test]
    fn sine_lags_cosine_by_quarter_cycle() {
        let fs = 200.0;
        let n = 4000;
        let mut x = Array2::zeros((2, n));
        x.row_mut(0).assign(&ndarray::Array1::from(tone(10.0, fs, n, 0.0)));
        x.row_mut(1).assign(&ndarray::Array1::from(tone(10.0, fs, n, -PI / 2.0)));
        let a = bandpass_analytic(&record(x, fs), &Band::alpha()).unwrap();
        for t in 400..n - 400 {
            let d = wrap_phase(a.phase[[0, t]] - a.phase[[1, t]]);
            assert!((d - PI / 2.0).abs() < 0.05, "t={t}: {d}");
        }
    }

    #[test]
    fn bandpass_gain_shape() {
        let (lo, hi) = (8.0, 13.0);
        let centre = (lo * hi as f64).sqrt();
        assert_eq!(zero_phase_bandpass_gain(centre, lo, hi), 1.0);
        assert!((zero_phase_bandpass_gain(lo, lo, hi) - 0.5).abs() < 1e-12);
        assert!((zero_phase_bandpass_gain(hi, lo, hi) - 0.5).abs() < 1e-12);
        assert!(zero_phase_bandpass_gain(30.0, lo, hi) < 1e-3);
        assert_eq!(zero_phase_bandpass_gain(0.0, lo, hi), 0.0);
    }

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!((wrap_phase(0.25)) == 0.25);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn cross_spectrum_invariants(s in any::<u64>(), n_ch in 2usize..5) {
            let x = white(n_ch, 32 * 6, s);
            let cs = bartlett_cross_spectrum(&record(x, 50.0), 32).unwrap();
            for m in &cs.mats {
                for i in 0..n_ch {
                    prop_assert!(m[[i, i]].re >= 0.0 && m[[i, i]].im == 0.0);
                    for j in 0..n_ch {
                        prop_assert!((m[[i, j]] - m[[j, i]].conj()).norm() < 1e-10);
                        prop_assert!(m[[i, j]].norm_sqr() <= m[[i, i]].re * m[[j, j]].re * (1.0 + 1e-9));
                    }
                }
            }
            for m in &coherency(&cs).unwrap().mats {
                prop_assert!(m.iter().all(|c| c.norm() <= 1.0 + 1e-12));
            }
        }

        #[test]
        fn coherency_ignores_channel_scale(s in any::<u64>(), c in 0.01f64..100.0) {
            let x = white(3, 32 * 5, s);
            let mut y = x.clone();
            y.row_mut(1).mapv_inplace(|v| v * c);
            let a = coherency(&bartlett_cross_spectrum(&record(x, 50.0), 32).unwrap()).unwrap();
            let b = coherency(&bartlett_cross_spectrum(&record(y, 50.0), 32).unwrap()).unwrap();
            for (ma, mb) in a.mats.iter().zip(&b.mats) {
                for (u, v) in ma.iter().zip(mb.iter()) {
                    prop_assert!((u - v).norm() < 1e-10);
                }
            }
        }

        #[test]
        fn envelope_is_non_negative(s in any::<u64>()) {
            let a = bandpass_analytic(&record(white(2, 500, s), 100.0), &Band::alpha()).unwrap();
            prop_assert!(a.envelope.iter().all(|&e| e >= 0.0));
            prop_assert!(a.phase.iter().all(|&p| p > -PI && p <= PI));
        }
    }
}
