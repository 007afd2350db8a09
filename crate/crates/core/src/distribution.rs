//! Shape of a connectivity-weight distribution.
//!
//! A symmetric matrix contributes its strict upper triangle as a weight
//! vector. The vector is summarized by its mean (MCW), population skewness
//! and kurtosis (plain standardized moments, no small-sample correction; a
//! normal law has kurtosis 3), and the histogram entropy over equal-width
//! bins on `[0, 1]` normalized by `log2(bins)`.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::connectivity::ConnectivityMatrix;
use crate::error::{Error, Result};

/// Histogram resolution for the entropy: 100 bins of width 0.01.
pub const DEFAULT_BINS: usize = 100;

/// Symmetry tolerance when extracting the upper triangle.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub w: Vec<f64>,
}

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = w.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("weight {i} is not finite: {v}")));
        }
        Ok(Self { w })
    }

    pub fn n_pairs(&self) -> usize {
        self.w.len()
    }

    pub fn mean(&self) -> f64 {
        self.w.iter().sum::<f64>() / self.w.len() as f64
    }
}

/// Summary statistics of one weight vector. `skewness` and `kurtosis` are
/// `None` when the weights have zero spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub mcw: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    pub entropy: f64,
    pub n_pairs: usize,
}

/// Row-major strict upper triangle of a symmetric matrix.
pub fn upper_triangle(m: &Array2<f64>) -> Result<WeightVector> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::ShapeMismatch(format!("{}x{} matrix is not square", n, m.ncols())));
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!("{n}x{n} matrix has no off-diagonal pairs")));
    }
    let mut w = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let diff = (m[[i, j]] - m[[j, i]]).abs();
            if !(diff <= SYMMETRY_TOLERANCE) {
                return Err(Error::NotSymmetric { i, j, diff });
            }
            w.push(m[[i, j]]);
        }
    }
    WeightVector::new(w)
}

pub fn upper_triangle_weights(m: &ConnectivityMatrix) -> Result<WeightVector> {
    upper_triangle(&m.weights)
}

struct Moments {
    m2: f64,
    m3: f64,
    m4: f64,
}

fn central_moments(x: &[f64]) -> Result<Moments> {
    if x.len() < 2 {
        return Err(Error::DegenerateDistribution);
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    // rounding in the mean leaves ~ulp-sized residue on constant data
    let scale = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if !(m2.sqrt() > 8.0 * f64::EPSILON * scale) {
        return Err(Error::DegenerateDistribution);
    }
    Ok(Moments { m2, m3, m4 })
}

/// `E[(x - mu)^3] / sigma^3`.
pub fn skewness(w: &WeightVector) -> Result<f64> {
    let m = central_moments(&w.w)?;
    Ok(m.m3 / m.m2.powf(1.5))
}

/// `E[(x - mu)^4] / sigma^4` (not excess kurtosis).
pub fn kurtosis(w: &WeightVector) -> Result<f64> {
    let m = central_moments(&w.w)?;
    Ok(m.m4 / (m.m2 * m.m2))
}

/// Counts over `n_bins` equal-width bins `[k/n, (k+1)/n)`, last bin closed.
pub fn histogram(w: &WeightVector, n_bins: usize) -> Result<Vec<usize>> {
    if n_bins < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 bins, got {n_bins}")));
    }
    let mut counts = vec![0usize; n_bins];
    let nb = n_bins as f64;
    for (index, &value) in w.w.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::RangeViolation { index, value });
        }
        let mut k = ((value * nb).floor() as usize).min(n_bins - 1);
        // settle against the exact edges k / n
        if k + 1 < n_bins && value >= (k + 1) as f64 / nb {
            k += 1;
        } else if k > 0 && value < k as f64 / nb {
            k -= 1;
        }
        counts[k] += 1;
    }
    Ok(counts)
}

/// `-(1 / log2 N) * sum_i P_i log2 P_i` over the histogram of `w`.
pub fn shannon_entropy(w: &WeightVector, n_bins: usize) -> Result<f64> {
    if w.w.is_empty() {
        return Err(Error::EmptyRequest("entropy of an empty weight vector"));
    }
    let counts = histogram(w, n_bins)?;
    let n = w.w.len() as f64;
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    Ok((h / (n_bins as f64).log2()).clamp(0.0, 1.0) + 0.0)
}

pub fn summarize(w: &WeightVector, n_bins: usize) -> Result<DistributionSummary> {
    if w.w.is_empty() {
        return Err(Error::EmptyRequest("summary of an empty weight vector"));
    }
    let degenerate_as_none = |r: Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::DegenerateDistribution) => Ok(None),
        Err(e) => Err(e),
    };
    Ok(DistributionSummary {
        mcw: w.mean(),
        skewness: degenerate_as_none(skewness(w))?,
        kurtosis: degenerate_as_none(kurtosis(w))?,
        entropy: shannon_entropy(w, n_bins)?,
        n_pairs: w.n_pairs(),
    })
}

/// Upper triangle of `m` followed by [`summarize`].
pub fn summarize_matrix(m: &ConnectivityMatrix, n_bins: usize) -> Result<DistributionSummary> {
    summarize(&upper_triangle_weights(m)?, n_bins)
}
