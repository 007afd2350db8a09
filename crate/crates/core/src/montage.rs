//! Built-in electrode layouts.
//!
//! Positions are unit vectors on an idealized spherical head: `x` points to
//! the nasion, `y` to the left preauricular point, `z` to the vertex.
//!
//! - `std19`: the 19-channel 10-20 set on the idealized sphere. The outer ring
//!   (Fp, F7/8, T, O) sits at 72 deg polar angle, the inner ring (Fz, C3/4, Pz)
//!   at 36 deg, and F3/4, P3/4 at 46 deg.
//! - `egi32`, `egi64`, `egi128`: dense nets laid out as a golden-angle spiral
//!   of equal-area points over the upper hemisphere, labelled `E1..En` from the
//!   vertex downwards. These reproduce the channel density of geodesic nets,
//!   not their exact coordinates.

use crate::error::{Error, Result};

/// (label, polar angle deg, azimuth deg) for the 10-20 channels, in the order
/// used by the normative 19-channel recordings.
const STD19: [(&str, f64, f64); 19] = [
    ("Fp1", 72.0, 18.0),
    ("Fp2", 72.0, -18.0),
    ("F3", 46.0, 39.0),
    ("F4", 46.0, -39.0),
    ("C3", 36.0, 90.0),
    ("C4", 36.0, -90.0),
    ("P3", 46.0, 141.0),
    ("P4", 46.0, -141.0),
    ("O1", 72.0, 162.0),
    ("O2", 72.0, -162.0),
    ("F7", 72.0, 54.0),
    ("F8", 72.0, -54.0),
    ("T3", 72.0, 90.0),
    ("T4", 72.0, -90.0),
    ("T5", 72.0, 126.0),
    ("T6", 72.0, -126.0),
    ("Fz", 36.0, 0.0),
    ("Cz", 0.0, 0.0),
    ("Pz", 36.0, 180.0),
];

/// Channel counts with a built-in layout.
pub const BUILTIN_CHANNEL_COUNTS: [usize; 4] = [19, 32, 64, 128];

#[derive(Debug, Clone, PartialEq)]
pub struct Montage {
    pub name: String,
    pub labels: Vec<String>,
    pub positions: Vec<[f64; 3]>,
}

impl Montage {
    /// Looks up a built-in layout by label (`std19`, `egi32`, `egi64`,
    /// `egi128`) or by bare channel count (`19`, `32`, ...).
    pub fn builtin(label: &str) -> Result<Self> {
        match label.trim().to_ascii_lowercase().as_str() {
            "std19" | "19" | "10-20" => Ok(Self::std19()),
            "egi32" | "32" => Ok(Self::spiral("egi32", 32)),
            "egi64" | "64" => Ok(Self::spiral("egi64", 64)),
            "egi128" | "128" => Ok(Self::spiral("egi128", 128)),
            _ => Err(Error::UnknownMontage(label.to_string())),
        }
    }

    pub fn for_channel_count(n: usize) -> Result<Self> {
        Self::builtin(&n.to_string())
    }

    /// A layout with caller-supplied positions. Positions are projected onto
    /// the unit sphere.
    pub fn from_positions(
        name: impl Into<String>,
        labels: Vec<String>,
        positions: Vec<[f64; 3]>,
    ) -> Result<Self> {
        if labels.len() != positions.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {} positions",
                labels.len(),
                positions.len()
            )));
        }
        if labels.is_empty() {
            return Err(Error::EmptyRequest("montage without channels"));
        }
        let positions = positions
            .into_iter()
            .map(|p| {
                let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                if norm > 0.0 && norm.is_finite() {
                    Ok([p[0] / norm, p[1] / norm, p[2] / norm])
                } else {
                    Err(Error::InvalidInput(format!("degenerate electrode position {p:?}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name: name.into(),
            labels,
            positions,
        })
    }

    pub fn n_channels(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn std19() -> Self {
        let (labels, positions) = STD19
            .iter()
            .map(|&(label, polar, azimuth)| (label.to_string(), spherical(polar, azimuth)))
            .unzip();
        Self {
            name: "std19".into(),
            labels,
            positions,
        }
    }

    fn spiral(name: &str, n: usize) -> Self {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let positions = (0..n)
            .map(|i| {
                // equal-area bands between z = 1 and z = 0
                let z = 1.0 - (i as f64 + 0.5) / n as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = golden * i as f64;
                [r * phi.cos(), r * phi.sin(), z]
            })
            .collect();
        Self {
            name: name.into(),
            labels: (1..=n).map(|i| format!("E{i}")).collect(),
            positions,
        }
    }
}

fn spherical(polar_deg: f64, azimuth_deg: f64) -> [f64; 3] {
    let (t, p) = (polar_deg.to_radians(), azimuth_deg.to_radians());
    [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]
}
