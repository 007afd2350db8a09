//! Matrix interchange: headerless row-major numeric CSV plus a JSON sidecar
//! named `<stem>.meta.json` next to it.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatrixMeta {
    /// One of `sources`, `library`, `leadfield`, `record`, `connectivity`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fs: Option<f64>,
    #[serde(default)]
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub montage: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_active: Option<usize>,
}

/// `dir/name.csv` -> `dir/name.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.meta.json"))
}

/// Shortest representation that parses back to the identical `f64`.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn write_matrix(path: &Path, data: &Array2<f64>, meta: &MatrixMeta) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut line = String::new();
    for row in data.rows() {
        line.clear();
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                line.push(',');
            }
            line.push_str(&fmt_f64(*v));
        }
        line.push('\n');
        out.write_all(line.as_bytes())
            .map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))?;
    write_json(&sidecar_path(path), meta)
}

pub fn read_matrix(path: &Path) -> Result<(Array2<f64>, MatrixMeta)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::parse(path, e.to_string()))?;
    let mut values = Vec::new();
    let mut n_cols = None;
    let mut n_rows = 0;
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::parse(path, e.to_string()))?;
        match n_cols {
            None => n_cols = Some(record.len()),
            Some(n) if n != record.len() => {
                return Err(Error::parse(
                    path,
                    format!("row {} has {} columns, expected {n}", r + 1, record.len()),
                ))
            }
            _ => {}
        }
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Error::parse(path, format!("row {} column {}: `{field}` is not a number", r + 1, c + 1))
            })?;
            values.push(v);
        }
        n_rows += 1;
    }
    let n_cols = n_cols.ok_or_else(|| Error::parse(path, "empty matrix file"))?;
    let data = Array2::from_shape_vec((n_rows, n_cols), values)
        .map_err(|e| Error::parse(path, e.to_string()))?;
    let meta = read_json(&sidecar_path(path))?;
    Ok((data, meta))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::parse(path, e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub(crate) fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sidecar_name() {
        assert_eq!(
            sidecar_path(Path::new("out/lf.csv")),
            PathBuf::from("out/lf.meta.json")
        );
    }

    #[test]
    fn matrix_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let data = ndarray::array![[1.0, -2.5e-7, 3.0], [0.1 + 0.2, 1e300, -0.0]];
        let meta = MatrixMeta {
            kind: "record".into(),
            fs: Some(200.0),
            labels: vec!["a".into(), "b".into()],
            ..Default::default()
        };
        write_matrix(&path, &data, &meta).unwrap();
        let (back, meta_back) = read_matrix(&path).unwrap();
        assert_eq!(back, data);
        assert_eq!(meta_back, meta);
    }

    #[test]
    fn ragged_rows_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "1,2\n3\n").unwrap();
        write_json(&sidecar_path(&path), &MatrixMeta::default()).unwrap();
        assert!(matches!(read_matrix(&path), Err(Error::Parse { .. })));
    }

    proptest! {
        #[test]
        fn fmt_f64_parses_back_exactly(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            let back: f64 = fmt_f64(v).parse().unwrap();
            prop_assert_eq!(back.to_bits(), v.to_bits());
        }
    }
}
