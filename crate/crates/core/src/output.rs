//! CSV and summary writers. Numbers are printed with 17 significant digits
//! in locale-independent scientific notation, lines end in LF.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics::EmpiricalDistribution;

/// 17 significant digits, round-trip exact.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Provenance recorded at the top of every output file.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub model: String,
    pub model_hash: String,
    pub seed: u64,
    pub k: usize,
    pub m: Option<usize>,
    pub extra: Vec<(String, String)>,
}

impl Provenance {
    fn header(&self) -> String {
        let mut s = format!("# model_hash={} seed={} k={}", self.model_hash, self.seed, self.k);
        if let Some(m) = self.m {
            let _ = write!(s, " m={m}");
        }
        for (k, v) in &self.extra {
            let _ = write!(s, " {k}={v}");
        }
        let _ = write!(s, "\n# model={}\n", self.model);
        s
    }

    pub fn with(&self, key: &str, value: impl ToString) -> Provenance {
        let mut p = self.clone();
        p.extra.push((key.to_string(), value.to_string()));
        p
    }

    pub fn with_m(&self, m: usize) -> Provenance {
        Provenance { m: Some(m), ..self.clone() }
    }
}

fn write_file(path: &Path, body: &str) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    }
    std::fs::write(path, body).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    Ok(path.to_path_buf())
}

/// One value per line after the header comment.
pub fn write_values(path: &Path, prov: &Provenance, values: &[f64]) -> Result<PathBuf> {
    let mut body = prov.header();
    for v in values {
        body.push_str(&fmt_f64(*v));
        body.push('\n');
    }
    write_file(path, &body)
}

/// `x,cdf` at every distinct sample point.
pub fn write_ecdf(path: &Path, prov: &Provenance, ecdf: &EmpiricalDistribution) -> Result<PathBuf> {
    let mut body = prov.header();
    body.push_str("x,cdf\n");
    for (x, f) in ecdf.steps() {
        let _ = writeln!(body, "{},{}", fmt_f64(x), fmt_f64(f));
    }
    write_file(path, &body)
}

/// Two-column table with a named header, e.g. `x,tail` or `x,g_k`.
pub fn write_xy(path: &Path, prov: &Provenance, header: &str, rows: &[(f64, f64)]) -> Result<PathBuf> {
    let mut body = prov.header();
    body.push_str(header);
    body.push('\n');
    for (x, y) in rows {
        let _ = writeln!(body, "{},{}", fmt_f64(*x), fmt_f64(*y));
    }
    write_file(path, &body)
}

/// `m,d1,bound`; the bound column is empty when no constants were supplied.
pub fn write_distance_table(path: &Path, prov: &Provenance, rows: &[(usize, f64, Option<f64>)]) -> Result<PathBuf> {
    let mut body = prov.header();
    body.push_str("m,d1,bound\n");
    for (m, d, b) in rows {
        let _ = writeln!(body, "{m},{},{}", fmt_f64(*d), b.map(fmt_f64).unwrap_or_default());
    }
    write_file(path, &body)
}

/// `key = value` lines.
pub fn write_summary(path: &Path, entries: &[(String, String)]) -> Result<PathBuf> {
    let mut body = String::new();
    for (k, v) in entries {
        let _ = writeln!(body, "{k} = {v}");
    }
    write_file(path, &body)
}

/// Reads the first column of a values or ECDF file, skipping comments and headers.
pub fn read_values(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.split(',').next().unwrap_or("").trim();
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            // a column header such as `x,cdf`
            Err(_) if out.is_empty() && field.chars().all(|c| c.is_ascii_alphabetic() || c == '_') => {}
            Err(_) => {
                return Err(Error::config(idx + 1, path.display().to_string(), format!("bad value `{field}`")))
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_is_seventeen_digits() {
        assert_eq!(fmt_f64(2.0), "2.0000000000000000e0");
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        for x in [std::f64::consts::PI, -1e-300, 123456789.123] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn values_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let prov = Provenance {
            model: "quicksort".into(),
            model_hash: "00".into(),
            seed: 1,
            k: 0,
            m: Some(3),
            extra: vec![],
        };
        let path = dir.path().join("v.csv");
        write_values(&path, &prov, &[0.5, -2.0, 1e-7]).unwrap();
        assert_eq!(read_values(&path).unwrap(), vec![0.5, -2.0, 1e-7]);
        let e = EmpiricalDistribution::new(vec![1.0, 1.0, 3.0]).unwrap();
        let ecdf_path = dir.path().join("e.csv");
        write_ecdf(&ecdf_path, &prov, &e).unwrap();
        let text = std::fs::read_to_string(&ecdf_path).unwrap();
        assert!(text.contains("x,cdf\n1.0000000000000000e0,6.6666666666666663e-1\n"));
        assert_eq!(read_values(&ecdf_path).unwrap(), vec![1.0, 3.0]);
    }
}
