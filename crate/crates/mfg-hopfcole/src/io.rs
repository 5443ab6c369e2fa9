//! Solution tables and run summaries on disk.
//!
//! Tables are CSV with a fixed header and 17-significant-digit decimals, so
//! values round-trip exactly and repeated runs are byte-identical. Summaries
//! are flat `key = value` text, one entry per line, in a fixed order.

use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Format a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write named columns as CSV. All columns must share a length.
pub fn write_csv(path: &Path, columns: &[(&str, &[f64])]) -> Result<()> {
    let len = columns.first().map(|(_, c)| c.len()).unwrap_or(0);
    for (name, col) in columns {
        if col.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "column '{name}' has {} rows, expected {len}",
                col.len()
            )));
        }
    }
    let mut out = String::new();
    let header: Vec<&str> = columns.iter().map(|(n, _)| *n).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in 0..len {
        let line: Vec<String> = columns.iter().map(|(_, c)| fmt_f64(c[row])).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Read a CSV written by [`write_csv`]; returns column names and data.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Io(format!("{}: empty file", path.display())))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(Error::Io(format!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                lineno + 2,
                fields.len(),
                header.len()
            )));
        }
        for (c, field) in fields.iter().enumerate() {
            let v = field.trim().parse::<f64>().map_err(|_| {
                Error::Io(format!(
                    "{}: bad number '{field}' at row {}",
                    path.display(),
                    lineno + 2
                ))
            })?;
            cols[c].push(v);
        }
    }
    Ok((header, cols))
}

/// Ordered `key = value` summary.
#[derive(Debug, Clone, Default)]
pub struct Summary {
    entries: Vec<(String, String)>,
}

impl Summary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_str(&mut self, key: &str, value: impl Into<String>) {
        self.entries.push((key.to_string(), value.into()));
    }

    pub fn push_f64(&mut self, key: &str, value: f64) {
        self.entries.push((key.to_string(), fmt_f64(value)));
    }

    pub fn push_usize(&mut self, key: &str, value: usize) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn push_bool(&mut self, key: &str, value: bool) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Result<f64> {
        let raw = self
            .get(key)
            .ok_or_else(|| Error::Io(format!("summary key '{key}' missing")))?;
        raw.parse::<f64>()
            .map_err(|_| Error::Io(format!("summary key '{key}' is not a number: '{raw}'")))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        std::fs::write(path, out).map_err(|e| io_err(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let mut entries = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Io(format!("{}: bad summary line '{line}'", path.display()))
            })?;
            entries.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(Self { entries })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmpdir(tag: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("mfg-io-test-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn csv_round_trips_exactly() {
        let dir = tmpdir("csv");
        let path = dir.join("table.csv");
        let x = [0.0, 0.1, 0.2];
        let u = [1.0 / 3.0, -2.5e-13, 7.25];
        write_csv(&path, &[("x", &x), ("u", &u)]).unwrap();
        let (header, cols) = read_csv(&path).unwrap();
        assert_eq!(header, vec!["x", "u"]);
        assert_eq!(cols[0], x.to_vec());
        assert_eq!(cols[1], u.to_vec());
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn csv_rejects_ragged_columns() {
        let dir = tmpdir("ragged");
        let path = dir.join("bad.csv");
        let a = [1.0, 2.0];
        let b = [1.0];
        assert!(write_csv(&path, &[("a", &a), ("b", &b)]).is_err());
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn summary_round_trips() {
        let dir = tmpdir("summary");
        let path = dir.join("summary.txt");
        let lambda = std::f64::consts::LN_2 / 3.0;
        let mut s = Summary::new();
        s.push_str("coupling", "linear c=1");
        s.push_f64("lambda", lambda);
        s.push_usize("n", 257);
        s.push_bool("singular_drift", false);
        s.write(&path).unwrap();
        let back = Summary::read(&path).unwrap();
        assert_eq!(back.get("coupling"), Some("linear c=1"));
        assert_eq!(back.get_f64("lambda").unwrap(), lambda);
        assert_eq!(back.get("n"), Some("257"));
        assert!(back.get_f64("missing").is_err());
        std::fs::remove_dir_all(dir).ok();
    }
}
