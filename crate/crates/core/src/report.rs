//! Boundary-asymptotics reports and CSV/JSON writers shared by the solvers.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// (d, u, φ(ξM(d)), u/φ(ξM(d))).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub d: f64,
    pub u: f64,
    pub predicted: f64,
    pub ratio: f64,
}

/// Ratio statistics over grid nodes whose distance falls in [d_lo, d_hi).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinRow {
    pub d_lo: f64,
    pub d_hi: f64,
    pub count: usize,
    pub min_ratio: f64,
    pub median_ratio: f64,
    pub max_ratio: f64,
    /// Median moved by more than 1% relative to the previous exhaustion level.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub xi: f64,
    pub rows: Vec<ReportRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bins: Vec<BinRow>,
}

impl AsymptoticsReport {
    pub fn row_near(&self, d: f64) -> Option<&ReportRow> {
        self.rows.iter().min_by(|a, b| (a.d / d).ln().abs().total_cmp(&(b.d / d).ln().abs()))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        if self.bins.is_empty() {
            write_csv(path, &["d", "u", "predicted", "ratio"], self.rows.iter().map(|r| vec![r.d, r.u, r.predicted, r.ratio]))
        } else {
            let mut w = csv_writer(path)?;
            w.write_record(["d_lo", "d_hi", "count", "min_ratio", "median_ratio", "max_ratio", "truncated"])
                .map_err(csv_err)?;
            for b in &self.bins {
                w.write_record([
                    fmt_num(b.d_lo),
                    fmt_num(b.d_hi),
                    b.count.to_string(),
                    fmt_num(b.min_ratio),
                    fmt_num(b.median_ratio),
                    fmt_num(b.max_ratio),
                    b.truncated.to_string(),
                ])
                .map_err(csv_err)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

/// Shortest round-trip representation, so repeated runs are byte-identical.
pub fn fmt_num(v: f64) -> String {
    format!("{v:e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Serialization(e.to_string())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(csv_err)
}

/// Writes a numeric table with a header line.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.iter().map(|v| fmt_num(*v))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Serialization(e.to_string()))?;
    file.write_all(text.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}

/// Median of a non-empty slice (sorts a copy).
pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
