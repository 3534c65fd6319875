use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use ptscatter_core::scattering::{Provenance, ScatteringResult};
use ptscatter_core::specfun::Normalization;
use ptscatter_core::SIGN_CONVENTION;
use serde::Serialize;
use serde_json::Value;

use crate::config::Format;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FallbackFlags {
    /// Points whose interior pair came from direct integration.
    pub numeric_basis: usize,
    /// Floquet coefficient sets normalised by their largest entry.
    pub max_coefficient_normalization: usize,
    pub singular: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub sign_convention: &'static str,
    pub provenance_counts: BTreeMap<&'static str, usize>,
    pub fallback: FallbackFlags,
    /// Seconds since the Unix epoch, taken from `SOURCE_DATE_EPOCH` when set.
    pub timestamp: Option<u64>,
}

impl RunMetadata {
    pub fn new(command: &'static str) -> Self {
        let provenance_counts = [Provenance::FloquetPair, Provenance::BesselPair, Provenance::NumericFallback]
            .iter()
            .map(|p| (p.as_str(), 0))
            .collect();
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            sign_convention: SIGN_CONVENTION,
            provenance_counts,
            fallback: FallbackFlags {
                numeric_basis: 0,
                max_coefficient_normalization: 0,
                singular: 0,
                failed: 0,
            },
            timestamp: std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.trim().parse().ok()),
        }
    }

    pub fn record(&mut self, r: &ScatteringResult<f64>) {
        *self.provenance_counts.entry(r.provenance.as_str()).or_default() += 1;
        if r.provenance == Provenance::NumericFallback {
            self.fallback.numeric_basis += 1;
        }
        if r.normalization == Some(Normalization::MaxCoefficient) {
            self.fallback.max_coefficient_normalization += 1;
        }
        if r.singular {
            self.fallback.singular += 1;
        }
    }

    pub fn record_failure(&mut self) {
        self.fallback.failed += 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(&'static str),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:e}"),
            Cell::Text(s) => (*s).to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::json!(x),
            Cell::Text(s) => Value::from(*s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

pub enum Document {
    Table(Table),
    Report(Value),
}

fn to_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialise");
    s.push('\n');
    s
}

fn render_csv(table: &Table) -> String {
    let mut s = table.columns.join(",");
    s.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn write_to(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

/// Writes the document; CSV tables carry their metadata in `<out>.meta.json`
/// or on stderr when writing to stdout.
pub fn emit(doc: Document, meta: &RunMetadata, format: Format, out: Option<&Path>) -> std::io::Result<()> {
    let meta_value = serde_json::to_value(meta).expect("metadata serialises");
    match (doc, format) {
        (Document::Table(table), Format::Csv) => {
            write_to(out, &render_csv(&table))?;
            let meta_text = to_json(&meta_value);
            match out {
                Some(path) => std::fs::write(sidecar(path), meta_text),
                None => std::io::stderr().lock().write_all(meta_text.as_bytes()),
            }
        }
        (Document::Table(table), Format::Json) => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| Value::Array(row.iter().map(Cell::json).collect()))
                .collect();
            let value = serde_json::json!({
                "columns": table.columns,
                "rows": rows,
                "metadata": meta_value,
            });
            write_to(out, &to_json(&value))
        }
        (Document::Report(mut value), _) => {
            if let Value::Object(map) = &mut value {
                map.insert("metadata".to_string(), meta_value);
            }
            write_to(out, &to_json(&value))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_first() {
        let t = Table {
            columns: &["x", "y"],
            rows: vec![vec![Cell::Num(1.5), Cell::Text("ok")]],
        };
        assert_eq!(render_csv(&t), "x,y\n1.5e0,ok\n");
    }

    #[test]
    fn sidecar_appends_suffix() {
        assert_eq!(sidecar(Path::new("/tmp/a.csv")), PathBuf::from("/tmp/a.csv.meta.json"));
    }

    #[test]
    fn metadata_lists_every_provenance() {
        let m = RunMetadata::new("spectrum");
        assert_eq!(m.provenance_counts.len(), 3);
        assert!(m.provenance_counts.values().all(|&c| c == 0));
    }
}
