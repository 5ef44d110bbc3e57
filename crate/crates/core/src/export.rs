//! CSV and JSON writers. Every file starts with the same metadata: tool
//! version, schema version, a hash of the producing configuration and the
//! seed.
//!
//! CSV files carry the metadata as leading `# key=value` lines; JSON files
//! wrap the payload as `{"metadata": ..., "data": ...}`.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bumped whenever a column or field name changes.
pub const SCHEMA_VERSION: u32 = 1;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub tool_version: String,
    pub schema_version: u32,
    /// Which table this is, e.g. `checkpoint_stats`.
    pub kind: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    /// Free-form extras such as the parameters of this table.
    #[serde(default)]
    pub extra: BTreeMap<String, String>,
}

impl Metadata {
    pub fn new(kind: &str, config_hash: &str, seed: Option<u64>) -> Self {
        Self {
            tool: "erw".into(),
            tool_version: TOOL_VERSION.into(),
            schema_version: SCHEMA_VERSION,
            kind: kind.into(),
            config_hash: config_hash.into(),
            seed,
            extra: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.extra.insert(key.into(), value.to_string());
        self
    }

    fn lines(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("tool".to_string(), self.tool.clone()),
            ("tool_version".into(), self.tool_version.clone()),
            ("schema_version".into(), self.schema_version.to_string()),
            ("kind".into(), self.kind.clone()),
            ("config_hash".into(), self.config_hash.clone()),
            ("seed".into(), self.seed.map_or_else(|| "none".into(), |s| s.to_string())),
        ];
        out.extend(self.extra.iter().map(|(k, v)| (k.clone(), v.clone())));
        out
    }
}

fn io(err: impl std::fmt::Display) -> Error {
    Error::Io(err.to_string())
}

/// Metadata comment lines, then a header row and one row per record.
pub fn write_csv<W: Write, T: Serialize>(mut w: W, meta: &Metadata, rows: &[T]) -> Result<()> {
    for (k, v) in meta.lines() {
        writeln!(w, "# {k}={v}").map_err(io)?;
    }
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row).map_err(io)?;
    }
    out.flush().map_err(io)
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    metadata: &'a Metadata,
    data: &'a T,
}

pub fn write_json<W: Write, T: Serialize>(mut w: W, meta: &Metadata, data: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, &Envelope { metadata: meta, data }).map_err(io)?;
    writeln!(w).map_err(io)
}

/// Splits a CSV file produced by [`write_csv`] into its metadata pairs and
/// the remaining CSV text.
pub fn split_csv_metadata(text: &str) -> (Vec<(String, String)>, &str) {
    let mut meta = Vec::new();
    let mut rest = text;
    while let Some(line) = rest.strip_prefix("# ") {
        let (head, tail) = line.split_once('\n').unwrap_or((line, ""));
        if let Some((k, v)) = head.split_once('=') {
            meta.push((k.to_string(), v.to_string()));
        }
        rest = tail;
    }
    (meta, rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        n: u64,
        value: f64,
    }

    #[test]
    fn csv_has_metadata_and_header() {
        let meta = Metadata::new("demo", "abc123", Some(42)).with("p", 0.5);
        let mut buf = Vec::new();
        write_csv(&mut buf, &meta, &[Row { n: 1, value: 0.25 }, Row { n: 2, value: 1e-300 }]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let (pairs, body) = split_csv_metadata(&text);
        assert!(pairs.contains(&("seed".into(), "42".into())));
        assert!(pairs.contains(&("p".into(), "0.5".into())));
        assert!(pairs.contains(&("schema_version".into(), SCHEMA_VERSION.to_string())));
        assert_eq!(body, "n,value\n1,0.25\n2,1e-300\n");
    }

    #[test]
    fn json_envelope() {
        let meta = Metadata::new("demo", "h", None);
        let mut buf = Vec::new();
        write_json(&mut buf, &meta, &vec![1, 2, 3]).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["metadata"]["kind"], "demo");
        assert_eq!(v["metadata"]["seed"], serde_json::Value::Null);
        assert_eq!(v["data"][2], 3);
    }
}
