//! Named metric values with CSV serialization, the common currency of every
//! evaluation command.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Ordered list of named metric values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub name: String,
    pub values: Vec<(String, f64)>,
}

impl MetricsReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            values: Vec::new(),
        }
    }

    pub fn push(&mut self, key: impl Into<String>, value: f64) {
        self.values.push((key.into(), value));
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
    }

    /// Two-column `metric,value` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,value\n");
        for (k, v) in &self.values {
            let _ = writeln!(out, "{k},{v}");
        }
        out
    }
}

/// Writes a CSV table given a header and formatted rows.
pub fn write_csv(
    path: &Path,
    header: &str,
    rows: impl IntoIterator<Item = String>,
) -> std::io::Result<()> {
    let mut out = String::with_capacity(256);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    std::fs::write(path, out)
}
