//! Report serialization. JSON is canonical; CSV is for table-shaped output.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{HarnessError, Result};
use crate::estimate::Level;
use crate::verdict::Check;

pub const SCHEMA: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub seed: u64,
    pub trials: u64,
    pub level: Level,
    pub checks: Vec<Check>,
    pub data: Value,
    /// Rows for CSV output.
    #[serde(skip)]
    pub table: Option<Vec<Value>>,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: u64, trials: u64, level: Level) -> Self {
        Report {
            schema: SCHEMA,
            command: command.into(),
            seed,
            trials,
            level,
            checks: Vec::new(),
            data: Value::Null,
            table: None,
        }
    }

    pub fn with_data(mut self, data: impl Serialize) -> Result<Self> {
        self.data = serde_json::to_value(data)?;
        Ok(self)
    }

    pub fn with_table<T: Serialize>(mut self, rows: &[T]) -> Result<Self> {
        self.table = Some(
            rows.iter()
                .map(serde_json::to_value)
                .collect::<std::result::Result<_, _>>()?,
        );
        Ok(self)
    }

    pub fn violations(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed()).count()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// The table rows, or one row per check when there is no table.
    pub fn to_csv(&self) -> Result<String> {
        let rows: Vec<Value> = match &self.table {
            Some(t) => t.clone(),
            None => self
                .checks
                .iter()
                .map(|c| {
                    let mut v = serde_json::to_value(c)?;
                    if let Value::Object(m) = &mut v {
                        m.remove("estimate");
                    }
                    Ok(v)
                })
                .collect::<Result<_>>()?,
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<String> = match rows.first() {
            Some(Value::Object(m)) => m.keys().cloned().collect(),
            _ => Vec::new(),
        };
        if !header.is_empty() {
            w.write_record(&header)?;
        }
        for row in &rows {
            let rec: Vec<String> = header
                .iter()
                .map(|k| match &row[k] {
                    Value::String(s) => s.clone(),
                    Value::Null => String::new(),
                    other => other.to_string(),
                })
                .collect();
            w.write_record(&rec)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| HarnessError::InvalidArgument(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    /// Write to `out`, or stdout when `None`.
    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<()> {
        let text = self.render(format)?;
        match out {
            Some(p) => std::fs::write(p, text).map_err(|source| HarnessError::Io {
                path: p.to_path_buf(),
                source,
            }),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|source| HarnessError::Io {
                        path: "<stdout>".into(),
                        source,
                    })
            }
        }
    }
}
