use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Everything a command emits. `records` are flat objects, one CSV row each.
/// Fields are in alphabetical order so that every level of the JSON text is
/// sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub command: String,
    pub config: Value,
    pub records: Vec<Value>,
    pub summary: Value,
}

impl Document {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Invalid(format!("not an hmp document: {e}")))
    }

    /// A comment line carrying the command and config, then the records.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let header: Vec<String> = match self.records.first() {
            Some(Value::Object(m)) => m.keys().cloned().collect(),
            _ => Vec::new(),
        };
        let mut out = Vec::new();
        let meta = serde_json::json!({ "command": self.command, "config": self.config });
        writeln!(out, "# {meta}").expect("write to memory");
        let mut w = csv::Writer::from_writer(out);
        if !header.is_empty() {
            w.write_record(&header).map_err(csv_error)?;
        }
        for r in &self.records {
            let row = r
                .as_object()
                .ok_or_else(|| CliError::Other("record is not an object".into()))?;
            w.write_record(
                header
                    .iter()
                    .map(|k| cell(row.get(k).unwrap_or(&Value::Null))),
            )
            .map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("utf-8"))
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
        }
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Other(format!("csv: {e}"))
}

/// Numbers and booleans print as in JSON, strings bare, anything nested as
/// compact JSON.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(
        pairs
            .into_iter()
            .map(|(k, v)| (k.to_owned(), v))
            .collect::<Map<_, _>>(),
    )
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}
