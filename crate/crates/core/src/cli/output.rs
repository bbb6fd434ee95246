//! Rendering of result records as JSON lines, CSV or plain text.

use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Writes records one at a time; in CSV mode the header is taken from the
/// first record and repeated only when the column set changes.
pub struct Emitter {
    format: Format,
    header: Option<Vec<String>>,
}

impl Emitter {
    pub fn new(format: Format) -> Self {
        Emitter { format, header: None }
    }

    pub fn emit(&mut self, out: &mut dyn Write, envelope: &Value, result: &Value) -> Result<()> {
        match self.format {
            Format::Json => {
                let line = serde_json::to_string(envelope).map_err(io)?;
                writeln!(out, "{line}").map_err(io)
            }
            Format::Text => {
                writeln!(out, "# {} ({})", envelope["command"].as_str().unwrap_or(""), envelope["format_version"].as_str().unwrap_or("")).map_err(io)?;
                match result {
                    Value::Object(map) => {
                        for (k, v) in map {
                            writeln!(out, "{k}: {}", cell(v)).map_err(io)?;
                        }
                    }
                    other => writeln!(out, "{}", cell(other)).map_err(io)?,
                }
                Ok(())
            }
            Format::Csv => {
                let (keys, values): (Vec<String>, Vec<String>) = match result {
                    Value::Object(map) => map.iter().map(|(k, v)| (k.clone(), cell(v))).unzip(),
                    other => (vec!["value".into()], vec![cell(other)]),
                };
                let mut w = csv::Writer::from_writer(Vec::new());
                if self.header.as_ref() != Some(&keys) {
                    w.write_record(&keys).map_err(io)?;
                    self.header = Some(keys);
                }
                w.write_record(&values).map_err(io)?;
                let bytes = w.into_inner().map_err(io)?;
                out.write_all(&bytes).map_err(io)
            }
        }
    }
}
