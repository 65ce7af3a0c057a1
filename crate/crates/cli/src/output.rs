//! JSON/CSV report plumbing. Every number that is not a count or an index
//! is tagged: `{"exact": "n/d"}` or `{"approx": "...", "sig_digits": n}`.

use std::io::Write;
use std::path::Path;

use betadim::scalar::{decimal_string, rational_string};
use betadim::{FieldElt, Rational};
use clap::ValueEnum;
use serde_json::{json, Map, Value};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Significant digits an `f64` can honestly carry.
const F64_DIGITS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy)]
pub struct Numbers {
    pub precision: usize,
}

impl Numbers {
    pub fn exact(&self, r: &Rational) -> Value {
        json!({ "exact": rational_string(r) })
    }

    pub fn exact_int(&self, n: impl ToString) -> Value {
        json!({ "exact": n.to_string() })
    }

    pub fn approx(&self, x: f64) -> Value {
        let sig = self.precision.min(F64_DIGITS);
        json!({ "approx": decimal_string(x, sig), "sig_digits": sig })
    }

    pub fn approx_opt(&self, x: Option<f64>) -> Value {
        x.map_or(Value::Null, |x| self.approx(x))
    }

    pub fn float_str(&self, x: f64) -> String {
        decimal_string(x, self.precision.min(F64_DIGITS))
    }

    /// Decimal at the full requested precision plus the exact coordinates
    /// in the power basis of β.
    pub fn field_elt(&self, x: &FieldElt) -> Result<Value, CliError> {
        let coeffs: Vec<String> = x.coeffs().iter().map(rational_string).collect();
        Ok(json!({
            "approx": x.to_decimal(self.precision)?,
            "sig_digits": self.precision,
            "exact_coeffs": coeffs,
        }))
    }

    pub fn field_str(&self, x: &FieldElt) -> Result<String, CliError> {
        Ok(x.to_decimal(self.precision)?)
    }
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub struct Report {
    pub command: &'static str,
    pub body: Map<String, Value>,
    pub table: Table,
}

/// Run metadata shared by every artifact.
pub struct Meta {
    pub seed: u64,
    pub precision: usize,
}

impl Report {
    pub fn render(&self, meta: &Meta, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Json => {
                let mut top = Map::new();
                top.insert("schema_version".into(), json!(SCHEMA_VERSION));
                top.insert("command".into(), json!(self.command));
                top.insert("seed".into(), json!(meta.seed));
                top.insert("precision".into(), json!(meta.precision));
                for (k, v) in &self.body {
                    top.insert(k.clone(), v.clone());
                }
                let mut out = serde_json::to_vec_pretty(&Value::Object(top)).map_err(|e| CliError::Io(e.to_string()))?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut out = format!(
                    "# schema_version={SCHEMA_VERSION} command={} seed={} precision={}\n",
                    self.command, meta.seed, meta.precision
                )
                .into_bytes();
                {
                    let mut w = csv::Writer::from_writer(&mut out);
                    w.write_record(&self.table.header)?;
                    for r in &self.table.rows {
                        w.write_record(r)?;
                    }
                    w.flush()?;
                }
                Ok(out)
            }
        }
    }
}

pub fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}
