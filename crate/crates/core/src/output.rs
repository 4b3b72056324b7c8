//! Deterministic table emission for the CLI: CSV with a mandatory header
//! row, or a JSON array of row objects. Floats are printed with 17
//! significant digits so output round-trips to the exact double.

use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(name: &str) -> Result<Format> {
        match name.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    UInt(u64),
    Int(i64),
    Float(f64),
    Text(String),
    /// Arbitrary-precision count; rendered as a decimal string in both
    /// formats so no reader silently rounds it.
    Count(BigUint),
}

impl From<u64> for Value {
    fn from(v: u64) -> Value {
        Value::UInt(v)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Value {
        Value::Int(v)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Value {
        Value::Float(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Value {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Value {
        Value::Text(v)
    }
}

impl From<BigUint> for Value {
    fn from(v: BigUint) -> Value {
        Value::Count(v)
    }
}

/// 17 significant digits; exact round trip for every finite double.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') || field.contains('\r') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::UInt(v) => v.to_string(),
            Value::Int(v) => v.to_string(),
            Value::Float(v) => fmt_float(*v),
            Value::Text(v) => csv_escape(v),
            Value::Count(v) => v.to_string(),
        }
    }

    fn json(&self) -> String {
        match self {
            Value::UInt(v) => v.to_string(),
            Value::Int(v) => v.to_string(),
            Value::Float(v) => {
                if v.is_finite() {
                    fmt_float(*v)
                } else {
                    format!("\"{v}\"")
                }
            }
            Value::Text(v) => format!("\"{}\"", json_escape(v)),
            Value::Count(v) => format!("\"{v}\""),
        }
    }
}

/// A typed table with fixed columns.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl OutputTable {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(columns: I) -> OutputTable {
        OutputTable { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push_row<I: IntoIterator<Item = Value>>(&mut self, row: I) -> Result<()> {
        let row: Vec<Value> = row.into_iter().collect();
        if row.len() != self.columns.len() {
            return Err(Error::InvalidArgument(format!(
                "row has {} values for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = String::new();
                out.push_str(
                    &self.columns.iter().map(|c| csv_escape(c)).collect::<Vec<_>>().join(","),
                );
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.iter().map(Value::csv).collect::<Vec<_>>().join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let mut out = String::from("[\n");
                for (i, row) in self.rows.iter().enumerate() {
                    out.push_str("  {");
                    for (j, (col, val)) in self.columns.iter().zip(row).enumerate() {
                        if j > 0 {
                            out.push_str(", ");
                        }
                        let _ = write!(out, "\"{}\": {}", json_escape(col), val.json());
                    }
                    out.push('}');
                    if i + 1 < self.rows.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str("]\n");
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_round_trips() {
        for x in [0.1, 1.0 / 3.0, 7.0, 1e-300, std::f64::consts::PI, 0.75f64.sqrt()] {
            let printed = fmt_float(x);
            let back: f64 = printed.parse().unwrap();
            assert_eq!(back, x, "{printed}");
        }
    }

    #[test]
    fn csv_render() {
        let mut t = OutputTable::new(["n", "value", "note"]);
        t.push_row([Value::UInt(1), Value::Float(0.5), Value::from("plain")]).unwrap();
        t.push_row([Value::UInt(2), Value::Float(1.0), Value::from("with, comma")]).unwrap();
        let csv = t.render(Format::Csv);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "n,value,note");
        assert_eq!(lines.next().unwrap(), "1,5.0000000000000000e-1,plain");
        assert_eq!(lines.next().unwrap(), "2,1.0000000000000000e0,\"with, comma\"");
    }

    #[test]
    fn json_render() {
        let mut t = OutputTable::new(["n", "count"]);
        t.push_row([Value::UInt(1), Value::Count(BigUint::from(3u32).pow(200))]).unwrap();
        let json = t.render(Format::Json);
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed[0]["n"], 1);
        assert_eq!(parsed[0]["count"].as_str().unwrap(), BigUint::from(3u32).pow(200).to_string());
    }

    #[test]
    fn ragged_rows_rejected() {
        let mut t = OutputTable::new(["a", "b"]);
        assert!(t.push_row([Value::UInt(1)]).is_err());
    }
}
