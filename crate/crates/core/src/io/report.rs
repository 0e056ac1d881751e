//! Structured reports with canonical, byte-reproducible serialization.
//!
//! Object keys are sorted, integers print as integers, and every other number
//! prints with 17 significant digits (trailing zeros trimmed), which round
//! trips any `f64` exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Validation,
    Build,
    States,
    Born,
    Gleason,
    Simulation,
    Bell,
    Reduce,
    Gcs,
}

/// A rectangular table, exported as CSV by `--format csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Metadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_hash: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realization_mode: Option<String>,
    pub tool: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub kind: ReportKind,
    pub payload: Map<String, Value>,
    pub metadata: Metadata,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(kind: ReportKind) -> Self {
        Report {
            kind,
            payload: Map::new(),
            metadata: Metadata {
                tool: format!("epiq {}", env!("CARGO_PKG_VERSION")),
                ..Metadata::default()
            },
            tables: Vec::new(),
        }
    }

    /// Adds a payload entry; any `Serialize` value is accepted.
    pub fn insert(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.payload.insert(key.to_string(), v);
        self
    }

    pub fn table(&mut self, table: Table) -> &mut Self {
        self.tables.push(table);
        self
    }

    pub fn to_value(&self) -> Value {
        let mut root = Map::new();
        root.insert("kind".into(), serde_json::to_value(self.kind).expect("kind serializes"));
        root.insert("metadata".into(), serde_json::to_value(&self.metadata).expect("metadata serializes"));
        root.insert("payload".into(), Value::Object(self.payload.clone()));
        if !self.tables.is_empty() {
            root.insert("tables".into(), serde_json::to_value(&self.tables).expect("tables serialize"));
        }
        Value::Object(root)
    }

    pub fn to_canonical_json(&self) -> String {
        let mut out = String::new();
        write_value(&self.to_value(), 0, &mut out);
        out.push('\n');
        out
    }

    /// All tables as CSV; multiple tables are separated by a blank line and
    /// introduced by a `# name` line.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            if self.tables.len() > 1 {
                let _ = writeln!(out, "# {}", t.name);
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&t.header).map_err(csv_err)?;
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(cell_text).collect();
                w.write_record(&cells).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
            out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
        }
        Ok(out)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("csv: {e}"))
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(_) => {
            let mut s = String::new();
            write_value(v, 0, &mut s);
            s
        }
        Value::Null => String::new(),
        other => {
            let mut s = String::new();
            write_value(other, 0, &mut s);
            s.replace('\n', " ")
        }
    }
}

/// 17 significant digits, trailing zeros trimmed, positional notation for
/// decimal exponents in [-5, 17).
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return "0.0".into();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let mut s = String::new();
    if negative {
        s.push('-');
    }
    if (-5..17).contains(&exp) {
        if exp >= 0 {
            let split = (exp + 1) as usize;
            let int_part = &digits[..split];
            let frac = digits[split..].trim_end_matches('0');
            s.push_str(int_part);
            s.push('.');
            s.push_str(if frac.is_empty() { "0" } else { frac });
        } else {
            s.push_str("0.");
            for _ in 0..(-exp - 1) {
                s.push('0');
            }
            s.push_str(digits.trim_end_matches('0'));
        }
    } else {
        let frac = digits[1..].trim_end_matches('0');
        s.push_str(&digits[..1]);
        s.push('.');
        s.push_str(if frac.is_empty() { "0" } else { frac });
        let _ = write!(s, "e{exp}");
    }
    s
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
            } else if items.iter().all(|x| matches!(x, Value::Number(_) | Value::Bool(_) | Value::Null | Value::String(_))) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(x, indent, out);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, x) in items.iter().enumerate() {
                    pad(indent + 1, out);
                    write_value(x, indent + 1, out);
                    if i + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                pad(indent, out);
                out.push(']');
            }
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let sorted: BTreeMap<&String, &Value> = map.iter().collect();
            out.push_str("{\n");
            for (i, (k, x)) in sorted.iter().enumerate() {
                pad(indent + 1, out);
                out.push_str(&serde_json::to_string(k).expect("key serializes"));
                out.push_str(": ");
                write_value(x, indent + 1, out);
                if i + 1 < sorted.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(indent, out);
            out.push('}');
        }
    }
}

fn pad(indent: usize, out: &mut String) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// Complex entries as `[re, im]` pairs, row-major.
pub fn complex_matrix_value<T: crate::scalar::Real>(m: &crate::linalg::CMatrix<T>) -> Value {
    use crate::scalar::to_f64;
    Value::Array(
        (0..m.nrows())
            .map(|r| {
                Value::Array(
                    (0..m.ncols())
                        .map(|c| serde_json::json!([to_f64(m[(r, c)].re), to_f64(m[(r, c)].im)]))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn complex_vector_value<T: crate::scalar::Real>(v: &crate::linalg::CVector<T>) -> Value {
    use crate::scalar::to_f64;
    Value::Array(v.iter().map(|z| serde_json::json!([to_f64(z.re), to_f64(z.im)])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_use_seventeen_significant_digits() {
        assert_eq!(format_float(2.0 * 2f64.sqrt()), "2.8284271247461903");
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(1.0), "1.0");
        assert_eq!(format_float(-0.25), "-0.25");
        assert_eq!(format_float(1e-7), "9.9999999999999995e-8");
        assert_eq!(format_float(2e20), "2.0e20");
        assert_eq!(format_float(0.1), "0.10000000000000001");
        assert_eq!(format_float(123456.0), "123456.0");
        assert_eq!(format_float(0.0), "0.0");
    }

    #[test]
    fn formatted_floats_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, 2f64.sqrt(), 1e-300, 6.02214076e23, -7.5e-6, 0.58] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn keys_are_sorted() {
        let mut r = Report::new(ReportKind::Bell);
        r.insert("zeta", 1).insert("alpha", vec![0.5, 0.25]);
        let text = r.to_canonical_json();
        let a = text.find("\"alpha\"").unwrap();
        let z = text.find("\"zeta\"").unwrap();
        assert!(a < z);
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["payload"]["alpha"][1], serde_json::json!(0.25));
    }
}
