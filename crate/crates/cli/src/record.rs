//! The JSON run record and CSV profile output.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

/// Significant digits kept in structured output.
pub const DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub version: String,
    /// Wall-clock seconds.
    pub timing: f64,
}

impl RunRecord {
    pub fn new(command: &str, inputs: Value, outputs: Value, timing: f64) -> Self {
        Self {
            command: command.to_owned(),
            inputs: round_value(inputs),
            outputs: round_value(outputs),
            version: format!("scatlen {}", env!("CARGO_PKG_VERSION")),
            timing: round(timing),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialise")
    }
}

/// Rounds to [`DIGITS`] significant digits.
pub fn round(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", DIGITS - 1, x).parse().expect("formatted float parses")
}

/// Rounds every float in a JSON tree.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("checked");
            Number::from_f64(round(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// A float as JSON; non-finite values, which JSON numbers cannot hold, are
/// spelled `"inf"`, `"-inf"` or `"nan"`.
pub fn num(x: f64) -> Value {
    match Number::from_f64(round(x)) {
        Some(n) => Value::Number(n),
        None if x.is_nan() => Value::from("nan"),
        None if x > 0.0 => Value::from("inf"),
        None => Value::from("-inf"),
    }
}

/// Writes columns of equal length as CSV with a header row. Floats use the
/// shortest representation that parses back to the same bits.
pub fn write_columns(path: &Path, header: &[&str], columns: &[&[f64]]) -> csv::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    let rows = columns.first().map_or(0, |c| c.len());
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| c[i].to_string()))?;
    }
    w.flush()?;
    Ok(())
}
