//! The JSON envelope shared by every command, with deterministic formatting.

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::closed_form::KickSpec;

/// Significant digits kept for every number in emitted JSON.
pub const SIG_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub generated_unix: u64,
}

impl Meta {
    pub fn now() -> Self {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Self { tool: "slcert".into(), version: env!("CARGO_PKG_VERSION").into(), generated_unix: secs }
    }
}

/// Field order is part of the format.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub kind: String,
    pub verdict: String,
    pub r0: Option<f64>,
    pub r1: Option<f64>,
    pub diameter_bound: Option<f64>,
    pub lambda: Option<f64>,
    pub spec: Option<KickSpec>,
    pub grid_size: Option<usize>,
    pub tolerances: Value,
    pub discrepancy_notes: Vec<String>,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

impl Envelope {
    pub fn new(kind: &str, verdict: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            verdict: verdict.into(),
            r0: None,
            r1: None,
            diameter_bound: None,
            lambda: None,
            spec: None,
            grid_size: None,
            tolerances: Value::Object(Map::new()),
            discrepancy_notes: Vec::new(),
            details: Value::Null,
            meta: None,
        }
    }

    pub fn with_details<T: Serialize>(mut self, details: &T) -> Self {
        self.details = serde_json::to_value(details).expect("report types serialize");
        self
    }

    /// Pretty JSON with numbers rounded to [`SIG_DIGITS`] and a trailing newline.
    pub fn to_json(&self) -> String {
        let v = round_value(serde_json::to_value(self).expect("envelope serializes"));
        let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
        s.push('\n');
        s
    }
}

/// Round to `SIG_DIGITS` significant digits; integers pass through.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(f64::NAN));
            Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, x)| (k, round_value(x))).collect()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.860_333_589_019_379_7), 0.860_333_589_019);
        assert_eq!(round_sig(-1234.567_890_123_45), -1234.567_890_12);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn field_order_is_stable() {
        let e = Envelope::new("probe", "ok");
        let s = e.to_json();
        let keys: Vec<usize> = ["\"kind\"", "\"verdict\"", "\"r0\"", "\"lambda\"", "\"details\""]
            .iter()
            .map(|k| s.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(!s.contains("meta"));
    }
}
