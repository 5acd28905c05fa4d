use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA: &str = "essmin-report/1";

/// Relative slack used by every floating-point comparison in a report.
pub const COMPARISON_TOLERANCE: f64 = 1e-12;

/// Envelope shared by all commands. Keys are emitted in sorted order and
/// floats in shortest round-trip form, so equal inputs give equal bytes.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub status: Status,
    pub parameters: BTreeMap<String, Value>,
    pub tolerances: BTreeMap<String, Value>,
    pub result: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Refused,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut tolerances = BTreeMap::new();
        tolerances.insert("comparison".into(), json!(COMPARISON_TOLERANCE));
        Report {
            schema: SCHEMA,
            command: command.into(),
            status: Status::Ok,
            parameters: BTreeMap::new(),
            tolerances,
            result: Value::Null,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(key.into(), to_value(value));
        self
    }

    pub fn tolerance(mut self, key: &str, value: f64) -> Self {
        self.tolerances.insert(key.into(), json!(value));
        self
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
        s.push('\n');
        s
    }
}

/// `serde_json::to_value` for types whose serialisation cannot fail.
pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialise")
}

/// An `(x, y)` series ready for plotting.
pub fn series<X: Serialize, Y: Serialize>(name: &str, points: impl IntoIterator<Item = (X, Y)>) -> Value {
    let (x, y): (Vec<Value>, Vec<Value>) = points.into_iter().map(|(a, b)| (to_value(a), to_value(b))).unzip();
    json!({ "name": name, "x": x, "y": y })
}
