//! Run reports: an ordered key/value tree printed either as `path = value`
//! lines or as JSON.

use serde_json::{Map, Value};

#[derive(Debug, Default)]
pub struct RunReport {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub results: Map<String, Value>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self { command: command.to_string(), ..Default::default() }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn to_value(&self) -> Value {
        let mut root = Map::new();
        root.insert("command".into(), self.command.clone().into());
        root.insert("inputs".into(), Value::Object(self.inputs.clone()));
        root.insert("results".into(), Value::Object(self.results.clone()));
        root.insert("warnings".into(), self.warnings.clone().into());
        Value::Object(root)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("report values are always serializable")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Value::Object(root) = self.to_value() {
            for (k, v) in root {
                walk(&k, &v, &mut out);
            }
        }
        out
    }
}

fn walk(path: &str, value: &Value, out: &mut String) {
    match value {
        Value::Object(m) if !m.is_empty() => {
            for (k, v) in m {
                walk(&format!("{path}.{k}"), v, out);
            }
        }
        Value::Array(a) if !a.is_empty() => {
            for (i, v) in a.iter().enumerate() {
                walk(&format!("{path}[{i}]"), v, out);
            }
        }
        _ => {
            out.push_str(path);
            out.push_str(" = ");
            out.push_str(&scalar(value));
            out.push('\n');
        }
    }
}

fn scalar(value: &Value) -> String {
    match value {
        Value::Number(n) if n.is_f64() => sig8(n.as_f64().unwrap_or(f64::NAN)),
        Value::Object(_) => "{}".into(),
        Value::Array(_) => "[]".into(),
        other => other.to_string(),
    }
}

/// Eight significant digits; scientific notation outside `[1e-4, 1e9)`.
pub fn sig8(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let e = v.abs().log10().floor() as i32;
    if (-4..9).contains(&e) {
        format!("{:.*}", (7 - e).max(0) as usize, v)
    } else {
        format!("{v:.7e}")
    }
}

/// Float-valued JSON number; non-finite values become null.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn object<'a>(pairs: impl IntoIterator<Item = (&'a str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}
