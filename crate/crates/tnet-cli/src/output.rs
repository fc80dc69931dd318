//! Experiment results and the JSON writer.
//!
//! Objects are written with sorted keys and floats with 17 significant
//! digits, so equal results always print identically.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use tnet::tensor::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub outputs: Map<String, Value>,
    /// Wall-clock milliseconds per phase.
    pub timings: BTreeMap<String, f64>,
}

impl ExperimentResult {
    pub fn new(command: &str) -> Self {
        ExperimentResult {
            command: command.to_string(),
            inputs: Map::new(),
            outputs: Map::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, key: &str, v: impl Into<Value>) {
        self.inputs.insert(key.to_string(), v.into());
    }

    pub fn output(&mut self, key: &str, v: impl Into<Value>) {
        self.outputs.insert(key.to_string(), v.into());
    }

    pub fn to_json(&self) -> String {
        to_json_string(&serde_json::to_value(self).expect("serializable result"))
    }
}

pub fn complex(z: C64) -> Value {
    Value::Array(vec![float(z.re), float(z.im)])
}

pub fn complex_list(zs: &[C64]) -> Value {
    Value::Array(zs.iter().map(|&z| complex(z)).collect())
}

/// A float value; non-finite numbers become `null`.
pub fn float(x: f64) -> Value {
    Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn floats(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| float(x)).collect())
}

fn write_number(n: &Number, out: &mut String) {
    if n.is_i64() || n.is_u64() {
        write!(out, "{}", n).expect("write to string");
    } else {
        let x = n.as_f64().expect("finite float");
        if x == 0.0 {
            out.push_str(if x.is_sign_negative() { "-0.0" } else { "0.0" });
        } else {
            write!(out, "{:.16e}", x).expect("write to string");
        }
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |k: usize, out: &mut String| out.extend(std::iter::repeat(' ').take(2 * k));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(n, out),
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(items) => {
            // short arrays of scalars stay on one line
            let flat = items.iter().all(|x| !x.is_object() && !x.as_array().map_or(false, |a| a.iter().any(|y| y.is_array() || y.is_object())));
            if items.is_empty() {
                out.push_str("[]");
            } else if flat {
                out.push('[');
                for (k, x) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(x, indent, out);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (k, x) in items.iter().enumerate() {
                    pad(indent + 1, out);
                    write_value(x, indent + 1, out);
                    out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
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
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                pad(indent + 1, out);
                out.push_str(&serde_json::to_string(key).expect("key"));
                out.push_str(": ");
                write_value(&map[*key], indent + 1, out);
                out.push_str(if k + 1 < keys.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push('}');
        }
    }
}

/// Pretty JSON with sorted keys and 17-significant-digit floats.
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}
