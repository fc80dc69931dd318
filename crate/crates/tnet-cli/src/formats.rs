//! JSON file formats: tensor networks and decay rule sets.
//!
//! Network files store every tensor flat in column-major order with complex
//! entries as `[re, im]`, matching the library storage bit for bit.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use tnet::linalg::{c, Mat};
use tnet::mpo::{DecayRule, DecayRuleSet, OpSpec};
use tnet::netgraph::{NetError, TensorNetwork};
use tnet::tensor::{DenseTensor, C64};

use crate::output::to_json_string;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("inconsistent bonds: {0}")]
    InconsistentBonds(String),
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|e| FormatError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))
}

// networks

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    tensors: Vec<TensorEntry>,
    #[serde(default)]
    bonds: Vec<[(String, usize); 2]>,
    #[serde(default)]
    open_legs: Vec<(String, usize)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorEntry {
    id: String,
    shape: Vec<usize>,
    data: Vec<[f64; 2]>,
}

pub fn parse_network_str(text: &str) -> Result<TensorNetwork, FormatError> {
    let file: NetworkFile = parse_json(text)?;
    let mut net = TensorNetwork::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    for (k, t) in file.tensors.into_iter().enumerate() {
        let expected: usize = t.shape.iter().product();
        if t.data.len() != expected {
            return Err(FormatError::Parse(format!(
                "tensors[{}].data: shape {:?} needs {} entries, found {}",
                k,
                t.shape,
                expected,
                t.data.len()
            )));
        }
        let data = t.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        let tensor = DenseTensor::new(t.shape, data).map_err(|e| FormatError::Parse(format!("tensors[{}]: {}", k, e)))?;
        if ids.insert(t.id.clone(), k).is_some() {
            return Err(FormatError::Parse(format!("tensors[{}].id: duplicate id {:?}", k, t.id)));
        }
        net.add_node(t.id, tensor);
    }
    let lookup = |field: String, id: &str| ids.get(id).copied().ok_or_else(|| FormatError::Parse(format!("{}: unknown tensor id {:?}", field, id)));
    for (k, [(a, la), (b, lb)]) in file.bonds.iter().enumerate() {
        let na = lookup(format!("bonds[{}][0]", k), a)?;
        let nb = lookup(format!("bonds[{}][1]", k), b)?;
        net.bond(na, *la, nb, *lb);
    }
    for (k, (id, leg)) in file.open_legs.iter().enumerate() {
        let n = lookup(format!("open_legs[{}]", k), id)?;
        net.open_legs.push((n, *leg));
    }
    net.validate().map_err(|e| match e {
        NetError::InconsistentBonds(m) => FormatError::InconsistentBonds(m),
        other => FormatError::Parse(other.to_string()),
    })?;
    Ok(net)
}

pub fn parse_network_file(path: &Path) -> Result<TensorNetwork, FormatError> {
    parse_network_str(&read(path)?)
}

pub fn network_to_json(net: &TensorNetwork) -> String {
    let name = |n: usize| net.nodes[n].name.clone();
    let file = NetworkFile {
        tensors: net
            .nodes
            .iter()
            .map(|n| TensorEntry {
                id: n.name.clone(),
                shape: n.tensor.shape().to_vec(),
                data: n.tensor.data().iter().map(|z| [z.re, z.im]).collect(),
            })
            .collect(),
        bonds: net.bonds.iter().map(|&((a, la), (b, lb))| [(name(a), la), (name(b), lb)]).collect(),
        open_legs: net.open_legs.iter().map(|&(a, l)| (name(a), l)).collect(),
    };
    to_json_string(&serde_json::to_value(file).expect("serializable network"))
}

// decay rule sets

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecayFile {
    dimension: usize,
    indices: Vec<String>,
    vacuum: String,
    particle: String,
    #[serde(default = "yes")]
    auto_stable: bool,
    rules: Vec<RuleEntry>,
}

fn yes() -> bool {
    true
}

fn unit_coef() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleEntry {
    left: String,
    right: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    up: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    down: Option<String>,
    op: Value,
    #[serde(default = "unit_coef")]
    coef: [f64; 2],
}

fn complex_entry(v: &Value) -> Option<C64> {
    match v {
        Value::Number(x) => x.as_f64().map(c),
        Value::Array(p) if p.len() == 2 => Some(C64::new(p[0].as_f64()?, p[1].as_f64()?)),
        _ => None,
    }
}

fn parse_op(v: &Value, field: &str) -> Result<OpSpec, FormatError> {
    match v {
        Value::String(s) => match s.as_str() {
            "I" | "X" | "Y" | "Z" => Ok(OpSpec::Named(s.chars().next().expect("non-empty"))),
            other => Err(FormatError::Parse(format!("{}: unknown operator {:?}", field, other))),
        },
        Value::Array(rows) => {
            let n = rows.len();
            let mut m = Mat::zeros(n, n);
            for (i, row) in rows.iter().enumerate() {
                let row = row.as_array().filter(|r| r.len() == n).ok_or_else(|| FormatError::Parse(format!("{}[{}]: expected a row of {} entries", field, i, n)))?;
                for (j, e) in row.iter().enumerate() {
                    m[(i, j)] = complex_entry(e).ok_or_else(|| FormatError::Parse(format!("{}[{}][{}]: expected a number or [re, im]", field, i, j)))?;
                }
            }
            if n == 0 {
                return Err(FormatError::Parse(format!("{}: empty matrix", field)));
            }
            Ok(OpSpec::Matrix(m))
        }
        _ => Err(FormatError::Parse(format!("{}: expected an operator name or a matrix", field))),
    }
}

pub fn parse_decay_str(text: &str) -> Result<DecayRuleSet, FormatError> {
    let file: DecayFile = parse_json(text)?;
    let mut rules = Vec::new();
    for (k, r) in file.rules.into_iter().enumerate() {
        rules.push(DecayRule {
            op: parse_op(&r.op, &format!("rules[{}].op", k))?,
            left: r.left,
            right: r.right,
            up: r.up,
            down: r.down,
            coef: C64::new(r.coef[0], r.coef[1]),
        });
    }
    let set = DecayRuleSet {
        dimension: file.dimension,
        index_names: file.indices,
        vacuum: file.vacuum,
        particle: file.particle,
        rules,
        auto_stable: file.auto_stable,
    };
    set.validate().map_err(|e| FormatError::InvalidRule(e.to_string()))?;
    Ok(set)
}

pub fn parse_decay_file(path: &Path) -> Result<DecayRuleSet, FormatError> {
    parse_decay_str(&read(path)?)
}

pub fn decay_to_json(set: &DecayRuleSet) -> String {
    let op = |o: &OpSpec| match o {
        OpSpec::Named(ch) => Value::String(ch.to_string()),
        OpSpec::Matrix(m) => Value::Array(
            (0..m.nrows())
                .map(|i| Value::Array((0..m.ncols()).map(|j| serde_json::json!([m[(i, j)].re, m[(i, j)].im])).collect()))
                .collect(),
        ),
    };
    let file = DecayFile {
        dimension: set.dimension,
        indices: set.index_names.clone(),
        vacuum: set.vacuum.clone(),
        particle: set.particle.clone(),
        auto_stable: set.auto_stable,
        rules: set
            .rules
            .iter()
            .map(|r| RuleEntry {
                left: r.left.clone(),
                right: r.right.clone(),
                up: r.up.clone(),
                down: r.down.clone(),
                op: op(&r.op),
                coef: [r.coef.re, r.coef.im],
            })
            .collect(),
    };
    to_json_string(&serde_json::to_value(file).expect("serializable rule set"))
}
