// SPDX-License-Identifier: Apache-2.0

//! JSON, BLIF and DOT serialization. JSON is the only import format.
//!
//! JSON documents look like
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "name": "add_2",
//!   "meta": {"operator": "add"},
//!   "inputs": [0, 1, 2, 3],
//!   "nodes": [
//!     {"kind": "input", "label": "a0"},
//!     {"kind": "const", "value": true},
//!     {"kind": "gate", "func": 6, "a": 0, "b": 2}
//!   ],
//!   "outputs": [4]
//! }
//! ```
//!
//! where `func` is the gate code `Σ f(a,b)·2^(2a+b)` and operands refer to
//! earlier nodes.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ir::{Circuit, CircuitBuilder, GateFunc, Node, NodeRef};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum JsonNode {
    Input { label: String },
    Const { value: bool },
    Gate { func: u8, a: u32, b: u32 },
}

#[derive(Serialize)]
struct Document<'a> {
    format_version: u64,
    name: &'a str,
    meta: &'a BTreeMap<String, String>,
    inputs: Vec<u32>,
    nodes: Vec<JsonNode>,
    outputs: Vec<u32>,
}

#[derive(Deserialize)]
struct RawDocument {
    format_version: u64,
    name: String,
    #[serde(default)]
    meta: BTreeMap<String, String>,
    inputs: Vec<u32>,
    nodes: Vec<Value>,
    outputs: Vec<u32>,
}

fn parse_err<T>(index: Option<usize>, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        index,
        message: message.into(),
    })
}

pub fn to_json(c: &Circuit) -> String {
    let nodes = c
        .nodes()
        .iter()
        .map(|n| match n {
            Node::Input(label) => JsonNode::Input {
                label: label.clone(),
            },
            Node::Const(value) => JsonNode::Const { value: *value },
            Node::Gate { func, a, b } => JsonNode::Gate {
                func: func.code(),
                a: a.0,
                b: b.0,
            },
        })
        .collect();
    let doc = Document {
        format_version: FORMAT_VERSION,
        name: c.name(),
        meta: c.meta(),
        inputs: c.inputs().iter().map(|r| r.0).collect(),
        nodes,
        outputs: c.outputs().iter().map(|r| r.0).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("document serializes")
}

pub fn from_json(text: &str) -> Result<Circuit> {
    let doc: RawDocument = match serde_json::from_str(text) {
        Ok(d) => d,
        Err(e) => return parse_err(None, e.to_string()),
    };
    if doc.format_version != FORMAT_VERSION {
        return parse_err(
            None,
            format!("unsupported format_version {}", doc.format_version),
        );
    }
    let mut b = CircuitBuilder::new(doc.name);
    let mut inputs = Vec::new();
    for (i, raw) in doc.nodes.into_iter().enumerate() {
        let node: JsonNode = match serde_json::from_value(raw) {
            Ok(n) => n,
            Err(e) => return parse_err(Some(i), e.to_string()),
        };
        match node {
            JsonNode::Input { label } => {
                inputs.push(b.add_input(label).0);
            }
            JsonNode::Const { value } => {
                b.add_const(value);
            }
            JsonNode::Gate { func, a, b: rhs } => {
                let Ok(func) = GateFunc::new(func) else {
                    return parse_err(Some(i), format!("bad gate code {func}"));
                };
                if a as usize >= i || rhs as usize >= i {
                    return parse_err(
                        Some(i),
                        format!("operand {a} or {rhs} is not an earlier node"),
                    );
                }
                if let Err(e) = b.add_gate(func, NodeRef(a), NodeRef(rhs)) {
                    return parse_err(Some(i), e.to_string());
                }
            }
        }
    }
    if inputs != doc.inputs {
        return parse_err(None, "input list does not match the input nodes");
    }
    for (k, v) in doc.meta {
        b.set_meta(k, v);
    }
    let outputs: Vec<NodeRef> = doc.outputs.into_iter().map(NodeRef).collect();
    b.set_outputs(&outputs)
        .or_else(|e| parse_err(None, e.to_string()))
}

/// ON-set cover rows of a two-input gate, in `ab` order.
pub fn cover_rows(f: GateFunc) -> Vec<&'static str> {
    [
        (false, false, "00"),
        (false, true, "01"),
        (true, false, "10"),
        (true, true, "11"),
    ]
    .into_iter()
    .filter(|&(a, b, _)| f.eval(a, b))
    .map(|(_, _, row)| row)
    .collect()
}

pub fn to_blif(c: &Circuit) -> String {
    let mut net: Vec<String> = c
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| match n {
            Node::Input(label) => label.clone(),
            _ => format!("n{i}"),
        })
        .collect();
    let out_names: Vec<String> = (0..c.output_count()).map(|j| format!("out{j}")).collect();
    // A gate driving an output for the first time takes the output name;
    // every other output is a buffer.
    let mut renamed = HashSet::new();
    let mut buffers = Vec::new();
    for (j, o) in c.outputs().iter().enumerate() {
        if c.node(*o).is_gate() && renamed.insert(o.index()) {
            net[o.index()] = out_names[j].clone();
        } else {
            buffers.push((o.index(), j));
        }
    }

    let mut s = String::new();
    writeln!(s, ".model {}", c.name()).unwrap();
    let ins: Vec<&str> = c.inputs().iter().map(|r| net[r.index()].as_str()).collect();
    writeln!(s, ".inputs {}", ins.join(" ")).unwrap();
    writeln!(s, ".outputs {}", out_names.join(" ")).unwrap();
    for (i, node) in c.nodes().iter().enumerate() {
        match node {
            Node::Input(_) => {}
            Node::Const(v) => {
                writeln!(s, ".names {}", net[i]).unwrap();
                if *v {
                    writeln!(s, "1").unwrap();
                }
            }
            Node::Gate { func, a, b } => {
                writeln!(s, ".names {} {} {}", net[a.index()], net[b.index()], net[i]).unwrap();
                for row in cover_rows(*func) {
                    writeln!(s, "{row} 1").unwrap();
                }
            }
        }
    }
    for (src, j) in buffers {
        writeln!(s, ".names {} {}\n1 1", net[src], out_names[j]).unwrap();
    }
    writeln!(s, ".end").unwrap();
    s
}

pub fn to_dot(c: &Circuit) -> String {
    let depths = c.node_depths();
    let mut s = String::new();
    writeln!(s, "digraph \"{}\" {{", c.name()).unwrap();
    writeln!(s, "  rankdir=TB;").unwrap();
    let mut outs: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (j, o) in c.outputs().iter().enumerate() {
        outs.entry(o.index()).or_default().push(format!("out{j}"));
    }
    for (i, node) in c.nodes().iter().enumerate() {
        let (label, shape) = match node {
            Node::Input(l) => (l.clone(), "box"),
            Node::Const(v) => (u8::from(*v).to_string(), "plaintext"),
            Node::Gate { func, .. } => (func.name().to_string(), "ellipse"),
        };
        match outs.get(&i) {
            Some(names) => writeln!(
                s,
                "  n{i} [label=\"{label}\", shape={shape}, peripheries=2, xlabel=\"{}\"];",
                names.join(",")
            ),
            None => writeln!(s, "  n{i} [label=\"{label}\", shape={shape}];"),
        }
        .unwrap();
    }
    for (i, node) in c.nodes().iter().enumerate() {
        if let Node::Gate { a, b, .. } = node {
            writeln!(s, "  n{} -> n{i};", a.index()).unwrap();
            writeln!(s, "  n{} -> n{i};", b.index()).unwrap();
        }
    }
    let max_depth = depths.iter().copied().max().unwrap_or(0);
    for d in 0..=max_depth {
        let same: Vec<String> = (0..depths.len())
            .filter(|&i| depths[i] == d)
            .map(|i| format!("n{i}"))
            .collect();
        if !same.is_empty() {
            writeln!(s, "  {{ rank=same; {} }}", same.join("; ")).unwrap();
        }
    }
    writeln!(s, "}}").unwrap();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::metrics;
    use crate::ops::generate;
    use crate::oracle::{Operator, OperatorSpec, Variant};
    use crate::sim::evaluate;

    fn xor1() -> Circuit {
        let mut b = CircuitBuilder::new("x");
        let a = b.add_input("a");
        let c = b.add_input("b");
        let g = b.add_gate(GateFunc::XOR, a, c).unwrap();
        b.set_outputs(&[g]).unwrap()
    }

    fn blif_gate_sections(text: &str) -> usize {
        text.lines()
            .filter(|l| l.starts_with(".names") && l.split_whitespace().count() == 4)
            .count()
    }

    #[test]
    fn json_round_trip() {
        let c = xor1();
        let back = from_json(&to_json(&c)).unwrap();
        assert_eq!(back, c);
        let add = generate(&OperatorSpec::new(Operator::Add, 8, 0, Variant::Sequential)).unwrap();
        let back = from_json(&to_json(&add)).unwrap();
        assert_eq!(metrics(&back).size, 37);
        assert_eq!(back, add);
    }

    #[test]
    fn json_rejects_bad_documents() {
        let text = to_json(&xor1()).replace("\"func\": 6", "\"func\": 16");
        assert!(matches!(
            from_json(&text),
            Err(Error::Parse { index: Some(2), .. })
        ));
        let text = to_json(&xor1()).replace("\"format_version\": 1", "\"format_version\": 9");
        assert!(matches!(
            from_json(&text),
            Err(Error::Parse { index: None, .. })
        ));
        let text = to_json(&xor1()).replace("\"a\": 0", "\"a\": 2");
        assert!(matches!(
            from_json(&text),
            Err(Error::Parse { index: Some(2), .. })
        ));
        assert!(from_json("{").is_err());
    }

    #[test]
    fn blif_covers() {
        assert_eq!(cover_rows(GateFunc::AND), vec!["11"]);
        assert_eq!(cover_rows(GateFunc::XNOR), vec!["00", "11"]);
        let text = to_blif(&xor1());
        assert!(text.contains(".names a b out0\n01 1\n10 1\n"));
        let inc = generate(&OperatorSpec::new(Operator::Inc, 4, 0, Variant::Sequential)).unwrap();
        assert_eq!(blif_gate_sections(&to_blif(&inc)), 6);
        let enc = generate(&OperatorSpec::new(Operator::Enc, 16, 0, Variant::Parallel)).unwrap();
        assert_eq!(blif_gate_sections(&to_blif(&enc)), 22);
        assert_eq!(to_blif(&enc), to_blif(&enc));
    }

    #[test]
    fn dot_shape() {
        let text = to_dot(&xor1());
        assert_eq!(text.matches("shape=").count(), 3);
        assert_eq!(text.matches(" -> n").count(), 2);
        assert_eq!(text, to_dot(&xor1()));
    }

    #[test]
    fn round_trip_preserves_behavior() {
        let c = generate(&OperatorSpec::new(Operator::Nck, 6, 0, Variant::Parallel)).unwrap();
        let back = from_json(&to_json(&c)).unwrap();
        for x in 0..64u32 {
            let bits: Vec<bool> = (0..6).map(|i| x >> i & 1 == 1).collect();
            assert_eq!(
                evaluate(&c, &bits).unwrap(),
                evaluate(&back, &bits).unwrap()
            );
        }
    }
}
