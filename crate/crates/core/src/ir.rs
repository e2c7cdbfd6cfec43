// SPDX-License-Identifier: Apache-2.0

//! Netlist intermediate representation.
//!
//! A [`Circuit`] is a topologically numbered list of [`Node`]s: primary
//! inputs, constants and two-input gates. Every gate may only reference
//! nodes with a smaller index, so any `Circuit` whose operands satisfy that
//! rule is acyclic by construction.
//!
//! Gates carry a [`GateFunc`], a 4-bit truth table over the full basis of
//! sixteen two-input boolean functions. There is no standalone inverter;
//! negations are folded into the truth table of the consuming gate.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A two-input boolean function. Bit `2a + b` of the code is `f(a, b)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct GateFunc(u8);

impl GateFunc {
    pub const FALSE: GateFunc = GateFunc(0);
    pub const NOR: GateFunc = GateFunc(1);
    /// `¬a ∧ b`
    pub const ANDNOT_A: GateFunc = GateFunc(2);
    pub const NOT_A: GateFunc = GateFunc(3);
    /// `a ∧ ¬b`
    pub const ANDNOT_B: GateFunc = GateFunc(4);
    pub const NOT_B: GateFunc = GateFunc(5);
    pub const XOR: GateFunc = GateFunc(6);
    pub const NAND: GateFunc = GateFunc(7);
    pub const AND: GateFunc = GateFunc(8);
    pub const XNOR: GateFunc = GateFunc(9);
    pub const B: GateFunc = GateFunc(10);
    /// `¬a ∨ b`
    pub const ORNOT_A: GateFunc = GateFunc(11);
    pub const A: GateFunc = GateFunc(12);
    /// `a ∨ ¬b`
    pub const ORNOT_B: GateFunc = GateFunc(13);
    pub const OR: GateFunc = GateFunc(14);
    pub const TRUE: GateFunc = GateFunc(15);

    pub fn new(code: u8) -> Result<Self> {
        if code < 16 {
            Ok(GateFunc(code))
        } else {
            Err(Error::Argument(format!(
                "gate code {code} out of range 0..=15"
            )))
        }
    }

    /// Builds the function from its four values `f(0,0), f(0,1), f(1,0), f(1,1)`.
    pub fn from_table(f00: bool, f01: bool, f10: bool, f11: bool) -> Self {
        GateFunc(f00 as u8 | (f01 as u8) << 1 | (f10 as u8) << 2 | (f11 as u8) << 3)
    }

    pub fn from_fn(f: impl Fn(bool, bool) -> bool) -> Self {
        Self::from_table(
            f(false, false),
            f(false, true),
            f(true, false),
            f(true, true),
        )
    }

    pub fn code(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn eval(self, a: bool, b: bool) -> bool {
        (self.0 >> ((a as u8) << 1 | b as u8)) & 1 == 1
    }

    /// Evaluates the function on 64 independent lanes at once.
    #[inline]
    pub fn eval_word(self, a: u64, b: u64) -> u64 {
        match self.0 {
            0 => 0,
            1 => !(a | b),
            2 => !a & b,
            3 => !a,
            4 => a & !b,
            5 => !b,
            6 => a ^ b,
            7 => !(a & b),
            8 => a & b,
            9 => !(a ^ b),
            10 => b,
            11 => !a | b,
            12 => a,
            13 => a | !b,
            14 => a | b,
            _ => !0,
        }
    }

    /// True when the function ignores at least one argument (constants included).
    pub fn is_degenerate(self) -> bool {
        !self.depends_on_a() || !self.depends_on_b()
    }

    pub fn depends_on_a(self) -> bool {
        (self.0 & 0b0011) != (self.0 >> 2)
    }

    pub fn depends_on_b(self) -> bool {
        (self.0 & 0b0101) != ((self.0 >> 1) & 0b0101)
    }

    /// `¬f(a, b)`
    pub fn negate(self) -> Self {
        GateFunc(!self.0 & 0xf)
    }

    /// `f(¬a, b)`
    pub fn invert_a(self) -> Self {
        GateFunc(((self.0 & 0b0011) << 2) | (self.0 >> 2))
    }

    /// `f(a, ¬b)`
    pub fn invert_b(self) -> Self {
        GateFunc(((self.0 & 0b0101) << 1) | ((self.0 >> 1) & 0b0101))
    }

    /// `f(b, a)`
    pub fn swap(self) -> Self {
        GateFunc((self.0 & 0b1001) | ((self.0 & 0b0010) << 1) | ((self.0 & 0b0100) >> 1))
    }

    pub fn name(self) -> &'static str {
        const NAMES: [&str; 16] = [
            "false", "nor", "andnot_a", "not_a", "andnot_b", "not_b", "xor", "nand", "and", "xnor",
            "b", "ornot_a", "a", "ornot_b", "or", "true",
        ];
        NAMES[self.0 as usize]
    }
}

impl TryFrom<u8> for GateFunc {
    type Error = Error;

    fn try_from(code: u8) -> Result<Self> {
        GateFunc::new(code)
    }
}

impl From<GateFunc> for u8 {
    fn from(f: GateFunc) -> u8 {
        f.0
    }
}

impl fmt::Debug for GateFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.0)
    }
}

/// Index of a node inside its circuit.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct NodeRef(pub u32);

impl NodeRef {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Node {
    Input(String),
    Const(bool),
    Gate {
        func: GateFunc,
        a: NodeRef,
        b: NodeRef,
    },
}

impl Node {
    pub fn is_gate(&self) -> bool {
        matches!(self, Node::Gate { .. })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Circuit {
    name: String,
    nodes: Vec<Node>,
    inputs: Vec<NodeRef>,
    outputs: Vec<NodeRef>,
    meta: BTreeMap<String, String>,
}

impl Circuit {
    /// Assembles a circuit without any structural checking. Use
    /// [`validate`] to inspect the result; everything else in this crate
    /// assumes a well-formed circuit.
    pub fn from_raw_parts(
        name: impl Into<String>,
        nodes: Vec<Node>,
        outputs: Vec<NodeRef>,
        meta: BTreeMap<String, String>,
    ) -> Self {
        let inputs = nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n, Node::Input(_)))
            .map(|(i, _)| NodeRef(i as u32))
            .collect();
        Circuit {
            name: name.into(),
            nodes,
            inputs,
            outputs,
            meta,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, r: NodeRef) -> &Node {
        &self.nodes[r.index()]
    }

    pub fn inputs(&self) -> &[NodeRef] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NodeRef] {
        &self.outputs
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut BTreeMap<String, String> {
        &mut self.meta
    }

    pub fn input_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn gate_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_gate()).count()
    }

    pub fn input_label(&self, i: usize) -> &str {
        match &self.nodes[self.inputs[i].index()] {
            Node::Input(label) => label,
            _ => unreachable!("input list only holds input nodes"),
        }
    }

    /// Gate depth of every node; inputs and constants sit at depth 0.
    pub fn node_depths(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if let Node::Gate { a, b, .. } = node {
                depth[i] = 1 + depth[a.index()].max(depth[b.index()]);
            }
        }
        depth
    }
}

/// Incremental constructor for [`Circuit`]s.
///
/// Operands must already exist when a gate is added, which keeps the node
/// list topologically ordered. The same call sequence always yields the same
/// netlist.
#[derive(Debug)]
pub struct CircuitBuilder {
    name: String,
    nodes: Vec<Node>,
    meta: BTreeMap<String, String>,
}

impl CircuitBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        CircuitBuilder {
            name: name.into(),
            nodes: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    fn push(&mut self, node: Node) -> NodeRef {
        self.nodes.push(node);
        NodeRef((self.nodes.len() - 1) as u32)
    }

    pub fn add_input(&mut self, label: impl Into<String>) -> NodeRef {
        self.push(Node::Input(label.into()))
    }

    pub fn add_const(&mut self, value: bool) -> NodeRef {
        self.push(Node::Const(value))
    }

    pub fn add_gate(&mut self, func: GateFunc, a: NodeRef, b: NodeRef) -> Result<NodeRef> {
        let next = self.nodes.len();
        for operand in [a, b] {
            if operand.index() >= next {
                return Err(Error::Structural(format!(
                    "gate {next} references node {} which does not exist yet",
                    operand.0
                )));
            }
        }
        Ok(self.push(Node::Gate { func, a, b }))
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.meta.insert(key.into(), value.into());
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn set_outputs(self, outputs: &[NodeRef]) -> Result<Circuit> {
        if outputs.is_empty() {
            return Err(Error::Structural("circuit has no outputs".into()));
        }
        if let Some(bad) = outputs.iter().find(|r| r.index() >= self.nodes.len()) {
            return Err(Error::Structural(format!(
                "output references missing node {}",
                bad.0
            )));
        }
        Ok(Circuit::from_raw_parts(
            self.name,
            self.nodes,
            outputs.to_vec(),
            self.meta,
        ))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize)]
pub struct Metrics {
    /// Number of gates; inputs and constants are free.
    pub size: usize,
    /// Longest input-to-output path counted in gates.
    pub depth: usize,
    pub degenerate_gates: usize,
}

pub fn metrics(c: &Circuit) -> Metrics {
    let depths = c.node_depths();
    let degenerate_gates = c
        .nodes()
        .iter()
        .filter(|n| matches!(n, Node::Gate { func, .. } if func.is_degenerate()))
        .count();
    Metrics {
        size: c.gate_count(),
        depth: c
            .outputs()
            .iter()
            .map(|o| depths[o.index()])
            .max()
            .unwrap_or(0),
        degenerate_gates,
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    /// Gate operand does not reference a strictly earlier node.
    ForwardReference {
        node: usize,
        operand: u32,
    },
    DanglingOutput {
        position: usize,
        node: u32,
    },
    EmptyOutputs,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ForwardReference { node, operand } => {
                write!(f, "node {node}: operand {operand} is not an earlier node")
            }
            Violation::DanglingOutput { position, node } => {
                write!(f, "output {position}: node {node} does not exist")
            }
            Violation::EmptyOutputs => write!(f, "circuit has no outputs"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Gates whose function ignores an operand. Reported, never fatal.
    pub degenerate_gates: usize,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate(c: &Circuit) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (i, node) in c.nodes().iter().enumerate() {
        if let Node::Gate { func, a, b } = node {
            for operand in [a, b] {
                if operand.index() >= i {
                    report.violations.push(Violation::ForwardReference {
                        node: i,
                        operand: operand.0,
                    });
                }
            }
            if func.is_degenerate() {
                report.degenerate_gates += 1;
            }
        }
    }
    if c.outputs().is_empty() {
        report.violations.push(Violation::EmptyOutputs);
    }
    for (position, o) in c.outputs().iter().enumerate() {
        if o.index() >= c.nodes().len() {
            report.violations.push(Violation::DanglingOutput {
                position,
                node: o.0,
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor_circuit() -> Circuit {
        let mut b = CircuitBuilder::new("xor");
        let x = b.add_input("a");
        let y = b.add_input("b");
        let g = b.add_gate(GateFunc::XOR, x, y).unwrap();
        b.set_outputs(&[g]).unwrap()
    }

    #[test]
    fn gate_codes_match_truth_tables() {
        assert_eq!(GateFunc::from_fn(|a, b| a & b), GateFunc::AND);
        assert_eq!(GateFunc::from_fn(|a, b| a | b), GateFunc::OR);
        assert_eq!(GateFunc::from_fn(|a, b| a ^ b), GateFunc::XOR);
        assert_eq!(GateFunc::from_fn(|a, b| a == b), GateFunc::XNOR);
        assert_eq!(GateFunc::from_fn(|a, b| !a & b), GateFunc::ANDNOT_A);
        assert_eq!(GateFunc::AND.code(), 8);
        assert_eq!(GateFunc::OR.code(), 14);
        assert_eq!(GateFunc::XOR.code(), 6);
        assert_eq!(GateFunc::XNOR.code(), 9);
        assert_eq!(GateFunc::ANDNOT_A.code(), 2);
    }

    #[test]
    fn degenerate_codes() {
        let degenerate: Vec<u8> = (0..16).filter(|&c| GateFunc(c).is_degenerate()).collect();
        assert_eq!(degenerate, vec![0, 3, 5, 10, 12, 15]);
    }

    #[test]
    fn operand_transforms() {
        for code in 0..16 {
            let f = GateFunc(code);
            for a in [false, true] {
                for b in [false, true] {
                    assert_eq!(f.negate().eval(a, b), !f.eval(a, b));
                    assert_eq!(f.invert_a().eval(a, b), f.eval(!a, b));
                    assert_eq!(f.invert_b().eval(a, b), f.eval(a, !b));
                    assert_eq!(f.swap().eval(a, b), f.eval(b, a));
                    let wa = if a { !0u64 } else { 0 };
                    let wb = if b { !0u64 } else { 0 };
                    assert_eq!(f.eval_word(wa, wb) == !0, f.eval(a, b));
                }
            }
        }
    }

    #[test]
    fn single_xor_metrics() {
        let c = xor_circuit();
        let m = metrics(&c);
        assert_eq!((m.size, m.depth, m.degenerate_gates), (1, 1, 0));
        assert!(validate(&c).is_ok());
    }

    #[test]
    fn chain_depth() {
        let mut b = CircuitBuilder::new("chain");
        let x = b.add_input("x");
        let mut cur = b.add_input("y");
        for _ in 0..5 {
            cur = b.add_gate(GateFunc::AND, x, cur).unwrap();
        }
        let c = b.set_outputs(&[cur]).unwrap();
        assert_eq!(metrics(&c).depth, 5);
    }

    #[test]
    fn forward_reference_rejected() {
        let mut b = CircuitBuilder::new("bad");
        let x = b.add_input("x");
        assert!(matches!(
            b.add_gate(GateFunc::AND, x, NodeRef(7)),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn empty_outputs_rejected() {
        let mut b = CircuitBuilder::new("none");
        b.add_input("x");
        assert!(matches!(b.set_outputs(&[]), Err(Error::Structural(_))));
    }

    #[test]
    fn identical_call_sequences_agree() {
        assert_eq!(xor_circuit(), xor_circuit());
    }

    #[test]
    fn validate_flags_problems() {
        let nodes = vec![
            Node::Input("x".into()),
            Node::Gate {
                func: GateFunc::TRUE,
                a: NodeRef(0),
                b: NodeRef(0),
            },
        ];
        let c = Circuit::from_raw_parts("const", nodes.clone(), vec![NodeRef(1)], BTreeMap::new());
        let r = validate(&c);
        assert!(r.is_ok());
        assert_eq!(r.degenerate_gates, 1);

        let c = Circuit::from_raw_parts("dangling", nodes, vec![NodeRef(9)], BTreeMap::new());
        let r = validate(&c);
        assert_eq!(
            r.violations,
            vec![Violation::DanglingOutput {
                position: 0,
                node: 9
            }]
        );

        let nodes = vec![
            Node::Input("x".into()),
            Node::Gate {
                func: GateFunc::AND,
                a: NodeRef(0),
                b: NodeRef(1),
            },
        ];
        let c = Circuit::from_raw_parts("cycle", nodes, vec![NodeRef(1)], BTreeMap::new());
        assert_eq!(
            validate(&c).violations,
            vec![Violation::ForwardReference {
                node: 1,
                operand: 1
            }]
        );
    }
}
