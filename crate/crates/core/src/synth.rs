// SPDX-License-Identifier: Apache-2.0

//! Signal-level circuit construction used by every generator.
//!
//! [`Synth`] hands out [`Sig`]s: either a constant or a node reference with
//! an optional pending negation. Negations are never materialized as gates
//! while building; [`Synth::gate`] folds them into the truth table of the
//! consuming gate and simplifies constant or repeated operands away, so
//! generated netlists contain no degenerate gates.
//!
//! [`Synth::finish`] resolves negations that reach the outputs, removes dead
//! gates and replays the remaining nodes through a [`CircuitBuilder`].

use std::collections::BTreeMap;
use std::ops::Not;

use crate::error::Result;
use crate::ir::{Circuit, CircuitBuilder, GateFunc, Node, NodeRef};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Sig {
    Const(bool),
    Wire { node: NodeRef, inv: bool },
}

impl Sig {
    pub const ZERO: Sig = Sig::Const(false);
    pub const ONE: Sig = Sig::Const(true);

    pub fn wire(node: NodeRef) -> Sig {
        Sig::Wire { node, inv: false }
    }

    pub fn is_const(self) -> bool {
        matches!(self, Sig::Const(_))
    }
}

impl Not for Sig {
    type Output = Sig;

    fn not(self) -> Sig {
        match self {
            Sig::Const(v) => Sig::Const(!v),
            Sig::Wire { node, inv } => Sig::Wire { node, inv: !inv },
        }
    }
}

/// Convention for the bit positions of a [`Bundle`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BitOrder {
    /// Index 0 is the leftmost character of a boolean string.
    String,
    /// Index 0 is the least significant bit of a number.
    Number,
}

/// Ordered group of signals forming one multi-bit value.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Bundle {
    pub wires: Vec<Sig>,
    pub order: BitOrder,
}

impl Bundle {
    pub fn new(wires: Vec<Sig>, order: BitOrder) -> Self {
        Bundle { wires, order }
    }

    pub fn number(wires: Vec<Sig>) -> Self {
        Bundle::new(wires, BitOrder::Number)
    }

    pub fn string(wires: Vec<Sig>) -> Self {
        Bundle::new(wires, BitOrder::String)
    }

    pub fn width(&self) -> usize {
        self.wires.len()
    }
}

fn unary(g0: bool, g1: bool, x: Sig) -> Sig {
    match (g0, g1) {
        (false, false) => Sig::ZERO,
        (true, true) => Sig::ONE,
        (false, true) => x,
        (true, false) => !x,
    }
}

#[derive(Debug)]
pub struct Synth {
    name: String,
    nodes: Vec<Node>,
    meta: BTreeMap<String, String>,
}

impl Synth {
    pub fn new(name: impl Into<String>) -> Self {
        Synth {
            name: name.into(),
            nodes: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.meta.insert(key.into(), value.to_string());
    }

    pub fn input(&mut self, label: impl Into<String>) -> Sig {
        self.nodes.push(Node::Input(label.into()));
        Sig::wire(NodeRef((self.nodes.len() - 1) as u32))
    }

    /// `width` inputs labelled `prefix0`, `prefix1`, ...
    pub fn inputs(&mut self, prefix: &str, width: usize) -> Vec<Sig> {
        (0..width)
            .map(|i| self.input(format!("{prefix}{i}")))
            .collect()
    }

    /// Gates emitted so far, dead ones included.
    pub fn emitted_gates(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_gate()).count()
    }

    pub fn gate(&mut self, f: GateFunc, a: Sig, b: Sig) -> Sig {
        let (mut f, a) = match a {
            Sig::Const(va) => return unary(f.eval(va, false), f.eval(va, true), b),
            Sig::Wire { node, inv } => (if inv { f.invert_a() } else { f }, node),
        };
        let b = match b {
            Sig::Const(vb) => {
                return unary(f.eval(false, vb), f.eval(true, vb), Sig::wire(a));
            }
            Sig::Wire { node, inv } => {
                if inv {
                    f = f.invert_b();
                }
                node
            }
        };
        if a == b {
            return unary(f.eval(false, false), f.eval(true, true), Sig::wire(a));
        }
        if !f.depends_on_a() {
            return unary(f.eval(false, false), f.eval(false, true), Sig::wire(b));
        }
        if !f.depends_on_b() {
            return unary(f.eval(false, false), f.eval(true, false), Sig::wire(a));
        }
        // Keep stored gates 0-preserving; the complement travels on the signal.
        let (f, inv) = if f.eval(false, false) {
            (f.negate(), true)
        } else {
            (f, false)
        };
        self.nodes.push(Node::Gate { func: f, a, b });
        Sig::Wire {
            node: NodeRef((self.nodes.len() - 1) as u32),
            inv,
        }
    }

    pub fn and(&mut self, a: Sig, b: Sig) -> Sig {
        self.gate(GateFunc::AND, a, b)
    }

    pub fn or(&mut self, a: Sig, b: Sig) -> Sig {
        self.gate(GateFunc::OR, a, b)
    }

    pub fn xor(&mut self, a: Sig, b: Sig) -> Sig {
        self.gate(GateFunc::XOR, a, b)
    }

    pub fn xnor(&mut self, a: Sig, b: Sig) -> Sig {
        self.gate(GateFunc::XNOR, a, b)
    }

    /// `s ? a : b`, three gates unless an arm folds away.
    pub fn mux(&mut self, s: Sig, a: Sig, b: Sig) -> Sig {
        if a == b {
            return a;
        }
        if a == !b {
            return self.xnor(s, a);
        }
        if let Sig::Const(v) = s {
            return if v { a } else { b };
        }
        let hi = self.and(s, a);
        let lo = self.and(!s, b);
        self.or(hi, lo)
    }

    /// Left-to-right fold `((x0 f x1) f x2) ...`.
    pub fn reduce_chain(&mut self, f: GateFunc, sigs: &[Sig], empty: Sig) -> Sig {
        let mut it = sigs.iter().copied();
        let Some(mut acc) = it.next() else {
            return empty;
        };
        for s in it {
            acc = self.gate(f, acc, s);
        }
        acc
    }

    /// Balanced fold for associative `f`; operand order is preserved.
    pub fn reduce_tree(&mut self, f: GateFunc, sigs: &[Sig], empty: Sig) -> Sig {
        match sigs.len() {
            0 => empty,
            1 => sigs[0],
            len => {
                // Largest power of two below `len` keeps the left part complete.
                let mid = 1usize << (usize::BITS - 1 - (len - 1).leading_zeros());
                let l = self.reduce_tree(f, &sigs[..mid], empty);
                let r = self.reduce_tree(f, &sigs[mid..], empty);
                self.gate(f, l, r)
            }
        }
    }

    /// Resolves output negations, drops dead gates and builds the circuit.
    pub fn finish(self, outputs: &[Sig]) -> Result<Circuit> {
        let Synth {
            name,
            mut nodes,
            meta,
        } = self;

        #[derive(Clone, Copy)]
        enum Out {
            Node(usize),
            Neg(usize),
            Const(bool),
        }
        let mut outs: Vec<Out> = outputs
            .iter()
            .map(|s| match *s {
                Sig::Const(v) => Out::Const(v),
                Sig::Wire { node, inv: false } => Out::Node(node.index()),
                Sig::Wire { node, inv: true } => Out::Neg(node.index()),
            })
            .collect();

        let mut positive = vec![false; nodes.len()];
        let mut negative = vec![false; nodes.len()];
        for o in &outs {
            match *o {
                Out::Node(i) => positive[i] = true,
                Out::Neg(i) => negative[i] = true,
                Out::Const(_) => {}
            }
        }

        // Complemented gates: flip the stored function in place when nothing
        // else needs the true polarity, otherwise add one complemented copy.
        let mut complement_of: BTreeMap<usize, usize> = BTreeMap::new();
        let original_len = nodes.len();
        for g in 0..original_len {
            if !negative[g] {
                continue;
            }
            match nodes[g].clone() {
                Node::Gate { func, a, b } if !positive[g] => {
                    nodes[g] = Node::Gate {
                        func: func.negate(),
                        a,
                        b,
                    };
                    let r = NodeRef(g as u32);
                    for node in nodes.iter_mut().skip(g + 1) {
                        if let Node::Gate { func, a, b } = node {
                            if *a == r {
                                *func = func.invert_a();
                            }
                            if *b == r {
                                *func = func.invert_b();
                            }
                        }
                    }
                    complement_of.insert(g, g);
                }
                Node::Gate { func, a, b } => {
                    nodes.push(Node::Gate {
                        func: func.negate(),
                        a,
                        b,
                    });
                    complement_of.insert(g, nodes.len() - 1);
                }
                Node::Input(_) | Node::Const(_) => {
                    // NAND(x, x) is the only inverter the two-input basis offers
                    // without a degenerate truth table.
                    let x = NodeRef(g as u32);
                    nodes.push(Node::Gate {
                        func: GateFunc::NAND,
                        a: x,
                        b: x,
                    });
                    complement_of.insert(g, nodes.len() - 1);
                }
            }
        }
        let mut const_node: [Option<usize>; 2] = [None, None];
        for o in outs.iter_mut() {
            *o = match *o {
                Out::Neg(i) => Out::Node(complement_of[&i]),
                Out::Const(v) => {
                    let idx = *const_node[v as usize].get_or_insert_with(|| {
                        nodes.push(Node::Const(v));
                        nodes.len() - 1
                    });
                    Out::Node(idx)
                }
                other => other,
            };
        }

        let mut live = vec![false; nodes.len()];
        for o in &outs {
            if let Out::Node(i) = *o {
                live[i] = true;
            }
        }
        for i in (0..nodes.len()).rev() {
            match &nodes[i] {
                Node::Gate { a, b, .. } if live[i] => {
                    live[a.index()] = true;
                    live[b.index()] = true;
                }
                Node::Input(_) => live[i] = true,
                _ => {}
            }
        }

        // Appended nodes only reference earlier ones, so index order is topological.
        let mut builder = CircuitBuilder::new(name);
        for (k, v) in meta {
            builder.set_meta(k, v);
        }
        let mut remap = vec![NodeRef(u32::MAX); nodes.len()];
        for (i, node) in nodes.iter().enumerate() {
            if !live[i] {
                continue;
            }
            remap[i] = match node {
                Node::Input(label) => builder.add_input(label.clone()),
                Node::Const(v) => builder.add_const(*v),
                Node::Gate { func, a, b } => {
                    builder.add_gate(*func, remap[a.index()], remap[b.index()])?
                }
            };
        }
        let out_refs: Vec<NodeRef> = outs
            .iter()
            .map(|o| match *o {
                Out::Node(i) => remap[i],
                _ => unreachable!("all outputs resolved to nodes"),
            })
            .collect();
        builder.set_outputs(&out_refs)
    }
}
