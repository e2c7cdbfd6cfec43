// SPDX-License-Identifier: Apache-2.0

//! Gate-level synthesis of basic boolean operators.
//!
//! Circuits are built from two-input gates of arbitrary function. Generators
//! for arithmetic, selection, encoding, counting and composite operators emit
//! [`ir::Circuit`]s; [`sim`] evaluates them and checks them against the
//! word-level reference semantics in [`oracle`]; [`bench`] measures them
//! against their complexity bounds.

pub mod apps;
pub mod arith;
pub mod bench;
pub mod count;
pub mod encode;
pub mod error;
pub mod ir;
pub mod netlist;
pub mod ops;
pub mod oracle;
pub mod prefix;
pub mod select;
pub mod sim;
pub mod synth;

pub use error::{Error, Result};
pub use ir::{metrics, validate, Circuit, CircuitBuilder, GateFunc, Metrics, Node, NodeRef};
pub use ops::generate;
pub use oracle::{Operator, OperatorSpec, Variant};
pub use sim::{equiv_check, evaluate, evaluate_block, CheckConfig, CheckMode, EquivReport};
