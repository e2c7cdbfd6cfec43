// SPDX-License-Identifier: Apache-2.0

//! Circuit evaluation and oracle equivalence checking.
//!
//! Batches are evaluated 64 assignments per machine word. Work is split into
//! fixed-size chunks whose results are concatenated in chunk order, so the
//! outcome never depends on how many worker threads are used.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ir::{Circuit, Node};
use crate::oracle::{write_element, Field, OperatorSpec};

const LANES: usize = 64;
/// Assignments handled by one parallel work item.
const CHUNK: usize = LANES * 64;

pub fn evaluate(c: &Circuit, assignment: &[bool]) -> Result<Vec<bool>> {
    check_len(c, assignment)?;
    let mut values = vec![false; c.nodes().len()];
    let mut next_input = 0;
    for (i, node) in c.nodes().iter().enumerate() {
        values[i] = match node {
            Node::Input(_) => {
                next_input += 1;
                assignment[next_input - 1]
            }
            Node::Const(v) => *v,
            Node::Gate { func, a, b } => func.eval(values[a.index()], values[b.index()]),
        };
    }
    Ok(c.outputs().iter().map(|o| values[o.index()]).collect())
}

fn check_len(c: &Circuit, assignment: &[bool]) -> Result<()> {
    if assignment.len() != c.input_count() {
        return Err(Error::Argument(format!(
            "assignment has {} bits, circuit {} expects {}",
            assignment.len(),
            c.name(),
            c.input_count()
        )));
    }
    Ok(())
}

/// Evaluates up to 64 assignments packed lane-wise; returns one word per output.
pub fn eval_words(c: &Circuit, input_words: &[u64]) -> Vec<u64> {
    let mut values = vec![0u64; c.nodes().len()];
    let mut next_input = 0;
    for (i, node) in c.nodes().iter().enumerate() {
        values[i] = match node {
            Node::Input(_) => {
                next_input += 1;
                input_words[next_input - 1]
            }
            Node::Const(v) => {
                if *v {
                    !0
                } else {
                    0
                }
            }
            Node::Gate { func, a, b } => func.eval_word(values[a.index()], values[b.index()]),
        };
    }
    c.outputs().iter().map(|o| values[o.index()]).collect()
}

fn pack(assignments: &[Vec<bool>], width: usize) -> Vec<u64> {
    let mut words = vec![0u64; width];
    for (lane, a) in assignments.iter().enumerate() {
        for (bit, &v) in a.iter().enumerate() {
            words[bit] |= (v as u64) << lane;
        }
    }
    words
}

fn eval_chunk(c: &Circuit, chunk: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let mut out = Vec::with_capacity(chunk.len());
    for lanes in chunk.chunks(LANES) {
        let words = eval_words(c, &pack(lanes, c.input_count()));
        for lane in 0..lanes.len() {
            out.push(words.iter().map(|w| w >> lane & 1 == 1).collect());
        }
    }
    out
}

/// Bit-parallel evaluation on the global thread pool.
pub fn evaluate_block(c: &Circuit, assignments: &[Vec<bool>]) -> Result<Vec<Vec<bool>>> {
    for a in assignments {
        check_len(c, a)?;
    }
    Ok(assignments
        .par_chunks(CHUNK)
        .map(|chunk| eval_chunk(c, chunk))
        .collect::<Vec<_>>()
        .concat())
}

/// Same as [`evaluate_block`] on a dedicated pool of `workers` threads.
pub fn evaluate_block_with(
    c: &Circuit,
    assignments: &[Vec<bool>],
    workers: usize,
) -> Result<Vec<Vec<bool>>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| evaluate_block(c, assignments))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Exhaustive,
    Sampled,
}

impl fmt::Display for CheckMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckMode::Exhaustive => "exhaustive",
            CheckMode::Sampled => "sampled",
        })
    }
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    /// Domains of at most `2^exhaustive_limit` points are enumerated in full.
    pub exhaustive_limit: u32,
    pub samples: usize,
    pub seed: u64,
    /// Failures kept verbatim in the report; all of them are counted.
    pub max_failures: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            exhaustive_limit: 22,
            samples: 100_000,
            seed: 0,
            max_failures: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub input: Vec<bool>,
    /// `None` marks a don't-care output position.
    pub expected: Vec<Option<bool>>,
    pub got: Vec<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivReport {
    pub mode: CheckMode,
    pub tested: u64,
    pub failure_count: u64,
    pub failures: Vec<Failure>,
    pub seed: u64,
}

impl EquivReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

struct ChunkResult {
    tested: u64,
    failure_count: u64,
    failures: Vec<Failure>,
}

impl ChunkResult {
    fn new() -> Self {
        ChunkResult {
            tested: 0,
            failure_count: 0,
            failures: Vec::new(),
        }
    }

    /// Checks up to 64 in-domain assignments in one bit-parallel pass.
    fn check_lanes(
        &mut self,
        c: &Circuit,
        spec: &OperatorSpec,
        lanes: &[Vec<bool>],
        keep: usize,
    ) -> Result<()> {
        let words = eval_words(c, &pack(lanes, c.input_count()));
        for (lane, input) in lanes.iter().enumerate() {
            let expected = spec.oracle_eval_in_domain(input)?;
            let ok = expected.len() == words.len()
                && expected
                    .iter()
                    .zip(&words)
                    .all(|(e, w)| e.map_or(true, |e| e == (w >> lane & 1 == 1)));
            self.tested += 1;
            if !ok {
                self.failure_count += 1;
                if self.failures.len() < keep {
                    self.failures.push(Failure {
                        input: input.clone(),
                        expected,
                        got: words.iter().map(|w| w >> lane & 1 == 1).collect(),
                    });
                }
            }
        }
        Ok(())
    }
}

fn check_assignments(
    c: &Circuit,
    spec: &OperatorSpec,
    assignments: &[Vec<bool>],
    keep: usize,
) -> Result<ChunkResult> {
    let mut result = ChunkResult::new();
    for lanes in assignments.chunks(LANES) {
        result.check_lanes(c, spec, lanes, keep)?;
    }
    Ok(result)
}

/// Domain points `start..end`, enumerated into reused lane buffers.
fn check_range(
    c: &Circuit,
    spec: &OperatorSpec,
    fields: &[Field],
    start: u128,
    end: u128,
    keep: usize,
) -> Result<ChunkResult> {
    let mut result = ChunkResult::new();
    let mut lanes: Vec<Vec<bool>> = Vec::with_capacity(LANES);
    let mut idx = start;
    while idx < end {
        let count = (end - idx).min(LANES as u128) as usize;
        lanes.resize_with(count, Vec::new);
        for (j, lane) in lanes.iter_mut().enumerate() {
            write_element(fields, idx + j as u128, lane);
        }
        result.check_lanes(c, spec, &lanes, keep)?;
        idx += count as u128;
    }
    Ok(result)
}

fn merge(parts: Vec<Result<ChunkResult>>, keep: usize) -> Result<ChunkResult> {
    let mut total = ChunkResult {
        tested: 0,
        failure_count: 0,
        failures: Vec::new(),
    };
    for part in parts {
        let part = part?;
        total.tested += part.tested;
        total.failure_count += part.failure_count;
        for f in part.failures {
            if total.failures.len() < keep {
                total.failures.push(f);
            }
        }
    }
    Ok(total)
}

/// Compares `c` against the reference semantics of `spec` on its domain.
pub fn equiv_check(c: &Circuit, spec: &OperatorSpec, cfg: &CheckConfig) -> Result<EquivReport> {
    spec.check_params()?;
    if c.input_count() != spec.input_width() || c.output_count() != spec.output_width() {
        return Err(Error::Config(format!(
            "circuit {} has {}/{} inputs/outputs, {} expects {}/{}",
            c.name(),
            c.input_count(),
            c.output_count(),
            spec,
            spec.input_width(),
            spec.output_width()
        )));
    }
    let keep = cfg.max_failures.max(1);
    let exhaustive = spec
        .domain_size()
        .filter(|&size| cfg.exhaustive_limit < 127 && size <= 1u128 << cfg.exhaustive_limit);

    let fields = spec.input_fields();
    let (mode, total) = match exhaustive {
        Some(size) => {
            let chunks = size.div_ceil(CHUNK as u128) as u64;
            let parts: Vec<_> = (0..chunks)
                .into_par_iter()
                .map(|chunk| {
                    let start = chunk as u128 * CHUNK as u128;
                    let end = (start + CHUNK as u128).min(size);
                    check_range(c, spec, &fields, start, end, keep)
                })
                .collect();
            (CheckMode::Exhaustive, merge(parts, keep)?)
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut batch = spec.corner_cases();
            batch.extend((0..cfg.samples).map(|_| spec.sample(&mut rng)));
            let parts: Vec<_> = batch
                .par_chunks(CHUNK)
                .map(|chunk| check_assignments(c, spec, chunk, keep))
                .collect();
            (CheckMode::Sampled, merge(parts, keep)?)
        }
    };
    Ok(EquivReport {
        mode,
        tested: total.tested,
        failure_count: total.failure_count,
        failures: total.failures,
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{CircuitBuilder, GateFunc, NodeRef};
    use crate::ops::generate;
    use crate::oracle::{Operator, Variant};
    use proptest::prelude::*;

    fn xor_circuit() -> Circuit {
        let mut b = CircuitBuilder::new("xor");
        let x = b.add_input("a");
        let y = b.add_input("b");
        let g = b.add_gate(GateFunc::XOR, x, y).unwrap();
        b.set_outputs(&[g]).unwrap()
    }

    /// Random circuit over `inputs` inputs with `gates` gates of any function.
    fn random_circuit(inputs: usize, gates: &[(u8, u32, u32)], outs: &[u32]) -> Circuit {
        let mut b = CircuitBuilder::new("rand");
        for i in 0..inputs {
            b.add_input(format!("x{i}"));
        }
        for &(f, x, y) in gates {
            let n = b.node_count() as u32;
            b.add_gate(
                GateFunc::new(f % 16).unwrap(),
                NodeRef(x % n),
                NodeRef(y % n),
            )
            .unwrap();
        }
        let n = b.node_count() as u32;
        let outs: Vec<NodeRef> = outs.iter().map(|o| NodeRef(o % n)).collect();
        b.set_outputs(&outs).unwrap()
    }

    fn bits(v: u64, w: usize) -> Vec<bool> {
        (0..w).map(|i| v >> i & 1 == 1).collect()
    }

    #[test]
    fn xor_truth() {
        let c = xor_circuit();
        assert_eq!(evaluate(&c, &[true, true]).unwrap(), vec![false]);
        assert_eq!(evaluate(&c, &[true, false]).unwrap(), vec![true]);
        assert!(matches!(evaluate(&c, &[true]), Err(Error::Argument(_))));
    }

    #[test]
    fn inc3_examples() {
        let spec = OperatorSpec::new(Operator::Inc, 3, 0, Variant::Sequential);
        let c = generate(&spec).unwrap();
        assert_eq!(evaluate(&c, &bits(3, 3)).unwrap(), bits(4, 3));
        assert_eq!(evaluate(&c, &bits(7, 3)).unwrap(), bits(0, 3));
    }

    #[test]
    fn block_matches_single_evaluation() {
        let spec = OperatorSpec::new(Operator::Sum, 8, 0, Variant::Parallel);
        let c = generate(&spec).unwrap();
        let all: Vec<Vec<bool>> = (0..256).map(|v| bits(v, 8)).collect();
        let block = evaluate_block(&c, &all).unwrap();
        for (a, got) in all.iter().zip(&block) {
            assert_eq!(&evaluate(&c, a).unwrap(), got);
        }
        assert!(evaluate_block(&c, &[]).unwrap().is_empty());
        let one = evaluate_block_with(&c, &all, 1).unwrap();
        let four = evaluate_block_with(&c, &all, 4).unwrap();
        assert_eq!(one, four);
        assert_eq!(one, block);
    }

    proptest! {
        #[test]
        fn block_equals_map_on_random_circuits(
            gates in prop::collection::vec((0u8..16, any::<u32>(), any::<u32>()), 1..40),
            outs in prop::collection::vec(any::<u32>(), 1..6),
            batch in prop::collection::vec(any::<u8>(), 0..200),
        ) {
            let c = random_circuit(5, &gates, &outs);
            let assignments: Vec<Vec<bool>> = batch.iter().map(|&v| bits(v as u64, 5)).collect();
            let block = evaluate_block(&c, &assignments).unwrap();
            let single: Vec<Vec<bool>> =
                assignments.iter().map(|a| evaluate(&c, a).unwrap()).collect();
            prop_assert_eq!(block, single);
        }
    }

    #[test]
    fn add4_exhaustive_pass() {
        let spec = OperatorSpec::new(Operator::Add, 4, 0, Variant::Sequential);
        let c = generate(&spec).unwrap();
        let r = equiv_check(&c, &spec, &CheckConfig::default()).unwrap();
        assert_eq!(r.mode, CheckMode::Exhaustive);
        assert_eq!(r.tested, 256);
        assert!(r.passed());
    }

    #[test]
    fn enc_star_checks_only_weight_one() {
        let spec = OperatorSpec::new(Operator::EncStar, 8, 0, Variant::Parallel);
        let c = generate(&spec).unwrap();
        let r = equiv_check(&c, &spec, &CheckConfig::default()).unwrap();
        assert_eq!((r.mode, r.tested), (CheckMode::Exhaustive, 8));
        assert!(r.passed());
    }

    #[test]
    fn corrupted_comparator_is_caught() {
        let spec = OperatorSpec::new(Operator::Cmp, 4, 0, Variant::Sequential);
        let c = generate(&spec).unwrap();
        let mut nodes = c.nodes().to_vec();
        let idx = nodes.iter().rposition(|n| n.is_gate()).unwrap();
        if let Node::Gate { func, .. } = &mut nodes[idx] {
            *func = func.invert_a();
        }
        let broken =
            Circuit::from_raw_parts("broken", nodes, c.outputs().to_vec(), Default::default());
        let r = equiv_check(&broken, &spec, &CheckConfig::default()).unwrap();
        assert!(!r.passed());
        assert!(!r.failures.is_empty());
    }

    #[test]
    fn sampled_mode_is_reproducible() {
        let spec = OperatorSpec::new(Operator::Add, 16, 0, Variant::Parallel);
        let c = generate(&spec).unwrap();
        let cfg = CheckConfig {
            samples: 2_000,
            seed: 7,
            ..CheckConfig::default()
        };
        let a = equiv_check(&c, &spec, &cfg).unwrap();
        let b = equiv_check(&c, &spec, &cfg).unwrap();
        assert_eq!(a.mode, CheckMode::Sampled);
        assert!(a.passed());
        assert_eq!(a.tested, b.tested);
        assert_eq!(a.seed, 7);
    }

    #[test]
    fn mismatched_circuit_is_config_error() {
        let spec = OperatorSpec::new(Operator::Add, 4, 0, Variant::Sequential);
        assert!(matches!(
            equiv_check(&xor_circuit(), &spec, &CheckConfig::default()),
            Err(Error::Config(_))
        ));
    }
}
