// SPDX-License-Identifier: Apache-2.0

//! Prefix and suffix sum schedules and their instantiation with gadgets.
//!
//! A schedule works on numbered slots. Slots `0..n` hold the inputs and every
//! step `(left, right)` fills the next slot with `left ∗ right`, where `left`
//! always covers the earlier elements. Each slot therefore holds the sum of a
//! contiguous interval, and schedules never rely on commutativity.

use std::collections::{HashMap, HashSet};

use crate::error::{arg_err, Result};
use crate::ir::{Circuit, GateFunc, Node};
use crate::oracle::Variant;
use crate::synth::{Bundle, Sig, Synth};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixSchedule {
    n: usize,
    steps: Vec<(usize, usize)>,
    prefixes: Vec<usize>,
    suffixes: Vec<usize>,
    depth: usize,
}

/// Interval-keyed slot allocator that never computes one interval twice.
struct Plan {
    n: usize,
    steps: Vec<(usize, usize)>,
    slot_of: HashMap<(usize, usize), usize>,
    span: Vec<(usize, usize)>,
}

impl Plan {
    fn new(n: usize) -> Self {
        Plan {
            n,
            steps: Vec::new(),
            slot_of: (0..n).map(|i| ((i, i), i)).collect(),
            span: (0..n).map(|i| (i, i)).collect(),
        }
    }

    fn combine(&mut self, left: (usize, usize), right: (usize, usize)) -> usize {
        debug_assert_eq!(left.1 + 1, right.0, "operands must be adjacent");
        let target = (left.0, right.1);
        if let Some(&slot) = self.slot_of.get(&target) {
            return slot;
        }
        let (a, b) = (self.slot_of[&left], self.slot_of[&right]);
        self.steps.push((a, b));
        let slot = self.n + self.steps.len() - 1;
        self.slot_of.insert(target, slot);
        self.span.push(target);
        slot
    }

    fn finish(self, with_suffixes: bool) -> PrefixSchedule {
        let n = self.n;
        let prefixes = (0..n).map(|i| self.slot_of[&(0, i)]).collect();
        let suffixes = if with_suffixes {
            (0..n).map(|i| self.slot_of[&(i, n - 1)]).collect()
        } else {
            Vec::new()
        };
        let mut level = vec![0usize; n + self.steps.len()];
        for (j, &(a, b)) in self.steps.iter().enumerate() {
            level[n + j] = level[a].max(level[b]) + 1;
        }
        let depth = level.iter().copied().max().unwrap_or(0);
        PrefixSchedule {
            n,
            steps: self.steps,
            prefixes,
            suffixes,
            depth,
        }
    }
}

type Interval = (usize, usize);

/// Brent–Kung combinations for `n` elements over blocks aligned as in a
/// power-of-two tree and clipped at `n - 1`: the up-sweep, the prefix
/// down-sweep, and with `suffixes` the mirrored down-sweep
/// `s_j = block(j) ∗ s_(j + |block|)` over the same blocks. Combinations no
/// requested output depends on are dropped.
fn brent_kung_combos(n: usize, suffixes: bool) -> Vec<(Interval, Interval)> {
    let k = crate::oracle::clog2(n);
    let clip = |l: usize, r: usize| (l, r.min(n - 1));
    let mut made: HashSet<Interval> = (0..n).map(|i| (i, i)).collect();
    let mut combos = Vec::new();
    let mut push = |l: Interval, r: Interval, combos: &mut Vec<(Interval, Interval)>| {
        if made.insert((l.0, r.1)) {
            combos.push((l, r));
        }
    };
    for d in 1..=k {
        let half = 1 << (d - 1);
        for start in (0..n).step_by(1 << d) {
            if start + half < n {
                push(
                    clip(start, start + half - 1),
                    clip(start + half, start + 2 * half - 1),
                    &mut combos,
                );
            }
        }
    }
    for d in (1..k).rev() {
        let half = 1 << (d - 1);
        for e in ((1 << d) - 1..n - 1).step_by(1 << d) {
            push((0, e), clip(e + 1, e + half), &mut combos);
        }
    }
    if suffixes {
        for d in (0..k).rev() {
            let size = 1 << d;
            for j in (size..n).step_by(2 * size) {
                if j + size < n {
                    push(clip(j, j + size - 1), (j + size, n - 1), &mut combos);
                }
            }
        }
    }
    let mut needed: HashSet<Interval> = (0..n).map(|i| (0, i)).collect();
    if suffixes {
        needed.extend((0..n).map(|i| (i, n - 1)));
    }
    let mut keep = vec![false; combos.len()];
    for (j, &(l, r)) in combos.iter().enumerate().rev() {
        if needed.contains(&(l.0, r.1)) {
            keep[j] = true;
            needed.insert(l);
            needed.insert(r);
        }
    }
    combos
        .into_iter()
        .zip(keep)
        .filter_map(|(c, keep)| keep.then_some(c))
        .collect()
}

/// `p_i = (…(x_1 ∗ x_2) ∗ …) ∗ x_i`, `n - 1` steps.
pub fn serial_schedule(n: usize) -> Result<PrefixSchedule> {
    if n == 0 {
        return arg_err("prefix schedule needs n >= 1");
    }
    let mut plan = Plan::new(n);
    for i in 1..n {
        plan.combine((0, i - 1), (i, i));
    }
    Ok(plan.finish(false))
}

/// Brent–Kung style network: a balanced up-sweep tree followed by a down-sweep
/// that fills each missing prefix from the nearest earlier one.
pub fn ofman_schedule(n: usize) -> Result<PrefixSchedule> {
    if n < 2 {
        return arg_err("ofman schedule needs n >= 2");
    }
    let mut plan = Plan::new(n);
    for (l, r) in brent_kung_combos(n, false) {
        plan.combine(l, r);
    }
    Ok(plan.finish(false))
}

/// All prefixes and suffixes. The parallel form adds a suffix down-sweep to
/// the Brent–Kung network, reusing its up-sweep blocks.
pub fn prefix_suffix_schedule(n: usize, variant: Variant) -> Result<PrefixSchedule> {
    if n < 2 {
        return arg_err("prefix-suffix schedule needs n >= 2");
    }
    let mut plan = Plan::new(n);
    match variant {
        Variant::Sequential => {
            for i in 1..n {
                plan.combine((0, i - 1), (i, i));
            }
            for i in (0..n - 1).rev() {
                plan.combine((i, i), (i + 1, n - 1));
            }
        }
        Variant::Parallel => {
            for (l, r) in brent_kung_combos(n, true) {
                plan.combine(l, r);
            }
        }
    }
    Ok(plan.finish(true))
}

/// Serial schedule for the sequential variant, Ofman otherwise.
pub fn prefix_schedule(n: usize, variant: Variant) -> Result<PrefixSchedule> {
    match variant {
        Variant::Parallel if n >= 2 => ofman_schedule(n),
        _ => serial_schedule(n),
    }
}

impl PrefixSchedule {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> &[(usize, usize)] {
        &self.steps
    }

    pub fn size(&self) -> usize {
        self.steps.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Slot holding `p_i` at index `i - 1`.
    pub fn prefix_slots(&self) -> &[usize] {
        &self.prefixes
    }

    /// Slot holding `s_i` at index `i - 1`; empty for prefix-only schedules.
    pub fn suffix_slots(&self) -> &[usize] {
        &self.suffixes
    }

    /// Replays the steps over the free semigroup: every slot becomes the word
    /// of element indices it multiplies together.
    pub fn replay_words(&self) -> Vec<Vec<usize>> {
        let mut words: Vec<Vec<usize>> = (0..self.n).map(|i| vec![i]).collect();
        for &(a, b) in &self.steps {
            let mut w = words[a].clone();
            w.extend_from_slice(&words[b]);
            words.push(w);
        }
        words
    }

    /// Output slots in circuit order: `p_1..p_n`, then `s_2..s_n`.
    fn output_slots(&self) -> Vec<usize> {
        let mut out = self.prefixes.clone();
        out.extend(self.suffixes.iter().skip(1));
        out
    }
}

/// A `w`-bit binary operation given as a template circuit with inputs
/// `a_0..a_(w-1), b_0..b_(w-1)` (left operand first) and `w` outputs.
#[derive(Clone, Debug)]
pub struct Gadget {
    width: usize,
    template: Circuit,
}

impl Gadget {
    pub fn new(template: Circuit) -> Result<Self> {
        let width = template.output_count();
        if template.input_count() != 2 * width {
            return arg_err("gadget template needs 2w inputs for w outputs");
        }
        Ok(Gadget { width, template })
    }

    fn binary(name: &str, f: GateFunc) -> Self {
        let mut s = Synth::new(name);
        let a = s.input("a0");
        let b = s.input("b0");
        let g = s.gate(f, a, b);
        Gadget::new(s.finish(&[g]).expect("one-gate template")).expect("width 1")
    }

    pub fn and() -> Self {
        Gadget::binary("and", GateFunc::AND)
    }

    pub fn or() -> Self {
        Gadget::binary("or", GateFunc::OR)
    }

    pub fn xor() -> Self {
        Gadget::binary("xor", GateFunc::XOR)
    }

    /// `[a1, b1] ⋆ [a2, b2] = [a2 ⊕ b2·a1, b2·b1]`, three gates.
    pub fn star() -> Self {
        let mut s = Synth::new("star");
        let a1 = s.input("a0");
        let b1 = s.input("a1");
        let a2 = s.input("b0");
        let b2 = s.input("b1");
        let t = s.and(b2, a1);
        let first = s.xor(a2, t);
        let second = s.and(b2, b1);
        Gadget::new(s.finish(&[first, second]).expect("star template")).expect("width 2")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn cost(&self) -> usize {
        self.template.gate_count()
    }

    pub fn depth(&self) -> usize {
        crate::ir::metrics(&self.template).depth
    }

    pub fn template(&self) -> &Circuit {
        &self.template
    }

    /// Replays the template on `left` and `right`; constant operands fold.
    pub fn apply(&self, s: &mut Synth, left: &[Sig], right: &[Sig]) -> Vec<Sig> {
        let mut operands = left.iter().chain(right).copied();
        let mut values: Vec<Sig> = Vec::with_capacity(self.template.nodes().len());
        for node in self.template.nodes() {
            let v = match node {
                Node::Input(_) => operands.next().expect("operand count checked"),
                Node::Const(c) => Sig::Const(*c),
                Node::Gate { func, a, b } => s.gate(*func, values[a.index()], values[b.index()]),
            };
            values.push(v);
        }
        self.template
            .outputs()
            .iter()
            .map(|o| values[o.index()])
            .collect()
    }
}

/// Emits the schedule with `g` as the combining operation. Returns `p_1..p_n`
/// followed by `s_2..s_n` when the schedule has suffixes.
pub fn instantiate(
    sched: &PrefixSchedule,
    g: &Gadget,
    inputs: &[Bundle],
    s: &mut Synth,
) -> Result<Vec<Bundle>> {
    if inputs.len() != sched.n {
        return arg_err(format!(
            "schedule over {} elements got {} bundles",
            sched.n,
            inputs.len()
        ));
    }
    if let Some(b) = inputs.iter().find(|b| b.width() != g.width()) {
        return arg_err(format!(
            "gadget width {} got bundle of width {}",
            g.width(),
            b.width()
        ));
    }
    let order = inputs[0].order;
    let mut slots: Vec<Vec<Sig>> = inputs.iter().map(|b| b.wires.clone()).collect();
    for &(a, b) in &sched.steps {
        let v = g.apply(s, &slots[a], &slots[b]);
        slots.push(v);
    }
    Ok(sched
        .output_slots()
        .into_iter()
        .map(|i| Bundle::new(slots[i].clone(), order))
        .collect())
}

/// Single-bit prefix network over `xs` with a one-gate gadget.
pub fn prefix_bits(s: &mut Synth, g: &Gadget, xs: &[Sig], variant: Variant) -> Vec<Sig> {
    if xs.is_empty() {
        return Vec::new();
    }
    let sched = prefix_schedule(xs.len(), variant).expect("n >= 1");
    let bundles: Vec<Bundle> = xs.iter().map(|&x| Bundle::string(vec![x])).collect();
    instantiate(&sched, g, &bundles, s)
        .expect("widths match")
        .into_iter()
        .map(|b| b.wires[0])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::metrics;
    use crate::sim::evaluate;
    use proptest::prelude::*;

    fn assert_replay(sched: &PrefixSchedule) {
        let n = sched.n();
        let words = sched.replay_words();
        for (i, &slot) in sched.prefix_slots().iter().enumerate() {
            assert_eq!(
                words[slot],
                (0..=i).collect::<Vec<_>>(),
                "p_{} n={n}",
                i + 1
            );
        }
        for (i, &slot) in sched.suffix_slots().iter().enumerate() {
            assert_eq!(words[slot], (i..n).collect::<Vec<_>>(), "s_{} n={n}", i + 1);
        }
    }

    #[test]
    fn serial_counts() {
        assert_eq!(serial_schedule(1).unwrap().size(), 0);
        let s = serial_schedule(5).unwrap();
        assert_eq!((s.size(), s.depth()), (4, 4));
        assert_eq!(s.replay_words()[s.prefix_slots()[2]], vec![0, 1, 2]);
        assert!(serial_schedule(0).is_err());
    }

    #[test]
    fn ofman_counts() {
        let s = ofman_schedule(8).unwrap();
        assert_eq!((s.size(), s.depth()), (11, 4));
        let s = ofman_schedule(2).unwrap();
        assert_eq!((s.size(), s.depth()), (1, 1));
        for k in 2..=10 {
            let n = 1 << k;
            let s = ofman_schedule(n).unwrap();
            assert_eq!(s.size(), 2 * n - 2 - k, "n={n}");
            assert_eq!(s.depth(), 2 * k - 2, "n={n}");
        }
        let s = ofman_schedule(6).unwrap();
        assert!(s.size() <= 10);
        assert_replay(&s);
        assert!(ofman_schedule(1).is_err());
    }

    #[test]
    fn prefix_suffix_counts() {
        let s = prefix_suffix_schedule(4, Variant::Sequential).unwrap();
        assert_eq!(s.size(), 5);
        let s = prefix_suffix_schedule(2, Variant::Parallel).unwrap();
        assert_eq!(s.size(), 1);
        let s = prefix_suffix_schedule(8, Variant::Parallel).unwrap();
        assert_replay(&s);
        let mut distinct: Vec<usize> = s.prefix_slots().to_vec();
        distinct.extend(s.suffix_slots());
        distinct.sort();
        distinct.dedup();
        assert_eq!(distinct.len(), 15);
        for k in 2..=8 {
            let n = 1 << k;
            assert!(prefix_suffix_schedule(n, Variant::Parallel).unwrap().size() <= 3 * n - 3);
        }
        for n in 2..=32 {
            assert_eq!(
                prefix_suffix_schedule(n, Variant::Sequential)
                    .unwrap()
                    .size(),
                2 * n - 3
            );
        }
        assert!(prefix_suffix_schedule(1, Variant::Parallel).is_err());
    }

    #[test]
    fn every_schedule_replays_correctly() {
        for n in 1..=64 {
            let mut all = vec![serial_schedule(n).unwrap()];
            if n >= 2 {
                all.push(ofman_schedule(n).unwrap());
                all.push(prefix_suffix_schedule(n, Variant::Sequential).unwrap());
                all.push(prefix_suffix_schedule(n, Variant::Parallel).unwrap());
            }
            for s in &all {
                assert_replay(s);
                assert!(s.size() + s.depth() + 2 >= 2 * n, "n={n}");
            }
        }
    }

    fn prefix_circuit(n: usize, g: &Gadget, variant: Variant) -> Circuit {
        let mut s = Synth::new("pref");
        let xs = s.inputs("x", n);
        let out = prefix_bits(&mut s, g, &xs, variant);
        s.finish(&out).unwrap()
    }

    #[test]
    fn and_gadget_on_ofman_eight() {
        let c = prefix_circuit(8, &Gadget::and(), Variant::Parallel);
        let m = metrics(&c);
        assert_eq!((m.size, m.depth), (11, 4));
    }

    #[test]
    fn or_gadget_serial_example() {
        let c = prefix_circuit(3, &Gadget::or(), Variant::Sequential);
        assert_eq!(
            evaluate(&c, &[false, true, false]).unwrap(),
            vec![false, true, true]
        );
    }

    #[test]
    fn star_gadget_chain_is_carry() {
        let g = Gadget::star();
        assert_eq!((g.width(), g.cost(), g.depth()), (2, 3, 2));
        let n = 4;
        let sched = serial_schedule(n).unwrap();
        let mut s = Synth::new("car");
        let xs = s.inputs("x", n);
        let ys = s.inputs("y", n);
        let bundles: Vec<Bundle> = (0..n)
            .map(|i| Bundle::number(vec![xs[i], if i == 0 { Sig::ONE } else { ys[i] }]))
            .collect();
        let out = instantiate(&sched, &g, &bundles, &mut s).unwrap();
        let carries: Vec<Sig> = out.iter().map(|b| b.wires[0]).collect();
        let c = s.finish(&carries).unwrap();
        assert_eq!(c.gate_count(), 2 * n - 2);
        for v in 0..1u32 << (2 * n) {
            let bits: Vec<bool> = (0..2 * n).map(|i| v >> i & 1 == 1).collect();
            let mut want = vec![bits[0]];
            for i in 1..n {
                let prev = want[i - 1];
                want.push(bits[i] ^ (bits[n + i] & prev));
            }
            assert_eq!(evaluate(&c, &bits).unwrap(), want);
        }
    }

    #[test]
    fn width_mismatch_is_rejected() {
        let sched = serial_schedule(2).unwrap();
        let mut s = Synth::new("bad");
        let xs = s.inputs("x", 2);
        let bundles = vec![Bundle::number(vec![xs[0]]), Bundle::number(vec![xs[1]])];
        assert!(instantiate(&sched, &Gadget::star(), &bundles, &mut s).is_err());
    }

    fn fold_check(n: usize, g: &Gadget, f: fn(bool, bool) -> bool, variant: Variant) {
        let c = prefix_circuit(n, g, variant);
        for v in 0..1u32 << n {
            let bits: Vec<bool> = (0..n).map(|i| v >> i & 1 == 1).collect();
            let mut acc = bits[0];
            let mut want = vec![acc];
            for &b in &bits[1..] {
                acc = f(acc, b);
                want.push(acc);
            }
            assert_eq!(evaluate(&c, &bits).unwrap(), want);
        }
    }

    #[test]
    fn gadgets_match_fold_exhaustively() {
        for n in 1..=16 {
            for variant in [Variant::Sequential, Variant::Parallel] {
                fold_check(n, &Gadget::and(), |a, b| a & b, variant);
                fold_check(n, &Gadget::or(), |a, b| a | b, variant);
                fold_check(n, &Gadget::xor(), |a, b| a ^ b, variant);
            }
        }
    }

    proptest! {
        #[test]
        fn ofman_replay_any_n(n in 2usize..200) {
            let s = ofman_schedule(n).unwrap();
            let words = s.replay_words();
            for (i, &slot) in s.prefix_slots().iter().enumerate() {
                prop_assert_eq!(&words[slot], &(0..=i).collect::<Vec<_>>());
            }
            prop_assert!(s.size() <= 2 * n - 2);
            prop_assert!(s.size() + s.depth() + 2 >= 2 * n);
        }
    }
}
