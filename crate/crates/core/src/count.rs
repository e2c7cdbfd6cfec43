// SPDX-License-Identifier: Apache-2.0

//! Bit summation, block width, threshold functions and bit sorting.

use crate::encode::unary;
use crate::error::{arg_err, Result};
use crate::ir::Circuit;
use crate::ops::start;
use crate::oracle::{clog2, Operator, OperatorSpec, Variant};
use crate::synth::{Sig, Synth};

/// Carry and sum of three bits, five gates: `a + b + c = 2u + v`.
pub fn full_compressor(s: &mut Synth, a: Sig, b: Sig, c: Sig) -> (Sig, Sig) {
    let t = s.xor(a, b);
    let v = s.xor(t, c);
    let ab = s.and(a, b);
    let tc = s.and(t, c);
    (s.or(ab, tc), v)
}

/// Carry and sum of two bits, two gates.
pub fn half_compressor(s: &mut Synth, a: Sig, b: Sig) -> (Sig, Sig) {
    (s.and(a, b), s.xor(a, b))
}

/// Four-gate compressor valid whenever `(a, b, c) ≠ (1, 0, 1)`; `b` must sit
/// between `a` and `c` in a string whose ones form one block.
pub fn block_compressor(s: &mut Synth, a: Sig, b: Sig, c: Sig) -> (Sig, Sig) {
    let ac = s.or(a, c);
    let u = s.and(b, ac);
    let t = s.xor(a, b);
    (u, s.xor(t, c))
}

/// Column-wise chains: each column folds its bits left to right, sending
/// every carry to the next column.
fn chain_columns(s: &mut Synth, mut cols: Vec<Vec<Sig>>) -> Vec<Sig> {
    let mut out = Vec::new();
    let mut w = 0;
    while w < cols.len() {
        let bits = std::mem::take(&mut cols[w]);
        let mut carries = Vec::new();
        let mut it = bits.into_iter();
        let mut acc = it.next().unwrap_or(Sig::ZERO);
        let rest: Vec<Sig> = it.collect();
        for pair in rest.chunks(2) {
            let (u, v) = match *pair {
                [b, c] => full_compressor(s, acc, b, c),
                [b] => half_compressor(s, acc, b),
                _ => unreachable!(),
            };
            acc = v;
            carries.push(u);
        }
        out.push(acc);
        if !carries.is_empty() {
            if cols.len() == w + 1 {
                cols.push(Vec::new());
            }
            cols[w + 1].extend(carries);
        }
        w += 1;
    }
    out
}

/// Rounds of parallel full compressors until every column holds at most two
/// bits, then one carry-propagating pass.
fn wallace_columns(s: &mut Synth, mut cols: Vec<Vec<Sig>>) -> Vec<Sig> {
    while cols.iter().any(|c| c.len() > 2) {
        let mut next: Vec<Vec<Sig>> = vec![Vec::new(); cols.len() + 1];
        for (w, col) in cols.iter().enumerate() {
            let mut chunks = col.chunks_exact(3);
            for t in &mut chunks {
                let (u, v) = full_compressor(s, t[0], t[1], t[2]);
                next[w].push(v);
                next[w + 1].push(u);
            }
            next[w].extend_from_slice(chunks.remainder());
        }
        while next.last().is_some_and(|c| c.is_empty()) {
            next.pop();
        }
        cols = next;
    }
    let mut out = Vec::new();
    let mut carry: Option<Sig> = None;
    for col in cols {
        let mut bits = col;
        bits.extend(carry.take());
        let (u, v) = match bits[..] {
            [] => (None, Sig::ZERO),
            [a] => (None, a),
            [a, b] => {
                let (u, v) = half_compressor(s, a, b);
                (Some(u), v)
            }
            [a, b, c] => {
                let (u, v) = full_compressor(s, a, b, c);
                (Some(u), v)
            }
            _ => unreachable!("columns hold at most two bits plus a carry"),
        };
        out.push(v);
        carry = u;
    }
    out.extend(carry);
    out
}

fn fit(mut bits: Vec<Sig>, width: usize) -> Vec<Sig> {
    // Positions past `width` carry provably zero values.
    bits.resize(width, Sig::ZERO);
    bits
}

/// Binary weight of `x`, `⌈log(n+1)⌉` bits.
pub fn sum(s: &mut Synth, x: &[Sig], variant: Variant) -> Vec<Sig> {
    let cols = vec![x.to_vec()];
    let bits = match variant {
        Variant::Sequential => chain_columns(s, cols),
        Variant::Parallel => wallace_columns(s, cols),
    };
    fit(bits, clog2(x.len() + 1))
}

pub fn gen_sum(n: usize, variant: Variant) -> Result<Circuit> {
    if n < 1 {
        return arg_err("sum needs n >= 1");
    }
    let mut s = start(&OperatorSpec::new(Operator::Sum, n, 0, variant));
    let x = s.inputs("x", n);
    let out = sum(&mut s, &x, variant);
    s.finish(&out)
}

/// One chain of block compressors over a single-block string: returns the
/// sum bit and the carry string, which is again a single block.
fn block_chain(s: &mut Synth, x: &[Sig]) -> (Sig, Vec<Sig>) {
    let Some((&first, rest)) = x.split_first() else {
        return (Sig::ZERO, Vec::new());
    };
    let mut acc = first;
    let mut carries = Vec::new();
    for pair in rest.chunks(2) {
        let c = pair.get(1).copied().unwrap_or(Sig::ZERO);
        let (u, v) = block_compressor(s, acc, pair[0], c);
        acc = v;
        carries.push(u);
    }
    (acc, carries)
}

/// Width of the block of ones in `x`.
pub fn block_width(s: &mut Synth, x: &[Sig], variant: Variant) -> Vec<Sig> {
    let width = clog2(x.len() + 1);
    match variant {
        Variant::Sequential => {
            let mut out = Vec::new();
            let mut row = x.to_vec();
            while !row.is_empty() {
                let (v, next) = block_chain(s, &row);
                out.push(v);
                row = next;
            }
            fit(out, width)
        }
        Variant::Parallel => {
            // Consecutive triples of a single-block string yield sum and
            // carry strings that are single blocks themselves.
            let mut cols: Vec<Vec<Sig>> = Vec::new();
            let mut work = vec![(0usize, x.to_vec())];
            while let Some((w, string)) = work.pop() {
                if cols.len() <= w {
                    cols.resize(w + 1, Vec::new());
                }
                if string.len() < 3 {
                    cols[w].extend(string);
                    continue;
                }
                let mut sums = Vec::new();
                let mut carries = Vec::new();
                let mut chunks = string.chunks_exact(3);
                for t in &mut chunks {
                    let (u, v) = block_compressor(s, t[0], t[1], t[2]);
                    sums.push(v);
                    carries.push(u);
                }
                cols[w].extend_from_slice(chunks.remainder());
                work.push((w + 1, carries));
                work.push((w, sums));
            }
            fit(wallace_columns(s, cols), width)
        }
    }
}

pub fn gen_bw(n: usize, variant: Variant) -> Result<Circuit> {
    if n < 1 {
        return arg_err("block width needs n >= 1");
    }
    let mut s = start(&OperatorSpec::new(Operator::Bw, n, 0, variant));
    let x = s.inputs("x", n);
    let out = block_width(&mut s, &x, variant);
    s.finish(&out)
}

/// `[ν(x) ≥ k]` by comparing the weight with the constant `k`, LSB first.
pub fn gen_thr(n: usize, k: usize, variant: Variant) -> Result<Circuit> {
    if n < 1 || k > n {
        return arg_err(format!("thr needs n >= 1 and 0 <= k <= n, got n={n} k={k}"));
    }
    let mut s = start(&OperatorSpec::new(Operator::Thr, n, k, variant));
    let x = s.inputs("x", n);
    let total = sum(&mut s, &x, variant);
    let mut ge = Sig::ONE;
    for (j, &bit) in total.iter().enumerate() {
        ge = if k >> j & 1 == 1 {
            s.and(bit, ge)
        } else {
            s.or(bit, ge)
        };
    }
    s.finish(&[ge])
}

/// Zeros on the left, ones on the right: reversed `UN_n(SUM(x))`.
pub fn gen_sort(n: usize, variant: Variant) -> Result<Circuit> {
    if n < 1 {
        return arg_err("sort needs n >= 1");
    }
    let mut s = start(&OperatorSpec::new(Operator::Sort, n, 0, variant));
    let x = s.inputs("x", n);
    let total = sum(&mut s, &x, variant);
    let mut out = unary(&mut s, &total, n);
    out.reverse();
    s.finish(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::metrics;
    use crate::oracle::{bit_string, parse_bits, to_num};
    use crate::sim::evaluate;

    const BOTH: [Variant; 2] = [Variant::Sequential, Variant::Parallel];

    fn compressor_circuit(kind: fn(&mut Synth, Sig, Sig, Sig) -> (Sig, Sig)) -> Circuit {
        let mut s = Synth::new("comp");
        let x = s.inputs("x", 3);
        let (u, v) = kind(&mut s, x[0], x[1], x[2]);
        s.finish(&[v, u]).unwrap()
    }

    #[test]
    fn compressors_preserve_sum() {
        let full = compressor_circuit(full_compressor);
        let block = compressor_circuit(block_compressor);
        assert_eq!(full.gate_count(), 5);
        assert_eq!(block.gate_count(), 4);
        for v in 0..8u32 {
            let bits: Vec<bool> = (0..3).map(|i| v >> i & 1 == 1).collect();
            let weight = bits.iter().filter(|&&b| b).count() as u128;
            assert_eq!(to_num(&evaluate(&full, &bits).unwrap()), weight);
            if bits != [true, false, true] {
                assert_eq!(to_num(&evaluate(&block, &bits).unwrap()), weight);
            }
        }
        let mut s = Synth::new("half");
        let x = s.inputs("x", 2);
        let (u, v) = half_compressor(&mut s, x[0], x[1]);
        let half = s.finish(&[v, u]).unwrap();
        assert_eq!(half.gate_count(), 2);
        for v in 0..4u32 {
            let bits: Vec<bool> = (0..2).map(|i| v >> i & 1 == 1).collect();
            let weight = bits.iter().filter(|&&b| b).count() as u128;
            assert_eq!(to_num(&evaluate(&half, &bits).unwrap()), weight);
        }
    }

    #[test]
    fn sum_examples_and_caps() {
        for v in BOTH {
            let c = gen_sum(7, v).unwrap();
            assert_eq!(
                to_num(&evaluate(&c, &parse_bits("1011011").unwrap()).unwrap()),
                5
            );
            assert_eq!(gen_sum(3, v).unwrap().gate_count(), 5);
            for n in 1..=64 {
                assert!(gen_sum(n, v).unwrap().gate_count() <= 5 * n, "n={n} {v}");
            }
        }
        assert!(gen_sum(15, Variant::Sequential).unwrap().gate_count() <= 75);
    }

    #[test]
    fn block_width_examples() {
        for v in BOTH {
            let c = gen_bw(8, v).unwrap();
            assert_eq!(
                to_num(&evaluate(&c, &parse_bits("00111000").unwrap()).unwrap()),
                3
            );
            assert_eq!(to_num(&evaluate(&c, &[false; 8]).unwrap()), 0);
        }
        for n in 1..=64 {
            assert!(
                gen_bw(n, Variant::Sequential).unwrap().gate_count() <= 4 * n,
                "n={n}"
            );
        }
    }

    #[test]
    fn block_width_all_blocks() {
        for v in BOTH {
            for n in 1..=24 {
                let c = gen_bw(n, v).unwrap();
                for start in 0..n {
                    for end in start..=n {
                        let bits: Vec<bool> = (0..n).map(|i| i >= start && i < end).collect();
                        assert_eq!(
                            to_num(&evaluate(&c, &bits).unwrap()),
                            (end - start) as u128,
                            "n={n} block={start}..{end} {v}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn threshold_examples() {
        let c = gen_thr(4, 2, Variant::Sequential).unwrap();
        assert_eq!(
            evaluate(&c, &parse_bits("0110").unwrap()).unwrap(),
            vec![true]
        );
        let c = gen_thr(7, 4, Variant::Parallel).unwrap();
        assert_eq!(
            evaluate(&c, &parse_bits("1110000").unwrap()).unwrap(),
            vec![false]
        );
        let c = gen_thr(5, 0, Variant::Parallel).unwrap();
        assert_eq!(c.gate_count(), 0);
        assert_eq!(evaluate(&c, &[false; 5]).unwrap(), vec![true]);
        assert!(gen_thr(3, 4, Variant::Parallel).is_err());
    }

    #[test]
    fn sort_examples() {
        for v in BOTH {
            let c = gen_sort(4, v).unwrap();
            assert_eq!(
                bit_string(&evaluate(&c, &parse_bits("0110").unwrap()).unwrap()),
                "0011"
            );
            assert_eq!(
                bit_string(&evaluate(&c, &parse_bits("1111").unwrap()).unwrap()),
                "1111"
            );
            let c = gen_sort(10, v).unwrap();
            let out = evaluate(&c, &parse_bits("1001001110").unwrap()).unwrap();
            assert_eq!(bit_string(&out), "0000011111");
        }
    }

    #[test]
    fn parallel_depths_are_logarithmic() {
        for n in [16, 64, 256, 1024] {
            let l = clog2(n);
            assert!(metrics(&gen_sum(n, Variant::Parallel).unwrap()).depth <= 6 * l + 4);
            assert!(metrics(&gen_bw(n, Variant::Parallel).unwrap()).depth <= 6 * l + 4);
        }
    }
}
