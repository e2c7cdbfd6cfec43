// SPDX-License-Identifier: Apache-2.0

//! Decoders, demultiplexors, multiplexors and shifters.

use crate::error::{arg_err, Result};
use crate::ir::{Circuit, GateFunc};
use crate::ops::start;
use crate::oracle::{clog2, Operator, OperatorSpec, Variant};
use crate::synth::{Sig, Synth};

/// First `count` minterms of `addr` (LSB first): output `j` is `[addr = j]`.
///
/// The address splits into a low half of `⌈m/2⌉` bits and a high half whose
/// decoders are combined pairwise. With `data`, the literals of bit 0 become
/// `¬x_0·y` and `x_0·y`, turning the decoder into a demultiplexor.
pub fn decode(s: &mut Synth, addr: &[Sig], count: usize, data: Option<Sig>) -> Vec<Sig> {
    match addr.len() {
        0 => vec![data.unwrap_or(Sig::ONE); count.min(1)],
        1 => {
            let lits = match data {
                Some(y) => vec![s.and(!addr[0], y), s.and(addr[0], y)],
                None => vec![!addr[0], addr[0]],
            };
            lits.into_iter().take(count).collect()
        }
        m => {
            let k = m.div_ceil(2);
            let block = 1usize << k;
            let low = decode(s, &addr[..k], count.min(block), data);
            let high = decode(s, &addr[k..], count.div_ceil(block), None);
            (0..count)
                .map(|j| s.and(low[j % block], high[j / block]))
                .collect()
        }
    }
}

pub fn gen_decoder(n: usize, demux: bool) -> Result<Circuit> {
    if n < 2 {
        return arg_err(format!("decoder needs n >= 2, got {n}"));
    }
    let op = if demux {
        Operator::Demux
    } else {
        Operator::Dec
    };
    let mut s = start(&OperatorSpec::new(op, n, 0, Variant::Parallel));
    let addr = s.inputs("x", clog2(n));
    let data = demux.then(|| s.input("y0"));
    let out = decode(&mut s, &addr, n, data);
    s.finish(&out)
}

/// `k`-bit word selection with decoders shared across the bit planes:
/// `∨_α X_2^α · MUX(X_1; Y_α)` over blocks of `2^q` words.
pub fn mux_words(s: &mut Synth, addr: &[Sig], words: &[Vec<Sig>], q: usize) -> Vec<Sig> {
    let n = words.len();
    let q = q.min(addr.len());
    let block = 1usize << q;
    let blocks = n.div_ceil(block);
    let low = decode(s, &addr[..q], block.min(n), None);
    let high = decode(s, &addr[q..], blocks, None);
    let k = words.first().map_or(0, |w| w.len());
    (0..k)
        .map(|t| {
            let inner: Vec<Sig> = (0..blocks)
                .map(|a| {
                    let terms: Vec<Sig> = (a * block..((a + 1) * block).min(n))
                        .map(|j| s.and(low[j % block], words[j][t]))
                        .collect();
                    s.reduce_tree(GateFunc::OR, &terms, Sig::ZERO)
                })
                .collect();
            let outer: Vec<Sig> = inner
                .iter()
                .enumerate()
                .map(|(a, &v)| s.and(high[a], v))
                .collect();
            s.reduce_tree(GateFunc::OR, &outer, Sig::ZERO)
        })
        .collect()
}

/// `y_addr`, Klein–Paterson split with `q = ⌈m/2⌉` low address bits.
pub fn mux(s: &mut Synth, addr: &[Sig], ys: &[Sig]) -> Sig {
    let words: Vec<Vec<Sig>> = ys.iter().map(|&y| vec![y]).collect();
    mux_words(s, addr, &words, addr.len().div_ceil(2))[0]
}

pub fn gen_mux(n: usize) -> Result<Circuit> {
    if n < 2 {
        return arg_err(format!("mux needs n >= 2, got {n}"));
    }
    let mut s = start(&OperatorSpec::new(Operator::Mux, n, 0, Variant::Parallel));
    let addr = s.inputs("x", clog2(n));
    let ys = s.inputs("y", n);
    let out = mux(&mut s, &addr, &ys);
    s.finish(&[out])
}

pub fn gen_mux_k(n: usize, k: usize) -> Result<Circuit> {
    if n < 2 || k < 1 {
        return arg_err(format!("mux-k needs n >= 2 and k >= 1, got n={n} k={k}"));
    }
    let mut s = start(&OperatorSpec::new(Operator::MuxK, n, k, Variant::Parallel));
    let m = clog2(n);
    let addr = s.inputs("x", m);
    let flat = s.inputs("y", n * k);
    let words: Vec<Vec<Sig>> = flat.chunks(k).map(|w| w.to_vec()).collect();
    let q = m.min(clog2(k * n).div_ceil(2));
    let out = mux_words(&mut s, &addr, &words, q);
    s.finish(&out)
}

/// Barrel shifter toward higher string index; `cyclic` wraps around,
/// otherwise the string grows by `k - 1` zero-filled positions.
fn shift(s: &mut Synth, amount: &[Sig], v: &[Sig], k: usize, cyclic: bool) -> Vec<Sig> {
    let n = v.len();
    let mut cur = v.to_vec();
    for (j, &bit) in amount.iter().enumerate() {
        let d = 1usize << j;
        cur = if cyclic {
            (0..n)
                .map(|i| s.mux(bit, cur[(i + n - d % n) % n], cur[i]))
                .collect()
        } else {
            let width = (cur.len() + d).min(n + k - 1);
            (0..width)
                .map(|i| {
                    let moved = if i >= d {
                        cur.get(i - d).copied()
                    } else {
                        None
                    };
                    let kept = cur.get(i).copied();
                    s.mux(bit, moved.unwrap_or(Sig::ZERO), kept.unwrap_or(Sig::ZERO))
                })
                .collect()
        };
    }
    cur
}

pub fn gen_cyc(k: usize, n: usize) -> Result<Circuit> {
    gen_shift(Operator::Cyc, k, n)
}

pub fn gen_sft(k: usize, n: usize) -> Result<Circuit> {
    gen_shift(Operator::Sft, k, n)
}

fn gen_shift(op: Operator, k: usize, n: usize) -> Result<Circuit> {
    if n < 1 || k < 2 {
        return arg_err(format!("{op} needs n >= 1 and k >= 2, got n={n} k={k}"));
    }
    let mut s = start(&OperatorSpec::new(op, n, k, Variant::Parallel));
    let amount = s.inputs("s", clog2(k));
    let v = s.inputs("v", n);
    let out = shift(&mut s, &amount, &v, k, op == Operator::Cyc);
    s.finish(&out)
}
