// SPDX-License-Identifier: Apache-2.0

//! Encoder, unary conversions, truncation, first-one indicator and priority
//! encoder.

use crate::error::{arg_err, Result};
use crate::ir::{Circuit, GateFunc};
use crate::ops::start;
use crate::oracle::{clog2, Operator, OperatorSpec, Variant};
use crate::prefix::{prefix_bits, Gadget};
use crate::select::decode;
use crate::synth::{Sig, Synth};

/// Index bits of `x` as a linear map plus the parity of all of `x`.
///
/// For `n = 2^k + p` the first `2^k` and last `p` elements are encoded
/// separately; low bits are XORed, bit `k` is the parity of the tail. Callers
/// that ignore the parity leave its final gate dead.
fn phi(s: &mut Synth, x: &[Sig]) -> (Vec<Sig>, Sig) {
    let n = x.len();
    if n == 1 {
        return (Vec::new(), x[0]);
    }
    let half = 1usize << (clog2(n) - 1);
    let (head, head_par) = phi(s, &x[..half]);
    let (tail, tail_par) = phi(s, &x[half..]);
    let mut bits = head;
    for (b, &t) in tail.iter().enumerate() {
        bits[b] = s.xor(bits[b], t);
    }
    bits.push(tail_par);
    let parity = s.xor(head_par, tail_par);
    (bits, parity)
}

pub fn encode(s: &mut Synth, x: &[Sig]) -> Vec<Sig> {
    phi(s, x).0
}

pub fn gen_enc(n: usize, total: bool) -> Result<Circuit> {
    if n < 2 {
        return arg_err(format!("encoder needs n >= 2, got {n}"));
    }
    let op = if total {
        Operator::Enc
    } else {
        Operator::EncStar
    };
    let mut s = start(&OperatorSpec::new(op, n, 0, Variant::Parallel));
    let x = s.inputs("x", n);
    let out = encode(&mut s, &x);
    s.finish(&out)
}

/// `UN_(2^m - 1)` by doubling: `[s ∨ y, y, s·y]` for the top address bit `y`.
fn unary_full(s: &mut Synth, k: &[Sig]) -> Vec<Sig> {
    let Some((&top, low)) = k.split_last() else {
        return Vec::new();
    };
    let inner = unary_full(s, low);
    let mut out: Vec<Sig> = inner.iter().map(|&v| s.or(v, top)).collect();
    out.push(top);
    out.extend(inner.iter().map(|&v| s.and(v, top)));
    out
}

/// `[1]^k [0]^(n-k)` for the number `k` given LSB first.
pub fn unary(s: &mut Synth, k: &[Sig], n: usize) -> Vec<Sig> {
    let m = k.len();
    if n + 1 == 1 << m {
        return unary_full(s, k);
    }
    // Block form: blocks of 2^h positions, where h low address bits select
    // the position inside the first block that is not all ones.
    let h = m.div_ceil(2);
    let block = 1usize << h;
    let p = (n + 1).div_ceil(block);
    let a = decode(s, &k[h..], p, None);
    let b = prefix_bits(s, &Gadget::or(), &a, Variant::Parallel);
    let mut inner = unary_full(s, &k[..h]);
    inner.push(Sig::ZERO);
    (0..n)
        .map(|i| {
            let (blk, j) = (i / block, i % block);
            let t = s.and(inner[j], a[blk]);
            s.or(t, !b[blk])
        })
        .collect()
}

pub fn gen_un(n: usize) -> Result<Circuit> {
    if n < 1 {
        return arg_err("unary converter needs n >= 1");
    }
    let mut s = start(&OperatorSpec::new(Operator::Un, n, 0, Variant::Parallel));
    let k = s.inputs("k", clog2(n + 1));
    let out = unary(&mut s, &k, n);
    s.finish(&out)
}

/// `y_j = ⊕_(i ≥ 1) s_(i·2^j)` in one shared XOR tree; `y_0` is the parity of
/// the whole string.
fn unary_inverse_rec(s: &mut Synth, xs: &[Sig]) -> Vec<Sig> {
    if xs.len() == 1 {
        return vec![xs[0]];
    }
    let odd: Vec<Sig> = xs.iter().step_by(2).copied().collect();
    let even: Vec<Sig> = xs.iter().skip(1).step_by(2).copied().collect();
    let upper = unary_inverse_rec(s, &even);
    let odd_par = s.reduce_tree(GateFunc::XOR, &odd, Sig::ZERO);
    let mut out = vec![s.xor(odd_par, upper[0])];
    out.extend(upper);
    out
}

/// Binary value of a unary string `s_1 … s_n` (index 0 is `s_1`).
pub fn unary_inverse(s: &mut Synth, xs: &[Sig]) -> Vec<Sig> {
    if xs.is_empty() {
        return Vec::new();
    }
    unary_inverse_rec(s, xs)
}

pub fn gen_un_inv(n: usize) -> Result<Circuit> {
    if n < 1 {
        return arg_err("unary inverse needs n >= 1");
    }
    let mut s = start(&OperatorSpec::new(Operator::UnInv, n, 0, Variant::Parallel));
    let xs = s.inputs("s", n);
    let out = unary_inverse(&mut s, &xs);
    s.finish(&out)
}

pub fn gen_trn(n: usize) -> Result<Circuit> {
    if n < 1 {
        return arg_err("truncation needs n >= 1");
    }
    let mut s = start(&OperatorSpec::new(Operator::Trn, n, 0, Variant::Parallel));
    let k = s.inputs("k", clog2(n + 1));
    let x = s.inputs("x", n);
    let u = unary(&mut s, &k, n);
    let out: Vec<Sig> = (0..n).map(|i| s.and(u[i], x[i])).collect();
    s.finish(&out)
}

/// `y_k = ¬(x_0 ∨ … ∨ x_(k-1)) · x_k` followed by the indicator `∨ x`.
pub fn first_one(s: &mut Synth, x: &[Sig], variant: Variant) -> (Vec<Sig>, Sig) {
    let p = prefix_bits(s, &Gadget::or(), x, variant);
    let mut y = vec![x[0]];
    for i in 1..x.len() {
        y.push(s.and(!p[i - 1], x[i]));
    }
    (y, p[x.len() - 1])
}

pub fn gen_foi(n: usize, variant: Variant) -> Result<Circuit> {
    if n < 1 {
        return arg_err("first-one indicator needs n >= 1");
    }
    let mut s = start(&OperatorSpec::new(Operator::Foi, n, 0, variant));
    let x = s.inputs("x", n);
    let (mut y, z) = first_one(&mut s, &x, variant);
    y.push(z);
    s.finish(&y)
}

/// Position of the first one as `UN⁻¹(¬PREF∨(x_0 … x_(n-2)))`, then the
/// presence indicator.
pub fn gen_penc(n: usize, variant: Variant) -> Result<Circuit> {
    if n < 1 {
        return arg_err("priority encoder needs n >= 1");
    }
    let mut s = start(&OperatorSpec::new(Operator::Penc, n, 0, variant));
    let x = s.inputs("x", n);
    let p = prefix_bits(&mut s, &Gadget::or(), &x[..n - 1], variant);
    let zeros: Vec<Sig> = p.iter().map(|&v| !v).collect();
    let mut out = unary_inverse(&mut s, &zeros);
    let any = match p.last() {
        Some(&v) => s.or(v, x[n - 1]),
        None => x[0],
    };
    out.push(any);
    s.finish(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::metrics;
    use crate::oracle::{bit_string, from_num, parse_bits, to_num};
    use crate::sim::evaluate;

    #[test]
    fn encoder_examples() {
        let c = gen_enc(8, true).unwrap();
        let mut e5 = vec![false; 8];
        e5[5] = true;
        assert_eq!(to_num(&evaluate(&c, &e5).unwrap()), 5);
        assert_eq!(
            to_num(&evaluate(&c, &parse_bits("01100000").unwrap()).unwrap()),
            3
        );
        let m = metrics(&c);
        assert_eq!((m.size, m.depth), (8, 2));
    }

    #[test]
    fn encoder_exact_size_and_depth() {
        for n in 2..=64 {
            let m = metrics(&gen_enc(n, true).unwrap());
            let l = clog2(n);
            assert_eq!(m.size, 2 * (n - l - 1), "n={n}");
            assert!(m.depth < l, "n={n}");
            if n.is_power_of_two() {
                assert_eq!(m.depth, l - 1, "n={n}");
            }
        }
    }

    #[test]
    fn unary_examples() {
        let c = gen_un(7).unwrap();
        assert_eq!(
            bit_string(&evaluate(&c, &from_num(3, 3)).unwrap()),
            "1110000"
        );
        assert_eq!(
            bit_string(&evaluate(&c, &from_num(0, 3)).unwrap()),
            "0000000"
        );
        assert_eq!(
            bit_string(&evaluate(&c, &from_num(7, 3)).unwrap()),
            "1111111"
        );
        let m = metrics(&c);
        assert_eq!((m.size, m.depth), (8, 2));
    }

    #[test]
    fn unary_full_sizes() {
        for m in 1..=9 {
            let n = (1 << m) - 1;
            let met = metrics(&gen_un(n).unwrap());
            assert_eq!(met.size, 2 * ((1 << m) - m - 1));
            assert_eq!(met.depth, m - 1);
        }
    }

    #[test]
    fn unary_round_trips() {
        for n in 1..=40 {
            let un = gen_un(n).unwrap();
            let inv = gen_un_inv(n).unwrap();
            assert_eq!(inv.gate_count(), n - 1);
            let w = clog2(n + 1);
            for k in 0..=n {
                let s = evaluate(&un, &from_num(k as u128, w)).unwrap();
                assert_eq!(s, (0..n).map(|i| i < k).collect::<Vec<_>>(), "n={n} k={k}");
                assert_eq!(to_num(&evaluate(&inv, &s).unwrap()), k as u128);
            }
            assert!((un.gate_count() as f64) <= 2.0 * n as f64 + 10.0 * (n as f64).sqrt());
        }
    }

    #[test]
    fn unary_inverse_depth() {
        for n in 1..=64 {
            assert_eq!(metrics(&gen_un_inv(n).unwrap()).depth, clog2(n), "n={n}");
        }
    }

    #[test]
    fn truncation_example() {
        let c = gen_trn(4).unwrap();
        let mut input = from_num(2, 3);
        input.extend(parse_bits("1011").unwrap());
        assert_eq!(bit_string(&evaluate(&c, &input).unwrap()), "1000");
        let mut input = from_num(4, 3);
        input.extend(parse_bits("1011").unwrap());
        assert_eq!(bit_string(&evaluate(&c, &input).unwrap()), "1011");
    }

    #[test]
    fn first_one_examples() {
        let c = gen_foi(4, Variant::Sequential).unwrap();
        assert_eq!(
            bit_string(&evaluate(&c, &parse_bits("0110").unwrap()).unwrap()),
            "01001"
        );
        assert_eq!(
            bit_string(&evaluate(&c, &parse_bits("0000").unwrap()).unwrap()),
            "00000"
        );
        assert_eq!(gen_foi(8, Variant::Sequential).unwrap().gate_count(), 14);
    }

    #[test]
    fn priority_encoder_examples() {
        let c = gen_penc(8, Variant::Sequential).unwrap();
        let out = evaluate(&c, &parse_bits("00010110").unwrap()).unwrap();
        assert_eq!(to_num(&out[..3]), 3);
        assert!(out[3]);
        assert!(!evaluate(&c, &[false; 8]).unwrap()[3]);
        for n in 3..=32 {
            assert!(gen_penc(n, Variant::Sequential).unwrap().gate_count() <= 2 * n - 3);
            assert!(gen_penc(n, Variant::Parallel).unwrap().gate_count() <= 3 * n);
        }
    }
}
