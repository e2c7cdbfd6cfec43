// SPDX-License-Identifier: Apache-2.0

//! Counters, carries, adders, comparators and maxima.
//!
//! Numbers are LSB first. Sequential variants use serial prefix chains,
//! parallel variants the Ofman network with the same gadgets.

use crate::error::{arg_err, Result};
use crate::ir::Circuit;
use crate::ops::start;
use crate::oracle::{Operator, OperatorSpec, Variant};
use crate::prefix::{instantiate, prefix_bits, prefix_schedule, Gadget};
use crate::synth::{Bundle, Sig, Synth};

fn need(n: usize, min: usize, what: &str) -> Result<()> {
    if n < min {
        return arg_err(format!("{what} needs n >= {min}, got {n}"));
    }
    Ok(())
}

/// `[a, b]` pairs combined with ⋆; returns the prefixes `p_1..p_n`.
pub fn star_prefix(s: &mut Synth, elems: &[[Sig; 2]], variant: Variant) -> Vec<[Sig; 2]> {
    let sched = prefix_schedule(elems.len(), variant).expect("n >= 1");
    let bundles: Vec<Bundle> = elems.iter().map(|e| Bundle::number(e.to_vec())).collect();
    instantiate(&sched, &Gadget::star(), &bundles, s)
        .expect("widths match")
        .into_iter()
        .map(|b| [b.wires[0], b.wires[1]])
        .collect()
}

/// `z_0` as given, `z_i = xs_i ⊕ lits_0 ∧ … ∧ lits_(i-1)`.
fn increment_with(s: &mut Synth, xs: &[Sig], lits: &[Sig], z0: Sig, variant: Variant) -> Vec<Sig> {
    let n = xs.len();
    let pre = prefix_bits(s, &Gadget::and(), &lits[..n - 1], variant);
    let mut z = vec![z0];
    for i in 1..n {
        z.push(s.xor(xs[i], pre[i - 1]));
    }
    z
}

pub fn inc(s: &mut Synth, x: &[Sig], variant: Variant) -> Vec<Sig> {
    increment_with(s, x, x, !x[0], variant)
}

pub fn decr(s: &mut Synth, x: &[Sig], variant: Variant) -> Vec<Sig> {
    let neg: Vec<Sig> = x.iter().map(|&v| !v).collect();
    increment_with(s, x, &neg, !x[0], variant)
}

pub fn gen_inc(n: usize, variant: Variant) -> Result<Circuit> {
    need(n, 1, "inc")?;
    let mut s = start(&OperatorSpec::new(Operator::Inc, n, 0, variant));
    let x = s.inputs("x", n);
    let z = inc(&mut s, &x, variant);
    s.finish(&z)
}

pub fn gen_decr(n: usize, variant: Variant) -> Result<Circuit> {
    need(n, 1, "decr")?;
    let mut s = start(&OperatorSpec::new(Operator::Decr, n, 0, variant));
    let x = s.inputs("x", n);
    let z = decr(&mut s, &x, variant);
    s.finish(&z)
}

/// Counts up for `σ = 1`, down for `σ = 0`, using the literals `σ ∼ x_k`.
pub fn gen_udc(n: usize, variant: Variant) -> Result<Circuit> {
    need(n, 2, "udc")?;
    let mut s = start(&OperatorSpec::new(Operator::Udc, n, 0, variant));
    let x = s.inputs("x", n);
    let sigma = s.input("sigma");
    let lits: Vec<Sig> = x[..n - 1].iter().map(|&v| s.xnor(sigma, v)).collect();
    let z = increment_with(&mut s, &x, &lits, !x[0], variant);
    s.finish(&z)
}

/// Gray successor through binary: `y_i = x_i ⊕ … ⊕ x_(n-1)`, increment, and
/// back with `x'_i = z_(i+1) ⊕ z_i`. The two lowest result bits reduce to
/// `x'_0 = ¬y_1` and `z_1 = x_0`.
pub fn gen_grc(n: usize, variant: Variant) -> Result<Circuit> {
    need(n, 1, "grc")?;
    let mut s = start(&OperatorSpec::new(Operator::Grc, n, 0, variant));
    let x = s.inputs("x", n);
    let out = match n {
        1 => vec![!x[0]],
        2 => vec![!x[1], x[0]],
        _ => {
            let rev: Vec<Sig> = x.iter().rev().copied().collect();
            let mut y: Vec<Sig> = prefix_bits(&mut s, &Gadget::xor(), &rev, variant);
            y.reverse();
            // z_i = y_i ⊕ y_0 … y_(i-1) for i >= 2.
            let pre = prefix_bits(&mut s, &Gadget::and(), &y[..n - 1], variant);
            let mut z = vec![!y[0], x[0]];
            for i in 2..n {
                z.push(s.xor(y[i], pre[i - 1]));
            }
            let mut out = vec![!y[1]];
            for i in 1..n - 1 {
                out.push(s.xor(z[i + 1], z[i]));
            }
            out.push(z[n - 1]);
            out
        }
    };
    s.finish(&out)
}

/// `c_1 = x_0`, `c_(i+1) = x_i ⊕ y_i c_i` as ⋆-prefixes of `[x_0, 1], [x_i, y_i]`.
pub fn carries(s: &mut Synth, x: &[Sig], y: &[Sig], variant: Variant) -> Vec<Sig> {
    let elems: Vec<[Sig; 2]> = (0..x.len())
        .map(|i| [x[i], if i == 0 { Sig::ONE } else { y[i] }])
        .collect();
    star_prefix(s, &elems, variant)
        .into_iter()
        .map(|p| p[0])
        .collect()
}

pub fn gen_car(n: usize, variant: Variant) -> Result<Circuit> {
    need(n, 1, "car")?;
    let mut s = start(&OperatorSpec::new(Operator::Car, n, 0, variant));
    let x = s.inputs("x", n);
    let y = s.inputs("y", n);
    let c = carries(&mut s, &x, &y, variant);
    s.finish(&c)
}

/// `n+1`-bit sum of two `n`-bit numbers.
pub fn add(s: &mut Synth, a: &[Sig], b: &[Sig], variant: Variant) -> Vec<Sig> {
    let n = a.len();
    let x: Vec<Sig> = (0..n).map(|i| s.and(a[i], b[i])).collect();
    let y: Vec<Sig> = (0..n).map(|i| s.xor(a[i], b[i])).collect();
    let c = carries(s, &x, &y, variant);
    let mut z = vec![y[0]];
    for i in 1..n {
        z.push(s.xor(y[i], c[i - 1]));
    }
    z.push(c[n - 1]);
    z
}

pub fn gen_add(n: usize, variant: Variant) -> Result<Circuit> {
    need(n, 1, "add")?;
    let mut s = start(&OperatorSpec::new(Operator::Add, n, 0, variant));
    let a = s.inputs("a", n);
    let b = s.inputs("b", n);
    let z = add(&mut s, &a, &b, variant);
    s.finish(&z)
}

pub struct Comparison {
    pub greater: Sig,
    pub equal: Sig,
    /// `a_i ∼ b_i` for every position.
    pub same: Vec<Sig>,
}

/// `[A > B]` from `x_i = a_i ¬b_i`, `y_i = a_i ∼ b_i`; the total's second
/// component is `[A = B]` when `y_0` seeds the first element.
pub fn compare(s: &mut Synth, a: &[Sig], b: &[Sig], variant: Variant, need_eq: bool) -> Comparison {
    let n = a.len();
    let x: Vec<Sig> = (0..n).map(|i| s.and(a[i], !b[i])).collect();
    let same: Vec<Sig> = (0..n)
        .map(|i| {
            if i == 0 && !need_eq {
                Sig::ONE
            } else {
                s.xnor(a[i], b[i])
            }
        })
        .collect();
    let elems: Vec<[Sig; 2]> = (0..n).map(|i| [x[i], same[i]]).collect();
    let total = *star_prefix(s, &elems, variant).last().expect("n >= 1");
    Comparison {
        greater: total[0],
        equal: total[1],
        same,
    }
}

pub fn gen_cmp(n: usize, variant: Variant, extended: bool) -> Result<Circuit> {
    need(n, 1, "cmp")?;
    let op = if extended {
        Operator::CmpStar
    } else {
        Operator::Cmp
    };
    let mut s = start(&OperatorSpec::new(op, n, 0, variant));
    let a = s.inputs("a", n);
    let b = s.inputs("b", n);
    let cmp = compare(&mut s, &a, &b, variant, extended);
    let outs = if extended {
        vec![cmp.greater, cmp.equal]
    } else {
        vec![cmp.greater]
    };
    s.finish(&outs)
}

/// `max = ¬(A ∼ B)·[c]^n ⊕ B`, `min = ¬(A ∼ B)·[c]^n ⊕ A`, top bits as OR / AND.
pub fn gen_max(n: usize, variant: Variant, with_min: bool) -> Result<Circuit> {
    need(n, 1, "max")?;
    let op = if with_min {
        Operator::MinMax
    } else {
        Operator::Max
    };
    let mut s = start(&OperatorSpec::new(op, n, 0, variant));
    let a = s.inputs("a", n);
    let b = s.inputs("b", n);
    let cmp = compare(&mut s, &a, &b, variant, true);
    let mut hi = Vec::with_capacity(n);
    let mut lo = Vec::with_capacity(n);
    for i in 0..n - 1 {
        let d = s.and(!cmp.same[i], cmp.greater);
        hi.push(s.xor(d, b[i]));
        if with_min {
            lo.push(s.xor(d, a[i]));
        }
    }
    hi.push(s.or(a[n - 1], b[n - 1]));
    if with_min {
        lo.push(s.and(a[n - 1], b[n - 1]));
    }
    hi.extend(lo);
    s.finish(&hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{metrics, validate};
    use crate::oracle::{from_num, to_num};
    use crate::sim::evaluate;

    const BOTH: [Variant; 2] = [Variant::Sequential, Variant::Parallel];

    fn run(c: &Circuit, fields: &[(u128, usize)]) -> u128 {
        let bits: Vec<bool> = fields.iter().flat_map(|&(v, w)| from_num(v, w)).collect();
        to_num(&evaluate(c, &bits).unwrap())
    }

    #[test]
    fn inc_examples_and_size() {
        let c = gen_inc(4, Variant::Sequential).unwrap();
        assert_eq!(run(&c, &[(7, 4)]), 8);
        assert_eq!(run(&c, &[(15, 4)]), 0);
        assert_eq!(gen_inc(8, Variant::Sequential).unwrap().gate_count(), 14);
        assert!(gen_inc(0, Variant::Sequential).is_err());
        for n in 2..=32 {
            for v in BOTH {
                let g = gen_inc(n, v).unwrap();
                if v == Variant::Sequential {
                    assert_eq!(g.gate_count(), 2 * n - 2);
                } else {
                    assert!(g.gate_count() <= 3 * n);
                }
                let d = gen_decr(n, v).unwrap();
                if v == Variant::Sequential {
                    assert_eq!(d.gate_count(), 2 * n - 2);
                }
                assert!(validate(&d).is_ok());
                assert_eq!(metrics(&d).degenerate_gates, 0);
            }
        }
    }

    #[test]
    fn udc_examples() {
        let c = gen_udc(3, Variant::Sequential).unwrap();
        assert_eq!(run(&c, &[(0, 3), (0, 1)]), 7);
        assert_eq!(run(&c, &[(5, 3), (1, 1)]), 6);
        assert!(gen_udc(8, Variant::Sequential).unwrap().gate_count() <= 21);
        assert!(gen_udc(1, Variant::Sequential).is_err());
    }

    #[test]
    fn grc_sizes() {
        assert_eq!(gen_grc(3, Variant::Sequential).unwrap().gate_count(), 5);
        for n in 4..=32 {
            assert!(gen_grc(n, Variant::Sequential).unwrap().gate_count() <= 4 * n - 7);
            assert!(gen_grc(n, Variant::Parallel).unwrap().gate_count() <= 6 * n);
        }
    }

    #[test]
    fn car_and_add_exact_sizes() {
        assert_eq!(gen_car(1, Variant::Sequential).unwrap().gate_count(), 0);
        let c = gen_car(3, Variant::Sequential).unwrap();
        // x = (1,1,0), y = (0,1,1) in LSB-first order.
        let got = evaluate(&c, &[true, true, false, false, true, true]).unwrap();
        assert_eq!(got, vec![true, false, false]);
        for n in 2..=32 {
            assert_eq!(
                gen_car(n, Variant::Sequential).unwrap().gate_count(),
                2 * n - 2
            );
            assert_eq!(
                gen_add(n, Variant::Sequential).unwrap().gate_count(),
                5 * n - 3
            );
            assert!(gen_add(n, Variant::Parallel).unwrap().gate_count() <= 8 * n);
        }
        let add = gen_add(4, Variant::Parallel).unwrap();
        assert_eq!(run(&add, &[(9, 4), (7, 4)]), 16);
        assert_eq!(gen_add(1, Variant::Sequential).unwrap().gate_count(), 2);
    }

    #[test]
    fn comparator_examples_and_caps() {
        let c = gen_cmp(4, Variant::Sequential, true).unwrap();
        assert_eq!(run(&c, &[(9, 4), (9, 4)]), 0b10);
        assert_eq!(run(&c, &[(10, 4), (9, 4)]), 0b01);
        for n in 1..=32 {
            assert!(gen_cmp(n, Variant::Sequential, false).unwrap().gate_count() <= 4 * n - 3);
            assert!(gen_cmp(n, Variant::Sequential, true).unwrap().gate_count() <= 5 * n - 3);
            assert!(gen_cmp(n, Variant::Parallel, false).unwrap().gate_count() <= 5 * n);
        }
    }

    #[test]
    fn max_min_examples() {
        let c = gen_max(4, Variant::Sequential, true).unwrap();
        assert_eq!(run(&c, &[(3, 4), (12, 4)]), 12 | 3 << 4);
        assert_eq!(run(&c, &[(5, 4), (5, 4)]), 5 | 5 << 4);
        for n in 1..=32 {
            let max = gen_max(n, Variant::Sequential, false).unwrap().gate_count();
            let both = gen_max(n, Variant::Sequential, true).unwrap().gate_count();
            assert!(max <= 6 * n - 3);
            assert!(both <= 7 * n - 3);
        }
    }
}
