// SPDX-License-Identifier: Apache-2.0

//! Composite circuits built from the basic generators: two-selector,
//! weight-preserving counter, two-element selection and bit-pair exchange.

use crate::arith::{add, compare};
use crate::encode::{unary, unary_inverse};
use crate::error::{arg_err, Result};
use crate::ir::{Circuit, GateFunc};
use crate::ops::start;
use crate::oracle::{clog2, Operator, OperatorSpec, Variant};
use crate::prefix::{instantiate, prefix_bits, prefix_suffix_schedule, Gadget};
use crate::select::{decode, mux};
use crate::synth::{Bundle, Sig, Synth};

/// Keeps the leftmost and rightmost ones: `z_i = x_i·¬(p_(i-1) s_(i+1))`.
pub fn gen_toi(n: usize) -> Result<Circuit> {
    if n < 2 {
        return arg_err(format!("toi needs n >= 2, got {n}"));
    }
    let mut s = start(&OperatorSpec::new(Operator::Toi, n, 0, Variant::Parallel));
    let x = s.inputs("x", n);
    let sched = prefix_suffix_schedule(n, Variant::Parallel)?;
    let bundles: Vec<Bundle> = x.iter().map(|&v| Bundle::string(vec![v])).collect();
    let sums: Vec<Sig> = instantiate(&sched, &Gadget::or(), &bundles, &mut s)?
        .into_iter()
        .map(|b| b.wires[0])
        .collect();
    // p_1..p_n, then s_2..s_n.
    let p = &sums[..n];
    let suffix = |i: usize| sums[n + i - 1];
    let mut out = vec![x[0]];
    for i in 1..n - 1 {
        let both = s.and(p[i - 1], suffix(i + 1));
        out.push(s.and(x[i], !both));
    }
    out.push(x[n - 1]);
    out.push(p[n - 1]);
    s.finish(&out)
}

/// Next larger number of equal weight, or the input when none exists.
///
/// Writing `x = S ∥ 0 [1]^j [0]^i` (most significant part left), the result
/// is `S ∥ 1 [0]^(i+1) [1]^(j-1)`. With `simplified`, the final merge is a
/// plain select and a validity output follows the number.
pub fn gen_nck(n: usize, simplified: bool) -> Result<Circuit> {
    if n < 2 {
        return arg_err(format!("nck needs n >= 2, got {n}"));
    }
    let op = if simplified {
        Operator::NckValid
    } else {
        Operator::Nck
    };
    let mut s = start(&OperatorSpec::new(op, n, 0, Variant::Parallel));
    let x = s.inputs("x", n);

    // w_t marks a zero directly above a one; x_n is an implicit zero.
    let w: Vec<Sig> = (1..=n)
        .map(|t| {
            if t == n {
                x[n - 1]
            } else {
                s.and(!x[t], x[t - 1])
            }
        })
        .collect();
    let seen = prefix_bits(&mut s, &Gadget::or(), &w[..n - 1], Variant::Parallel);
    // q_t = 1 below the first marked position i + j.
    let mut q = vec![Sig::ONE];
    q.extend(seen.iter().map(|&v| !v));
    let maximal = q[n - 1];
    let r: Vec<Sig> = (0..n - 1).map(|t| s.and(!x[t], q[t])).collect();

    let width = clog2(n);
    let i_plus_j = unary_inverse(&mut s, &q);
    let mut i = unary_inverse(&mut s, &r);
    i.resize(width, Sig::ZERO);
    // j - 1 = (i + j) + ¬i modulo 2^width.
    let not_i: Vec<Sig> = i.iter().map(|&v| !v).collect();
    let j_minus_1 = add(&mut s, &i_plus_j[..width], &not_i, Variant::Parallel);
    let ones = unary(&mut s, &j_minus_1[..width], n - 1);

    let mut out = Vec::with_capacity(n + 1);
    for t in 0..n {
        let mark = if t >= 1 { w[t - 1] } else { Sig::ZERO };
        let low = ones.get(t).copied().unwrap_or(Sig::ZERO);
        let z = s.or(mark, low);
        let above = if t >= 1 { !q[t - 1] } else { Sig::ZERO };
        out.push(if simplified {
            s.mux(above, x[t], z)
        } else {
            let keep = s.or(above, maximal);
            let diff = s.xor(x[t], z);
            let t = s.and(keep, diff);
            s.xor(t, z)
        });
    }
    if simplified {
        out.push(!maximal);
    }
    s.finish(&out)
}

/// `(y_a, y_b)` from strided substrings `Y_i` and their differences
/// `Ỹ_i = Y_(i-1) ⊕ Y_i`: each `Ỹ_i` is read at one of the two addresses and
/// the readings are XOR-merged per output.
pub fn select_two(s: &mut Synth, a: &[Sig], b: &[Sig], y: &[Sig]) -> (Sig, Sig) {
    let n = y.len();
    let m = a.len();
    // r ≈ m/3, rounded down; r = 1 up to n = 64.
    let r = ((m - 1) / 3).max(1);
    let stride = 1usize << r;
    let q = n.div_ceil(stride);
    let strided: Vec<Vec<Sig>> = (0..stride)
        .map(|i| {
            (0..q)
                .map(|j| y.get(j * stride + i).copied().unwrap_or(Sig::ZERO))
                .collect()
        })
        .collect();
    let mut diffs = vec![strided[0].clone()];
    for i in 1..stride {
        let d: Vec<Sig> = (0..q)
            .map(|j| s.xor(strided[i - 1][j], strided[i][j]))
            .collect();
        diffs.push(d);
    }
    diffs.push(strided[stride - 1].clone());

    let (a0, a1) = a.split_at(r);
    let (b0, b1) = b.split_at(r);
    let le = !compare(s, a0, b0, Variant::Parallel, false).greater;
    let ua = unary(s, a0, stride - 1);
    let ub = unary(s, b0, stride - 1);
    // [i <= a0] for i = 0..=stride.
    let at_most = |u: &[Sig], i: usize| match i {
        0 => Sig::ONE,
        i if i < stride => u[i - 1],
        _ => Sig::ZERO,
    };
    // z_i = b_1 ⊕ η^a_i·(a_1 ⊕ b_1), which is a_1 or b_1 wherever it is used.
    let delta: Vec<Sig> = a1.iter().zip(b1).map(|(&x, &z)| s.xor(x, z)).collect();
    let mut terms_a = Vec::new();
    let mut terms_b = Vec::new();
    for (i, d) in diffs.iter().enumerate() {
        let eta_a = s.xnor(at_most(&ua, i), le);
        let eta_b = s.xor(at_most(&ub, i), le);
        let addr: Vec<Sig> = delta
            .iter()
            .zip(b1)
            .map(|(&dl, &z)| {
                let t = s.and(eta_a, dl);
                s.xor(z, t)
            })
            .collect();
        let picked = mux(s, &addr, d);
        terms_a.push(s.and(eta_a, picked));
        terms_b.push(s.and(eta_b, picked));
    }
    let ya = s.reduce_tree(GateFunc::XOR, &terms_a, Sig::ZERO);
    let yb = s.reduce_tree(GateFunc::XOR, &terms_b, Sig::ZERO);
    (ya, yb)
}

fn addressed(op: Operator, n: usize) -> Result<(Synth, Vec<Sig>, Vec<Sig>, Vec<Sig>)> {
    if n < 4 {
        return arg_err(format!("{op} needs n >= 4, got {n}"));
    }
    let mut s = start(&OperatorSpec::new(op, n, 0, Variant::Parallel));
    let m = clog2(n);
    let a = s.inputs("a", m);
    let b = s.inputs("b", m);
    let y = s.inputs("y", n);
    Ok((s, a, b, y))
}

pub fn gen_sel2(n: usize) -> Result<Circuit> {
    let (mut s, a, b, y) = addressed(Operator::Sel2, n)?;
    let (ya, yb) = select_two(&mut s, &a, &b, &y);
    s.finish(&[ya, yb])
}

/// Swaps `y_a` and `y_b` by XORing `y_a ⊕ y_b` into both positions.
pub fn gen_exc(n: usize) -> Result<Circuit> {
    let (mut s, a, b, y) = addressed(Operator::Exc, n)?;
    let (ya, yb) = select_two(&mut s, &a, &b, &y);
    let d = s.xor(ya, yb);
    let da = decode(&mut s, &a, n, Some(d));
    let db = decode(&mut s, &b, n, Some(d));
    let out: Vec<Sig> = (0..n)
        .map(|j| {
            let t = s.xor(y[j], da[j]);
            s.xor(t, db[j])
        })
        .collect();
    s.finish(&out)
}
