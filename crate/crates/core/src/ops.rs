// SPDX-License-Identifier: Apache-2.0

//! Dispatch from an [`OperatorSpec`] to its generator.

use crate::apps::{gen_exc, gen_nck, gen_sel2, gen_toi};
use crate::arith::{gen_add, gen_car, gen_cmp, gen_decr, gen_grc, gen_inc, gen_max, gen_udc};
use crate::count::{gen_bw, gen_sort, gen_sum, gen_thr};
use crate::encode::{gen_enc, gen_foi, gen_penc, gen_trn, gen_un, gen_un_inv};
use crate::error::Result;
use crate::ir::Circuit;
use crate::oracle::{Operator, OperatorSpec};
use crate::prefix::{instantiate, prefix_bits, prefix_suffix_schedule, Gadget};
use crate::select::{gen_cyc, gen_decoder, gen_mux, gen_mux_k, gen_sft};
use crate::synth::{Bundle, Synth};

/// Builder named after `spec` with its parameters recorded as metadata.
pub(crate) fn start(spec: &OperatorSpec) -> Synth {
    let mut s = Synth::new(spec.circuit_name());
    s.set_meta("operator", spec.op.name());
    s.set_meta("n", spec.n);
    if spec.op.takes_k() {
        s.set_meta("k", spec.k);
    }
    if spec.op.has_variants() {
        s.set_meta("variant", spec.variant);
    }
    s
}

fn gadget(op: Operator) -> Gadget {
    match op {
        Operator::PrefAnd | Operator::PsAnd => Gadget::and(),
        Operator::PrefOr | Operator::PsOr => Gadget::or(),
        _ => Gadget::xor(),
    }
}

fn gen_prefix(spec: &OperatorSpec) -> Result<Circuit> {
    let mut s = start(spec);
    let x = s.inputs("x", spec.n);
    let out = prefix_bits(&mut s, &gadget(spec.op), &x, spec.variant);
    s.finish(&out)
}

fn gen_prefix_suffix(spec: &OperatorSpec) -> Result<Circuit> {
    let sched = prefix_suffix_schedule(spec.n, spec.variant)?;
    let mut s = start(spec);
    let x = s.inputs("x", spec.n);
    let bundles: Vec<Bundle> = x.iter().map(|&v| Bundle::string(vec![v])).collect();
    let out: Vec<_> = instantiate(&sched, &gadget(spec.op), &bundles, &mut s)?
        .into_iter()
        .map(|b| b.wires[0])
        .collect();
    s.finish(&out)
}

/// Synthesizes the circuit described by `spec`.
pub fn generate(spec: &OperatorSpec) -> Result<Circuit> {
    spec.check_params()?;
    let (n, k, v) = (spec.n, spec.k, spec.variant);
    use Operator::*;
    match spec.op {
        PrefAnd | PrefOr | PrefXor => gen_prefix(spec),
        PsAnd | PsOr | PsXor => gen_prefix_suffix(spec),
        Inc => gen_inc(n, v),
        Decr => gen_decr(n, v),
        Udc => gen_udc(n, v),
        Grc => gen_grc(n, v),
        Car => gen_car(n, v),
        Add => gen_add(n, v),
        Cmp => gen_cmp(n, v, false),
        CmpStar => gen_cmp(n, v, true),
        Max => gen_max(n, v, false),
        MinMax => gen_max(n, v, true),
        Dec => gen_decoder(n, false),
        Demux => gen_decoder(n, true),
        Mux => gen_mux(n),
        MuxK => gen_mux_k(n, k),
        Cyc => gen_cyc(k, n),
        Sft => gen_sft(k, n),
        Enc => gen_enc(n, true),
        EncStar => gen_enc(n, false),
        Un => gen_un(n),
        UnInv => gen_un_inv(n),
        Trn => gen_trn(n),
        Foi => gen_foi(n, v),
        Penc => gen_penc(n, v),
        Sum => gen_sum(n, v),
        Bw => gen_bw(n, v),
        Thr => gen_thr(n, k, v),
        Sort => gen_sort(n, v),
        Toi => gen_toi(n),
        Nck => gen_nck(n, false),
        NckValid => gen_nck(n, true),
        Sel2 => gen_sel2(n),
        Exc => gen_exc(n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Variant;
    use crate::sim::{equiv_check, CheckConfig};

    #[test]
    fn every_operator_generates_and_checks() {
        let cfg = CheckConfig {
            exhaustive_limit: 14,
            samples: 2000,
            ..CheckConfig::default()
        };
        for &op in Operator::ALL {
            for n in [op.min_n(), 5, 8] {
                let k = match op {
                    Operator::Thr => n / 2,
                    _ if op.takes_k() => 3,
                    _ => 0,
                };
                for variant in [Variant::Sequential, Variant::Parallel] {
                    let spec = OperatorSpec::new(op, n, k, variant);
                    let c = generate(&spec).unwrap_or_else(|e| panic!("{spec}: {e}"));
                    assert_eq!(c.name(), spec.circuit_name());
                    assert_eq!(
                        c.meta().get("operator").map(String::as_str),
                        Some(op.name())
                    );
                    let report = equiv_check(&c, &spec, &cfg).unwrap();
                    assert!(report.passed(), "{spec}: {:?}", report.failures.first());
                }
            }
        }
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(generate(&OperatorSpec::new(Operator::Mux, 1, 0, Variant::Parallel)).is_err());
        assert!(generate(&OperatorSpec::new(Operator::Sft, 4, 1, Variant::Parallel)).is_err());
    }
}
