//! Rounds and prover work of GKR as the circuit grows, against the
//! monolithic sum-check over the whole computation.
use std::sync::Arc;

use ipkit::circuit::{evaluate, product_tree, ProductTreeWiring, WiringBackend};
use ipkit::field::{PrimeModulus, RandomSource};
use ipkit::fingerprint::DataVector;
use ipkit::gkr::{
    gkr_prove_verify_with, monolithic_evaluations, GkrStrategy, UnrolledCircuitOracle,
};

fn main() {
    let m = PrimeModulus::mersenne61();
    let closed = WiringBackend::ClosedForm(Arc::new(ProductTreeWiring));
    println!(
        "depth width rounds prover_ops verifier_ops(direct) verifier_ops(closed) monolithic_evals"
    );
    for depth in [2, 3] {
        for width in [16, 32, 64] {
            let c = product_tree(m, depth, width);
            let input = DataVector::new(RandomSource::new(1).field_elements(m, width)).unwrap();
            let out = evaluate(&c, &input).unwrap().outputs();
            let direct = gkr_prove_verify_with(
                &WiringBackend::DirectSum,
                &c,
                &input,
                &out,
                0,
                GkrStrategy::Honest,
            )
            .unwrap();
            let fast =
                gkr_prove_verify_with(&closed, &c, &input, &out, 0, GkrStrategy::Honest).unwrap();
            let mono = monolithic_evaluations(&vec![2; UnrolledCircuitOracle::variables(&c)]);
            println!(
                "{depth:>5} {width:>5} {:>6} {:>10} {:>21} {:>20} {mono:>16.3e}",
                direct.rounds(),
                direct.prover_ops.total(),
                direct.verifier_ops.total(),
                fast.verifier_ops.total()
            );
        }
    }
}
