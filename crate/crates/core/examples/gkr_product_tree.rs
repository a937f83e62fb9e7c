//! GKR on a product tree, honest and with each kind of cheat.
use ipkit::circuit::{evaluate, product_tree};
use ipkit::field::{PrimeModulus, RandomSource};
use ipkit::fingerprint::DataVector;
use ipkit::gkr::{gkr_prove_verify, GkrStrategy};
use ipkit::sumcheck::ProverStrategy;

fn main() {
    let m = PrimeModulus::mersenne61();
    let c = product_tree(m, 3, 32);
    let input = DataVector::new(RandomSource::new(3).field_elements(m, 32)).unwrap();
    let outputs = evaluate(&c, &input).unwrap().outputs();
    println!(
        "{} layers, {} gates, {} outputs",
        c.depth(),
        c.size(),
        outputs.len()
    );

    let mut wrong = outputs.clone();
    wrong[1] += m.one();
    let sessions = [
        (GkrStrategy::Honest, &outputs),
        (GkrStrategy::CorruptOutput, &wrong),
        (GkrStrategy::LieInValue { layer: 1 }, &outputs),
        (GkrStrategy::FabricateLine { layer: 0 }, &outputs),
        (
            GkrStrategy::Sumcheck {
                layer: 2,
                strategy: ProverStrategy::DeviateAtRound(4),
            },
            &outputs,
        ),
    ];
    for (strategy, claimed) in sessions {
        let label = strategy.label();
        let run = gkr_prove_verify(&c, &input, claimed, 11, strategy).unwrap();
        println!("{label:<28} {:?} ({} rounds)", run.verdict, run.rounds());
    }
}
