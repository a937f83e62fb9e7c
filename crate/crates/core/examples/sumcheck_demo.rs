//! One honest sum-check session, printed as its transcript.
use ipkit::field::PrimeModulus;
use ipkit::sumcheck::{brute_force_sum, run_sumcheck, FinalMode, ProverStrategy, SparsePolyOracle};

fn main() {
    let m = PrimeModulus::mersenne61();
    // g = x1 x2 + x3
    let g = SparsePolyOracle::demo(m);
    let h = brute_force_sum(&g).unwrap();
    let run = run_sumcheck(&g, h, 2024, ProverStrategy::Honest, FinalMode::Direct).unwrap();
    println!("H = {h}, outcome {:?}", run.outcome);
    print!("{}", run.transcript.to_jsonl());
    println!(
        "{} rounds, {} field elements; prover {} ops, verifier {} ops",
        run.transcript.round_messages(),
        run.transcript.field_elements(),
        run.prover_ops.total(),
        run.verifier_ops.total()
    );
}
