//! Recorded transcripts shared by the replay tests.

use ipkit::circuit::{evaluate, random_circuit};
use ipkit::countsat::{count_models, countsat_protocol, random_formula};
use ipkit::field::{PrimeModulus, RandomSource};
use ipkit::fingerprint::DataVector;
use ipkit::gkr::{gkr_prove_verify, GkrStrategy};
use ipkit::sumcheck::{brute_force_sum, run_sumcheck, FinalMode, ProverStrategy, SparsePolyOracle};

/// Transcripts from every protocol that records one, honest and not.
pub fn transcripts() -> Vec<String> {
    let m = PrimeModulus::mersenne61();
    let small = PrimeModulus::new(101).unwrap();
    let mut out = Vec::new();
    for seed in 0..40u64 {
        let g = SparsePolyOracle::random(m, 1 + (seed % 4) as usize, 3, seed);
        let h = brute_force_sum(&g).unwrap();
        let strategy = match seed % 3 {
            0 => ProverStrategy::Honest,
            1 => ProverStrategy::WrongClaim(m.one()),
            _ => ProverStrategy::DeviateAtRound(1),
        };
        out.push(
            run_sumcheck(&g, h, seed, strategy, FinalMode::Direct)
                .unwrap()
                .transcript
                .to_jsonl(),
        );
    }
    for seed in 0..30u64 {
        let f = random_formula(4, 9, seed);
        let run = countsat_protocol(
            &f,
            count_models(&f).unwrap() + seed % 2,
            small,
            seed,
            ProverStrategy::Honest,
        )
        .unwrap();
        out.push(run.transcript.to_jsonl());
    }
    for seed in 0..30u64 {
        let c = random_circuit(m, 1 + (seed % 3) as usize, 4, seed);
        let input =
            DataVector::new(RandomSource::new(seed).field_elements(m, c.input_width())).unwrap();
        let outputs = evaluate(&c, &input).unwrap().outputs();
        let strategy = match seed % 3 {
            0 => GkrStrategy::Honest,
            1 => GkrStrategy::LieInValue { layer: 0 },
            _ => GkrStrategy::FabricateLine { layer: 0 },
        };
        out.push(
            gkr_prove_verify(&c, &input, &outputs, seed, strategy)
                .unwrap()
                .transcript
                .to_jsonl(),
        );
    }
    out
}
