//! How often cheating provers get through over a small field.
use std::sync::Arc;

use ipkit::cli::{monte_carlo, three_sigma_threshold};
use ipkit::field::PrimeModulus;
use ipkit::sumcheck::{
    brute_force_sum, run_sumcheck, FinalMode, ProverStrategy, SparsePolyOracle, SummandOracle,
};

fn main() {
    let m = PrimeModulus::new(101).unwrap();
    let g = SparsePolyOracle::product(m, 3);
    let h = brute_force_sum(&g).unwrap();
    let other: Arc<dyn SummandOracle> = Arc::new(SparsePolyOracle::linear(m, 3));
    let trials = 20_000;
    let l = g.num_vars() as f64;
    let d = g.total_degree() as f64;
    let cases = [
        (ProverStrategy::WrongClaim(m.one()), l * d / 101.0),
        (ProverStrategy::DeviateAtRound(1), l * d / 101.0),
        (ProverStrategy::DeviateAtRound(2), (l - 1.0) * d / 101.0),
        (ProverStrategy::DeviateAtRound(3), d / 101.0),
        (ProverStrategy::WrongOracle(other), l * d / 101.0),
    ];
    for (strategy, bound) in cases {
        let accepted = monte_carlo(0, trials, |seed| {
            run_sumcheck(&g, h, seed, strategy.clone(), FinalMode::Direct)
                .unwrap()
                .accepted()
        });
        let rate = accepted as f64 / trials as f64;
        println!(
            "{:<22} accepted {rate:.4}  bound {bound:.4}  3-sigma {:.4}",
            strategy.label(),
            three_sigma_threshold(bound, trials)
        );
    }
}
