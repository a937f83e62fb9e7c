//! Proving a model count with sum-check over the arithmetized formula.
use ipkit::countsat::{arithmetize, count_models, countsat_protocol, parse_formula};
use ipkit::field::PrimeModulus;
use ipkit::sumcheck::{ProverStrategy, SummandOracle};

fn main() {
    let f = parse_formula("((a | b) & ((!a | c) & (b | !c)))").unwrap();
    let m = PrimeModulus::mersenne61();
    let count = count_models(&f).unwrap();
    let g = arithmetize(&f, m);
    println!(
        "{f}: {} variables, size {}, degree bounds {:?}",
        f.num_vars(),
        f.size(),
        g.degree_bounds()
    );

    for claimed in [count, count + 1] {
        let run =
            countsat_protocol(&f, claimed, m, 5, ProverStrategy::WrongClaim(m.zero())).unwrap();
        println!(
            "claim {claimed}: {} after {} field elements",
            if run.accepted() {
                "accepted"
            } else {
                "rejected"
            },
            run.transcript.field_elements()
        );
    }
}
