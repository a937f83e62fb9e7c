//! Convincing a verifier that a is not a square mod N.
use ipkit::residue::{is_qr, jacobi, qnr_protocol, QnrProver, QrModulus};

fn main() {
    let n = QrModulus::new(21, Some((3, 7))).unwrap();
    for a in [5, 4] {
        println!(
            "a = {a}: jacobi {}, square {}",
            jacobi(a, 21).unwrap(),
            is_qr(a, &n).unwrap()
        );
        let s = qnr_protocol(&n, a, 8, QnrProver::WithFactors, 9).unwrap();
        println!("  coins      {:?}", s.coins);
        println!("  challenges {:?}", s.challenges);
        println!("  answers    {:?}", s.answers);
        println!("  accepted   {}", s.accepted);
    }
    let wins = (0..10_000).filter(|&seed| {
        qnr_protocol(&n, 4, 8, QnrProver::Guessing, seed)
            .unwrap()
            .accepted
    });
    println!(
        "guessing prover on a = 4: {} wins in 10000 (2^-8 = 0.0039)",
        wins.count()
    );
}
