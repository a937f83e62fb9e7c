//! Checking a claimed matrix product in O(n^2).
use ipkit::field::{measure, PrimeModulus, RandomSource};
use ipkit::fingerprint::{freivalds_verify, mat_mul, SquareMatrix};

fn main() {
    let m = PrimeModulus::mersenne61();
    let mut rng = RandomSource::new(1);
    let n = 128;
    let a = SquareMatrix::random(m, n, &mut rng);
    let b = SquareMatrix::random(m, n, &mut rng);
    let (c, product_ops) = measure(|| mat_mul(&a, &b).unwrap());

    let ((verdict, _), check_ops) = measure(|| freivalds_verify(&a, &b, &c, &mut rng).unwrap());
    println!("C = AB: {verdict:?}");
    println!(
        "computing AB: {} muls, checking it: {} muls",
        product_ops.muls, check_ops.muls
    );

    let mut wrong = c.clone();
    wrong.set(17, 99, c.get(17, 99) + m.one());
    let (verdict, _) = freivalds_verify(&a, &b, &wrong, &mut rng).unwrap();
    println!("one entry off: {verdict:?}");
}
