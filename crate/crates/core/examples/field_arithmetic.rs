//! Arithmetic in F_p and the op counter.
use ipkit::field::{measure, PrimeModulus, RandomSource};

fn main() {
    let p17 = PrimeModulus::new(17).unwrap();
    let (a, b) = (p17.elem(9), p17.elem(12));
    println!("in F_17: {a} + {b} = {}, {a} * {b} = {}", a + b, a * b);
    println!(
        "3^-1 = {}, 3^16 = {}",
        p17.elem(3).inv().unwrap(),
        p17.elem(3).pow(16)
    );

    let m = PrimeModulus::mersenne61();
    let mut rng = RandomSource::new(42);
    let xs = rng.field_elements(m, 1000);
    let (product, ops) = measure(|| xs.iter().fold(m.one(), |acc, &x| acc * x));
    println!(
        "product of 1000 random elements of F_(2^61-1): {}",
        product.to_hex()
    );
    println!("cost: {} muls, {} adds", ops.muls, ops.adds);
}
