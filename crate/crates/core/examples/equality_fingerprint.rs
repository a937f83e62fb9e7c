//! Deciding equality of two long vectors from one field element.
use ipkit::field::{PrimeModulus, RandomSource};
use ipkit::fingerprint::{equality_protocol, DataVector};

fn main() {
    let m = PrimeModulus::mersenne61();
    let mut rng = RandomSource::new(7);
    let a = DataVector::new(rng.field_elements(m, 1 << 16)).unwrap();
    let mut flipped = a.entries().to_vec();
    flipped[12_345] += m.one();
    let b = DataVector::new(flipped).unwrap();

    let (same, r) = equality_protocol(&a, &a.clone(), &mut rng).unwrap();
    println!("a vs a at r = {}: {same:?}", r.to_hex());
    let (diff, r) = equality_protocol(&a, &b, &mut rng).unwrap();
    println!("a vs b at r = {}: {diff:?}", r.to_hex());
}
