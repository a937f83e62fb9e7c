//! Building, serializing and evaluating a layered circuit.
use ipkit::circuit::{evaluate, parse_circuit, random_circuit, serialize, Gate, LayeredCircuit};
use ipkit::field::PrimeModulus;
use ipkit::fingerprint::DataVector;

fn main() {
    let m = PrimeModulus::mersenne61();
    // (a + b)(c + d)
    let c = LayeredCircuit::new(
        m,
        4,
        vec![
            vec![Gate::mul(0, 1)],
            vec![Gate::add(0, 1), Gate::add(2, 3)],
        ],
    )
    .unwrap();
    let text = serialize(&c);
    print!("{text}");
    let back = parse_circuit(&text).unwrap();
    let t = evaluate(&back, &DataVector::from_u64(m, &[1, 2, 3, 4]).unwrap()).unwrap();
    println!("outputs {:?}", t.outputs());

    let r = random_circuit(m, 4, 8, 1);
    let widths: Vec<usize> = (0..=r.depth()).map(|i| r.width(i)).collect();
    println!("random circuit widths, output first: {widths:?}");
}
