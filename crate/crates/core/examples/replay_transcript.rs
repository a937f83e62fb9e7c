//! Recording a session, replaying it, and spotting an edit.
use ipkit::circuit::{evaluate, random_circuit};
use ipkit::field::{PrimeModulus, RandomSource};
use ipkit::fingerprint::DataVector;
use ipkit::gkr::{gkr_prove_verify, GkrStrategy};
use ipkit::replay::replay;

fn main() {
    let m = PrimeModulus::mersenne61();
    let c = random_circuit(m, 3, 8, 5);
    let input = DataVector::new(RandomSource::new(5).field_elements(m, 8)).unwrap();
    let out = evaluate(&c, &input).unwrap().outputs();
    let text = gkr_prove_verify(&c, &input, &out, 77, GkrStrategy::Honest)
        .unwrap()
        .transcript
        .to_jsonl();
    println!("{} lines recorded", text.lines().count());
    println!("replay: {:?}", replay(&text).unwrap());

    // change one hex digit of the first round message
    let at = text.find("\"coeffs\":[\"").unwrap() + 11;
    let mut bytes = text.into_bytes();
    bytes[at] = if bytes[at] == b'1' { b'2' } else { b'1' };
    println!(
        "edited: {:?}",
        replay(&String::from_utf8(bytes).unwrap()).unwrap()
    );
}
