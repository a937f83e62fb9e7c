//! Multilinear extensions, interpolation and restriction to a line.
use ipkit::field::PrimeModulus;
use ipkit::poly::{interpolate, line_through, mle_restrict_line, MultilinearTable};

fn main() {
    let m = PrimeModulus::new(101).unwrap();
    let t = MultilinearTable::new(m, [1, 2, 3, 4].map(|v| m.elem(v)).to_vec()).unwrap();
    for z in [[0, 0], [1, 1], [2, 3], [50, 7]] {
        let z = z.map(|v| m.elem(v));
        println!("W~({}, {}) = {}", z[0], z[1], t.evaluate(&z).unwrap());
    }

    let g = interpolate(&[(m.elem(0), m.elem(2)), (m.elem(1), m.elem(3))]).unwrap();
    println!("through (0,2) and (1,3): coefficients {:?}", g.coeffs());

    let (z1, z2) = ([m.elem(5), m.elem(1)], [m.elem(8), m.elem(0)]);
    let f = mle_restrict_line(&t, &line_through(&z1, &z2).unwrap()).unwrap();
    println!("W~ on the line z1 -> z2: {:?}", f.coeffs());
    println!(
        "f(0) = {} = W~(z1), f(1) = {} = W~(z2)",
        f.evaluate(m.zero()),
        f.evaluate(m.one())
    );
}
