use ipkit::field::{FieldElement, PrimeModulus, RandomSource};
use ipkit::poly::{
    eq_eval, index_bits, interpolate, line_through, mle_restrict_line, MultilinearTable,
    UnivariatePoly,
};
use proptest::prelude::*;

fn f101() -> PrimeModulus {
    PrimeModulus::new(101).unwrap()
}

/// `sum_p W(p) prod_j (z_j p_j + (1 - z_j)(1 - p_j))`, written out
/// independently of the library's streaming evaluator.
fn lagrange_sum(m: PrimeModulus, values: &[FieldElement], z: &[FieldElement]) -> FieldElement {
    let l = z.len();
    let mut acc = m.zero();
    for (idx, &w) in values.iter().enumerate() {
        let mut basis = m.one();
        for (j, &zj) in z.iter().enumerate() {
            let bit = (idx >> (l - 1 - j)) & 1 == 1;
            basis *= if bit { zj } else { m.one() - zj };
        }
        acc += w * basis;
    }
    acc
}

fn table_strategy(max_vars: usize) -> impl Strategy<Value = (usize, u64)> {
    (0..=max_vars, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mle_agrees_with_table_on_hypercube((l, seed) in table_strategy(8)) {
        let m = PrimeModulus::mersenne61();
        let mut rng = RandomSource::new(seed);
        let t = MultilinearTable::new(m, rng.field_elements(m, 1 << l)).unwrap();
        for idx in 0..1usize << l {
            prop_assert_eq!(t.evaluate(&index_bits(m, idx, l)).unwrap(), t.values()[idx]);
        }
    }

    #[test]
    fn mle_matches_lagrange_sum((l, seed) in table_strategy(6)) {
        let m = PrimeModulus::mersenne61();
        let mut rng = RandomSource::new(seed);
        let t = MultilinearTable::new(m, rng.field_elements(m, 1 << l)).unwrap();
        let z = rng.field_elements(m, l);
        let expected = lagrange_sum(m, t.values(), &z);
        prop_assert_eq!(t.evaluate(&z).unwrap(), expected);
        prop_assert_eq!(t.evaluate_by_basis(&z).unwrap(), expected);
    }

    #[test]
    fn mle_is_affine_in_each_variable((l, seed) in (1usize..=6, any::<u64>())) {
        let m = PrimeModulus::mersenne61();
        let mut rng = RandomSource::new(seed);
        let t = MultilinearTable::new(m, rng.field_elements(m, 1 << l)).unwrap();
        let z = rng.field_elements(m, l);
        for j in 0..l {
            let at = |x: u64| {
                let mut p = z.clone();
                p[j] = m.elem(x);
                t.evaluate(&p).unwrap()
            };
            // f(0), f(1), f(2) collinear
            prop_assert_eq!(at(2) - at(1), at(1) - at(0));
        }
    }

    #[test]
    fn interpolation_reproduces_points(seed in any::<u64>(), n in 1usize..=10) {
        let m = PrimeModulus::mersenne61();
        let mut rng = RandomSource::new(seed);
        let mut xs: Vec<FieldElement> = Vec::new();
        while xs.len() < n {
            let x = rng.field_element(m);
            if !xs.contains(&x) {
                xs.push(x);
            }
        }
        let pts: Vec<_> = xs.iter().map(|&x| (x, rng.field_element(m))).collect();
        let f = interpolate(&pts).unwrap();
        prop_assert!(f.degree().is_none_or(|d| d < n));
        for &(x, y) in &pts {
            prop_assert_eq!(f.evaluate(x), y);
        }
    }

    #[test]
    fn line_restriction_hits_endpoints((l, seed) in table_strategy(6)) {
        let m = PrimeModulus::mersenne61();
        let mut rng = RandomSource::new(seed);
        let t = MultilinearTable::new(m, rng.field_elements(m, 1 << l)).unwrap();
        let z1 = rng.field_elements(m, l);
        let z2 = rng.field_elements(m, l);
        let line = line_through(&z1, &z2).unwrap();
        let f = mle_restrict_line(&t, &line).unwrap();
        prop_assert!(f.degree().is_none_or(|d| d <= l));
        prop_assert_eq!(f.evaluate(m.zero()), t.evaluate(&z1).unwrap());
        prop_assert_eq!(f.evaluate(m.one()), t.evaluate(&z2).unwrap());
        let r = rng.field_element(m);
        prop_assert_eq!(f.evaluate(r), t.evaluate(&line.at(r)).unwrap());
    }

    #[test]
    fn eq_is_kronecker_on_bits(l in 0usize..=6, a in any::<usize>(), b in any::<usize>()) {
        let m = f101();
        let (a, b) = (a % (1 << l), b % (1 << l));
        let v = eq_eval(m, &index_bits(m, a, l), &index_bits(m, b, l)).unwrap();
        prop_assert_eq!(v.value(), (a == b) as u64);
    }
}

#[test]
fn root_bound_at_101() {
    let m = f101();
    let mut rng = RandomSource::new(4);
    for _ in 0..1000 {
        let n = 1 + rng.below(8) as usize;
        let mut coeffs = rng.field_elements(m, n + 1);
        coeffs[n] = rng.nonzero_field_element(m);
        let f = UnivariatePoly::new(coeffs);
        let roots = (0..101)
            .filter(|&x| f.evaluate(m.elem(x)).is_zero())
            .count();
        assert!(roots <= n, "degree {n} polynomial with {roots} roots");
    }
}

#[test]
fn fixture_x_plus_two() {
    let m = PrimeModulus::new(17).unwrap();
    let g = interpolate(&[(m.elem(0), m.elem(2)), (m.elem(1), m.elem(3))]).unwrap();
    assert_eq!(g.coeffs(), &[m.elem(2), m.elem(1)]);
    assert_eq!(g.evaluate(m.one()), m.elem(3));
}

#[test]
fn schwartz_zippel_agreement_rate() {
    let m = f101();
    let trials = 100_000u64;
    let mut agree = 0u64;
    let mut rng = RandomSource::new(77);
    for _ in 0..trials {
        let l = 1 + rng.below(4) as usize;
        let a = rng.field_elements(m, 1 << l);
        let mut b = rng.field_elements(m, 1 << l);
        if a == b {
            b[0] += m.one();
        }
        let (ta, tb) = (
            MultilinearTable::new(m, a).unwrap(),
            MultilinearTable::new(m, b).unwrap(),
        );
        let z = rng.field_elements(m, l);
        agree += (ta.evaluate(&z).unwrap() == tb.evaluate(&z).unwrap()) as u64;
    }
    let bound = 4.0 / 101.0;
    let rate = agree as f64 / trials as f64;
    assert!(
        rate <= bound + 3.0 * (bound * (1.0 - bound) / trials as f64).sqrt(),
        "rate {rate}"
    );
}
