//! Univariate polynomials, interpolation, and multilinear extensions over
//! the Boolean hypercube.
//!
//! Hypercube tables use lexicographic order with the first variable as the
//! most significant bit: the value at `(b_1, ..., b_l)` lives at index
//! `b_1 * 2^(l-1) + ... + b_l`.

use thiserror::Error;

use crate::field::{FieldElement, PrimeModulus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("interpolation points share the abscissa {0}")]
    DuplicateAbscissa(u64),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("table of length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("modulus mismatch")]
    ModulusMismatch,
}

/// Dense coefficients in ascending powers with trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnivariatePoly {
    coeffs: Vec<FieldElement>,
}

impl UnivariatePoly {
    pub fn new(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UnivariatePoly { coeffs }
    }

    pub fn zero() -> Self {
        UnivariatePoly { coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Horner evaluation.
    pub fn evaluate(&self, x: FieldElement) -> FieldElement {
        let mut acc = x.modulus().zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn checked_evaluate(&self, x: FieldElement) -> Result<FieldElement, PolyError> {
        if self.coeffs.iter().any(|c| c.modulus() != x.modulus()) {
            return Err(PolyError::ModulusMismatch);
        }
        Ok(self.evaluate(x))
    }

    /// `p(0) + p(1)`, the quantity the sum-check verifier tests each round.
    pub fn sum_over_bits(&self, m: PrimeModulus) -> FieldElement {
        let mut acc = m.zero();
        for (i, &c) in self.coeffs.iter().enumerate() {
            acc += c;
            if i == 0 {
                acc += c;
            }
        }
        acc
    }

    pub fn add(&self, other: &UnivariatePoly) -> UnivariatePoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(&a), Some(&b)) => a + b,
                (Some(&a), None) => a,
                (None, Some(&b)) => b,
                (None, None) => unreachable!(),
            });
        }
        UnivariatePoly::new(out)
    }

    pub fn scale(&self, k: FieldElement) -> UnivariatePoly {
        UnivariatePoly::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn mul(&self, other: &UnivariatePoly) -> UnivariatePoly {
        if self.is_zero() || other.is_zero() {
            return UnivariatePoly::zero();
        }
        let m = self.coeffs[0].modulus();
        let mut out = vec![m.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UnivariatePoly::new(out)
    }

    /// `prod (x - r)` over the given roots.
    pub fn from_roots(m: PrimeModulus, roots: &[FieldElement]) -> UnivariatePoly {
        let mut acc = UnivariatePoly::constant(m.one());
        for &r in roots {
            acc = acc.mul(&UnivariatePoly::new(vec![-r, m.one()]));
        }
        acc
    }
}

/// Lagrange interpolation through `points`; the result has degree
/// `< points.len()`.
pub fn interpolate(points: &[(FieldElement, FieldElement)]) -> Result<UnivariatePoly, PolyError> {
    if points.is_empty() {
        return Ok(UnivariatePoly::zero());
    }
    let m = points[0].0.modulus();
    if points
        .iter()
        .any(|(x, y)| x.modulus() != m || y.modulus() != m)
    {
        return Err(PolyError::ModulusMismatch);
    }
    for (i, (xi, _)) in points.iter().enumerate() {
        if points[..i].iter().any(|(xj, _)| xj == xi) {
            return Err(PolyError::DuplicateAbscissa(xi.value()));
        }
    }
    let n = points.len();
    let mut acc = vec![m.zero(); n];
    for (i, &(xi, yi)) in points.iter().enumerate() {
        let mut basis = vec![m.one()];
        let mut denom = m.one();
        for (j, &(xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            // basis <- basis * (x - xj)
            let mut next = vec![m.zero(); basis.len() + 1];
            for (k, &b) in basis.iter().enumerate() {
                next[k + 1] += b;
                next[k] -= b * xj;
            }
            basis = next;
            denom *= xi - xj;
        }
        let scale = yi * denom.inv().expect("abscissae are distinct");
        for (a, b) in acc.iter_mut().zip(basis) {
            *a += b * scale;
        }
    }
    Ok(UnivariatePoly::new(acc))
}

/// Interpolates values taken at the abscissae `0, 1, ..., values.len()-1`.
pub fn interpolate_consecutive(values: &[FieldElement]) -> UnivariatePoly {
    if values.is_empty() {
        return UnivariatePoly::zero();
    }
    let m = values[0].modulus();
    let pts: Vec<_> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| (m.elem(i as u64), v))
        .collect();
    interpolate(&pts).expect("consecutive abscissae are distinct below p")
}

/// A point in `F^n`.
pub type Point = Vec<FieldElement>;

/// `prod_j (z_j p_j + (1 - z_j)(1 - p_j))`: the multilinear indicator that
/// equals the Kronecker delta on binary inputs.
pub fn eq_eval(
    m: PrimeModulus,
    z: &[FieldElement],
    p: &[FieldElement],
) -> Result<FieldElement, PolyError> {
    if z.len() != p.len() {
        return Err(PolyError::LengthMismatch {
            expected: z.len(),
            got: p.len(),
        });
    }
    let one = m.one();
    let mut acc = one;
    for (&a, &b) in z.iter().zip(p) {
        acc *= a * b + (one - a) * (one - b);
    }
    Ok(acc)
}

/// `eq(z, bits(index))` where `index` is read as `z.len()` bits, most
/// significant first. Stops multiplying once a factor is zero.
pub fn eq_at_index(m: PrimeModulus, z: &[FieldElement], index: usize) -> FieldElement {
    let n = z.len();
    let one = m.one();
    let mut acc = one;
    for (j, &x) in z.iter().enumerate() {
        let bit = (index >> (n - 1 - j)) & 1 == 1;
        // factor is x when the bit is set, 1 - x otherwise
        let zero_factor = if bit { x.is_zero() } else { x.is_one() };
        if zero_factor {
            return m.zero();
        }
        let factor_is_one = if bit { x.is_one() } else { x.is_zero() };
        if !factor_is_one {
            acc *= if bit { x } else { one - x };
        }
    }
    acc
}

/// `eq(z, b)` for every `b` in `{0,1}^l`, in table order.
pub fn eq_table(m: PrimeModulus, z: &[FieldElement]) -> Vec<FieldElement> {
    let mut table = vec![m.one()];
    for &x in z {
        let mut next = Vec::with_capacity(table.len() * 2);
        for &t in &table {
            let hi = t * x;
            next.push(t - hi);
            next.push(hi);
        }
        table = next;
    }
    table
}

/// Values of a function on `{0,1}^l`, length exactly `2^l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearTable {
    num_vars: usize,
    modulus: PrimeModulus,
    values: Vec<FieldElement>,
}

impl MultilinearTable {
    pub fn new(modulus: PrimeModulus, values: Vec<FieldElement>) -> Result<Self, PolyError> {
        if values.is_empty() || !values.len().is_power_of_two() {
            return Err(PolyError::NotPowerOfTwo(values.len()));
        }
        if values.iter().any(|v| v.modulus() != modulus) {
            return Err(PolyError::ModulusMismatch);
        }
        Ok(MultilinearTable {
            num_vars: values.len().trailing_zeros() as usize,
            modulus,
            values,
        })
    }

    /// Zero-pads `values` up to the next power of two (at least one entry).
    pub fn padded(modulus: PrimeModulus, mut values: Vec<FieldElement>) -> Self {
        let len = values.len().max(1).next_power_of_two();
        values.resize(len, modulus.zero());
        Self::new(modulus, values).expect("padded to a power of two")
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn values(&self) -> &[FieldElement] {
        &self.values
    }

    /// The multilinear extension at `z`, folding one variable at a time in
    /// `O(2^l)` field operations.
    pub fn evaluate(&self, z: &[FieldElement]) -> Result<FieldElement, PolyError> {
        if z.len() != self.num_vars {
            return Err(PolyError::LengthMismatch {
                expected: self.num_vars,
                got: z.len(),
            });
        }
        if self.num_vars == 0 {
            return Ok(self.values[0]);
        }
        let mut half = self.values.len() / 2;
        let x = z[0];
        let mut buf: Vec<FieldElement> = (0..half)
            .map(|k| fold(self.values[k], self.values[k + half], x))
            .collect();
        for &x in &z[1..] {
            half /= 2;
            for k in 0..half {
                buf[k] = fold(buf[k], buf[k + half], x);
            }
        }
        Ok(buf[0])
    }

    /// Brute-force `sum_p eq(z, p) W(p)`, kept as an independent check on
    /// [`MultilinearTable::evaluate`].
    pub fn evaluate_by_basis(&self, z: &[FieldElement]) -> Result<FieldElement, PolyError> {
        if z.len() != self.num_vars {
            return Err(PolyError::LengthMismatch {
                expected: self.num_vars,
                got: z.len(),
            });
        }
        let mut acc = self.modulus.zero();
        for (idx, &w) in self.values.iter().enumerate() {
            acc += eq_at_index(self.modulus, z, idx) * w;
        }
        Ok(acc)
    }
}

#[inline]
fn fold(lo: FieldElement, hi: FieldElement, x: FieldElement) -> FieldElement {
    if x.is_zero() {
        lo
    } else if x.is_one() {
        hi
    } else {
        lo + x * (hi - lo)
    }
}

/// `gamma(t) = base + t * direction`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineLine {
    pub base: Point,
    pub direction: Point,
}

impl AffineLine {
    pub fn at(&self, t: FieldElement) -> Point {
        self.base
            .iter()
            .zip(&self.direction)
            .map(|(&b, &d)| b + t * d)
            .collect()
    }

    pub fn arity(&self) -> usize {
        self.base.len()
    }
}

/// The line with `gamma(0) = z1` and `gamma(1) = z2`.
pub fn line_through(z1: &[FieldElement], z2: &[FieldElement]) -> Result<AffineLine, PolyError> {
    if z1.len() != z2.len() {
        return Err(PolyError::LengthMismatch {
            expected: z1.len(),
            got: z2.len(),
        });
    }
    Ok(AffineLine {
        base: z1.to_vec(),
        direction: z1.iter().zip(z2).map(|(&a, &b)| b - a).collect(),
    })
}

/// `W~ o gamma` as a univariate polynomial of degree at most `num_vars`,
/// by evaluating at `0..=num_vars` and interpolating.
pub fn mle_restrict_line(
    table: &MultilinearTable,
    line: &AffineLine,
) -> Result<UnivariatePoly, PolyError> {
    if line.arity() != table.num_vars() {
        return Err(PolyError::LengthMismatch {
            expected: table.num_vars(),
            got: line.arity(),
        });
    }
    let m = table.modulus();
    let values = (0..=table.num_vars())
        .map(|t| table.evaluate(&line.at(m.elem(t as u64))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(interpolate_consecutive(&values))
}

/// Converts an index to its `width` bits, most significant first.
pub fn index_bits(m: PrimeModulus, index: usize, width: usize) -> Point {
    (0..width)
        .map(|j| m.elem(((index >> (width - 1 - j)) & 1) as u64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p17() -> PrimeModulus {
        PrimeModulus::new(17).unwrap()
    }

    fn elems(m: PrimeModulus, vs: &[u64]) -> Vec<FieldElement> {
        vs.iter().map(|&v| m.elem(v)).collect()
    }

    #[test]
    fn horner() {
        let m = p17();
        let f = UnivariatePoly::new(elems(m, &[1, 0, 3]));
        assert_eq!(f.evaluate(m.elem(2)).value(), 13);
        assert_eq!(f.evaluate(m.zero()).value(), 1);
        assert_eq!(UnivariatePoly::zero().evaluate(m.zero()).value(), 0);
        let g = UnivariatePoly::new(elems(m, &[2, 1]));
        assert_eq!(g.evaluate(m.one()).value(), 3);
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let m = p17();
        let f = UnivariatePoly::new(elems(m, &[4, 0, 0]));
        assert_eq!(f.degree(), Some(0));
        assert_eq!(UnivariatePoly::new(elems(m, &[0, 0])).degree(), None);
    }

    #[test]
    fn interpolation_examples() {
        let m = p17();
        let g = interpolate(&[(m.elem(0), m.elem(2)), (m.elem(1), m.elem(3))]).unwrap();
        assert_eq!(g.coeffs(), elems(m, &[2, 1]).as_slice());
        let sq = interpolate(&[
            (m.elem(0), m.elem(0)),
            (m.elem(1), m.elem(1)),
            (m.elem(2), m.elem(4)),
        ])
        .unwrap();
        assert_eq!(sq.coeffs(), elems(m, &[0, 0, 1]).as_slice());
        let c = interpolate(&[(m.elem(5), m.elem(9))]).unwrap();
        assert_eq!(c.coeffs(), elems(m, &[9]).as_slice());
        assert_eq!(
            interpolate(&[(m.elem(1), m.elem(2)), (m.elem(1), m.elem(3))]),
            Err(PolyError::DuplicateAbscissa(1))
        );
    }

    #[test]
    fn eq_examples() {
        let m = p17();
        assert_eq!(
            eq_eval(m, &elems(m, &[1, 0, 1]), &elems(m, &[1, 0, 1]))
                .unwrap()
                .value(),
            1
        );
        assert_eq!(
            eq_eval(m, &elems(m, &[0, 1]), &elems(m, &[1, 1]))
                .unwrap()
                .value(),
            0
        );
        assert_eq!(
            eq_eval(m, &elems(m, &[2, 3]), &elems(m, &[1, 1]))
                .unwrap()
                .value(),
            6
        );
        assert!(eq_eval(m, &elems(m, &[1]), &elems(m, &[1, 0])).is_err());
        for idx in 0..4 {
            let z = elems(m, &[2, 3]);
            assert_eq!(
                eq_at_index(m, &z, idx),
                eq_eval(m, &z, &index_bits(m, idx, 2)).unwrap()
            );
        }
    }

    #[test]
    fn mle_examples() {
        let m = PrimeModulus::mersenne61();
        let t = MultilinearTable::new(m, elems(m, &[1, 2, 3, 4])).unwrap();
        assert_eq!(t.evaluate(&elems(m, &[1, 1])).unwrap().value(), 4);
        assert_eq!(t.evaluate(&elems(m, &[2, 3])).unwrap().value(), 8);
        let c = MultilinearTable::new(m, elems(m, &[5])).unwrap();
        assert_eq!(c.evaluate(&[]).unwrap().value(), 5);
        assert!(t.evaluate(&elems(m, &[1])).is_err());
    }

    #[test]
    fn padding_and_shape() {
        let m = p17();
        let t = MultilinearTable::padded(m, elems(m, &[1, 2, 3]));
        assert_eq!(t.num_vars(), 2);
        assert_eq!(t.values()[3].value(), 0);
        assert!(MultilinearTable::new(m, elems(m, &[1, 2, 3])).is_err());
    }

    #[test]
    fn line_examples() {
        let m = p17();
        let line = line_through(&elems(m, &[1, 5]), &elems(m, &[3, 7])).unwrap();
        assert_eq!(line.base, elems(m, &[1, 5]));
        assert_eq!(line.direction, elems(m, &[2, 2]));
        assert_eq!(line.at(m.one()), elems(m, &[3, 7]));
        let flat = line_through(&elems(m, &[4, 4]), &elems(m, &[4, 4])).unwrap();
        assert_eq!(flat.direction, elems(m, &[0, 0]));
    }

    #[test]
    fn restrict_examples() {
        let m = PrimeModulus::mersenne61();
        let t = MultilinearTable::new(m, elems(m, &[1, 2])).unwrap();
        let line = AffineLine {
            base: elems(m, &[5]),
            direction: elems(m, &[3]),
        };
        let f = mle_restrict_line(&t, &line).unwrap();
        assert_eq!(f.coeffs(), elems(m, &[6, 3]).as_slice());

        let t2 = MultilinearTable::new(m, elems(m, &[1, 2, 3, 4])).unwrap();
        let z = elems(m, &[9, 11]);
        let flat = line_through(&z, &z).unwrap();
        let g = mle_restrict_line(&t2, &flat).unwrap();
        assert_eq!(g.degree(), Some(0));
        assert_eq!(g.coeffs()[0], t2.evaluate(&z).unwrap());
    }
}
