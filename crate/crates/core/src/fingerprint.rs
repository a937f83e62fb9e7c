//! Reed-Solomon fingerprints for vector equality and Freivalds' check for
//! matrix products.
//!
//! Both use the power vector `(r, r^2, ..., r^n)`, starting at exponent one.

use thiserror::Error;

use crate::field::{FieldElement, PrimeModulus, RandomSource};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FingerprintError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("field of size {field} is smaller than n^2 = {needed}")]
    FieldTooSmall { field: u64, needed: u128 },
    #[error("matrix data of length {len} is not {n}x{n}")]
    NotSquare { n: usize, len: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("empty vector")]
    Empty,
    #[error("modulus mismatch")]
    ModulusMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqualityVerdict {
    Equal,
    NotEqual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreivaldsVerdict {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataVector {
    entries: Vec<FieldElement>,
}

impl DataVector {
    pub fn new(entries: Vec<FieldElement>) -> Result<Self, FingerprintError> {
        if entries.is_empty() {
            return Err(FingerprintError::Empty);
        }
        let m = entries[0].modulus();
        if entries.iter().any(|e| e.modulus() != m) {
            return Err(FingerprintError::ModulusMismatch);
        }
        Ok(DataVector { entries })
    }

    pub fn from_u64(m: PrimeModulus, vs: &[u64]) -> Result<Self, FingerprintError> {
        Self::new(vs.iter().map(|&v| m.elem(v)).collect())
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.entries[0].modulus()
    }
}

/// Row-major `n x n` matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareMatrix {
    n: usize,
    entries: Vec<FieldElement>,
}

impl SquareMatrix {
    pub fn new(n: usize, entries: Vec<FieldElement>) -> Result<Self, FingerprintError> {
        if n == 0 || entries.len() != n * n {
            return Err(FingerprintError::NotSquare {
                n,
                len: entries.len(),
            });
        }
        Ok(SquareMatrix { n, entries })
    }

    pub fn from_u64(m: PrimeModulus, n: usize, vs: &[u64]) -> Result<Self, FingerprintError> {
        Self::new(n, vs.iter().map(|&v| m.elem(v)).collect())
    }

    pub fn identity(m: PrimeModulus, n: usize) -> Self {
        let mut entries = vec![m.zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = m.one();
        }
        SquareMatrix { n, entries }
    }

    pub fn zero(m: PrimeModulus, n: usize) -> Self {
        SquareMatrix {
            n,
            entries: vec![m.zero(); n * n],
        }
    }

    pub fn random(m: PrimeModulus, n: usize, rng: &mut RandomSource) -> Self {
        SquareMatrix {
            n,
            entries: rng.field_elements(m, n * n),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> FieldElement {
        self.entries[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: FieldElement) {
        self.entries[row * self.n + col] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.entries[0].modulus()
    }

    pub fn mul_vec(&self, x: &[FieldElement]) -> Vec<FieldElement> {
        let m = self.modulus();
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(m.zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }
}

/// `sum_{i=1}^n v_i r^i`, Horner-evaluated.
pub fn rs_fingerprint(v: &[FieldElement], r: FieldElement) -> FieldElement {
    let mut acc = r.modulus().zero();
    for &a in v.iter().rev() {
        acc = (acc + a) * r;
    }
    acc
}

/// Alice sends `(r, p(r))`; Bob compares with `q(r)`. One-sided error: equal
/// vectors are always declared equal.
pub fn equality_protocol(
    a: &DataVector,
    b: &DataVector,
    rng: &mut RandomSource,
) -> Result<(EqualityVerdict, FieldElement), FingerprintError> {
    if a.len() != b.len() {
        return Err(FingerprintError::LengthMismatch(a.len(), b.len()));
    }
    let m = a.modulus();
    if b.modulus() != m {
        return Err(FingerprintError::ModulusMismatch);
    }
    let n = a.len() as u128;
    if (m.value() as u128) < n * n {
        return Err(FingerprintError::FieldTooSmall {
            field: m.value(),
            needed: n * n,
        });
    }
    let r = rng.field_element(m);
    let alice = rs_fingerprint(a.entries(), r);
    let bob = rs_fingerprint(b.entries(), r);
    let verdict = if alice == bob {
        EqualityVerdict::Equal
    } else {
        EqualityVerdict::NotEqual
    };
    Ok((verdict, r))
}

/// Schoolbook `O(n^3)` product, used as the reference.
pub fn mat_mul(a: &SquareMatrix, b: &SquareMatrix) -> Result<SquareMatrix, FingerprintError> {
    if a.n != b.n {
        return Err(FingerprintError::DimensionMismatch(a.n, b.n));
    }
    let n = a.n;
    let m = a.modulus();
    let mut out = vec![m.zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a.get(i, k);
            for j in 0..n {
                out[i * n + j] += aik * b.get(k, j);
            }
        }
    }
    Ok(SquareMatrix { n, entries: out })
}

/// `(r, r^2, ..., r^n)`.
pub fn power_vector(r: FieldElement, n: usize) -> Vec<FieldElement> {
    let mut out = Vec::with_capacity(n);
    let mut cur = r;
    for i in 0..n {
        if i > 0 {
            cur *= r;
        }
        out.push(cur);
    }
    out
}

/// Checks `C x == A (B x)` for `x = (r, ..., r^n)` using three
/// matrix-vector products.
pub fn freivalds_verify(
    a: &SquareMatrix,
    b: &SquareMatrix,
    c: &SquareMatrix,
    rng: &mut RandomSource,
) -> Result<(FreivaldsVerdict, FieldElement), FingerprintError> {
    if a.n != b.n {
        return Err(FingerprintError::DimensionMismatch(a.n, b.n));
    }
    if a.n != c.n {
        return Err(FingerprintError::DimensionMismatch(a.n, c.n));
    }
    let r = rng.field_element(a.modulus());
    let x = power_vector(r, a.n);
    let cx = c.mul_vec(&x);
    let abx = a.mul_vec(&b.mul_vec(&x));
    let verdict = if cx == abx {
        FreivaldsVerdict::Accept
    } else {
        FreivaldsVerdict::Reject
    };
    Ok((verdict, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::UnivariatePoly;

    #[test]
    fn fingerprint_examples() {
        let big = PrimeModulus::mersenne61();
        assert_eq!(
            rs_fingerprint(&[big.one(), big.one()], big.elem(2)).value(),
            6
        );
        assert_eq!(rs_fingerprint(&[big.zero(); 5], big.elem(9)).value(), 0);
        let m = PrimeModulus::new(17).unwrap();
        assert_eq!(rs_fingerprint(&[m.elem(3)], m.elem(5)).value(), 15);
    }

    #[test]
    fn fingerprint_is_polynomial_without_constant_term() {
        let m = PrimeModulus::new(101).unwrap();
        let v: Vec<_> = [4u64, 9, 0, 33].iter().map(|&x| m.elem(x)).collect();
        let mut coeffs = vec![m.zero()];
        coeffs.extend(v.iter().copied());
        let p = UnivariatePoly::new(coeffs);
        for r in 0..101 {
            assert_eq!(rs_fingerprint(&v, m.elem(r)), p.evaluate(m.elem(r)));
        }
    }

    #[test]
    fn equality_errors() {
        let m = PrimeModulus::new(17).unwrap();
        let mut rng = RandomSource::new(1);
        let a = DataVector::from_u64(m, &[1, 2, 3]).unwrap();
        let b = DataVector::from_u64(m, &[1, 2]).unwrap();
        assert_eq!(
            equality_protocol(&a, &b, &mut rng),
            Err(FingerprintError::LengthMismatch(3, 2))
        );
        let long = DataVector::from_u64(m, &[1; 5]).unwrap();
        assert!(matches!(
            equality_protocol(&long, &long, &mut rng),
            Err(FingerprintError::FieldTooSmall {
                field: 17,
                needed: 25
            })
        ));
        assert_eq!(DataVector::new(vec![]), Err(FingerprintError::Empty));
    }

    #[test]
    fn equal_vectors_always_equal() {
        let m = PrimeModulus::new(1031).unwrap();
        let mut rng = RandomSource::new(5);
        let a = DataVector::new(rng.field_elements(m, 32)).unwrap();
        for _ in 0..1000 {
            assert_eq!(
                equality_protocol(&a, &a, &mut rng).unwrap().0,
                EqualityVerdict::Equal
            );
        }
    }

    #[test]
    fn mat_mul_examples() {
        let m = PrimeModulus::mersenne61();
        let i2 = SquareMatrix::identity(m, 2);
        assert_eq!(mat_mul(&i2, &i2).unwrap(), i2);
        let a = SquareMatrix::from_u64(m, 2, &[1, 2, 3, 4]).unwrap();
        let b = SquareMatrix::from_u64(m, 2, &[5, 6, 7, 8]).unwrap();
        assert_eq!(
            mat_mul(&a, &b).unwrap(),
            SquareMatrix::from_u64(m, 2, &[19, 22, 43, 50]).unwrap()
        );
        let z = SquareMatrix::zero(m, 2);
        assert_eq!(mat_mul(&a, &z).unwrap(), z);
        assert!(mat_mul(&a, &SquareMatrix::identity(m, 3)).is_err());
        assert!(SquareMatrix::from_u64(m, 2, &[1, 2, 3]).is_err());
    }

    #[test]
    fn freivalds_completeness_and_rows() {
        let m = PrimeModulus::new(101).unwrap();
        let mut rng = RandomSource::new(11);
        let a = SquareMatrix::random(m, 6, &mut rng);
        let b = SquareMatrix::random(m, 6, &mut rng);
        let c = mat_mul(&a, &b).unwrap();
        for _ in 0..500 {
            let (v, r) = freivalds_verify(&a, &b, &c, &mut rng).unwrap();
            assert_eq!(v, FreivaldsVerdict::Accept);
            let cx = c.mul_vec(&power_vector(r, 6));
            for (i, &v) in cx.iter().enumerate() {
                assert_eq!(v, rs_fingerprint(c.row(i), r));
            }
        }
    }
}
