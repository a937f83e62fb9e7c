//! Quadratic residuosity over `Z_N` and the interactive proof that `a` is a
//! non-residue.
//!
//! The verifier flips a coin per round and sends `r^2` or `a r^2`. A prover
//! who knows the factors of `N` can tell the two apart exactly when `a` is a
//! non-residue; otherwise it is guessing.

use thiserror::Error;

use crate::field::{is_prime, RandomSource, PROVER_STREAM};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResidueError {
    #[error("modulus {0} is even")]
    EvenModulus(u64),
    #[error("modulus {0} must be an odd prime or a product of two distinct odd primes")]
    BadModulus(u64),
    #[error("factors do not multiply to the modulus or are not distinct odd primes")]
    BadFactors,
    #[error("residuosity mod composite {0} needs its factorization")]
    UnknownFactorization(u64),
    #[error("{a} is not coprime to {n}")]
    NotCoprime { a: u64, n: u64 },
    #[error("at least one round is required")]
    NoRounds,
}

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    b %= n;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, n);
        }
        b = mul_mod(b, b, n);
        e >>= 1;
    }
    acc
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The Jacobi symbol `(a/n)` for odd `n >= 3`.
pub fn jacobi(a: u64, n: u64) -> Result<i8, ResidueError> {
    if n.is_multiple_of(2) {
        return Err(ResidueError::EvenModulus(n));
    }
    if n < 3 {
        return Err(ResidueError::BadModulus(n));
    }
    let (mut a, mut n) = (a % n, n);
    let mut sign = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        (a, n) = (n, a);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// `N` with its factorization when the holder knows it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QrModulus {
    n: u64,
    factors: Option<(u64, u64)>,
}

impl QrModulus {
    /// `factors` may be omitted, in which case residuosity is only
    /// decidable for prime `n`.
    pub fn new(n: u64, factors: Option<(u64, u64)>) -> Result<Self, ResidueError> {
        if n.is_multiple_of(2) {
            return Err(ResidueError::EvenModulus(n));
        }
        if n < 3 {
            return Err(ResidueError::BadModulus(n));
        }
        if let Some((p, q)) = factors {
            let ok = p != q
                && p % 2 == 1
                && q % 2 == 1
                && is_prime(p)
                && is_prime(q)
                && (p as u128) * (q as u128) == n as u128;
            if !ok {
                return Err(ResidueError::BadFactors);
            }
        }
        Ok(QrModulus { n, factors })
    }

    pub fn value(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> Option<(u64, u64)> {
        self.factors
    }

    /// The same modulus with the factorization forgotten.
    pub fn public(&self) -> Self {
        QrModulus {
            n: self.n,
            factors: None,
        }
    }

    pub fn is_unit(&self, a: u64) -> bool {
        gcd(a % self.n, self.n) == 1
    }
}

fn euler(a: u64, p: u64) -> bool {
    pow_mod(a, (p - 1) / 2, p) == 1
}

/// Whether `a` is a square mod `N`, by Euler's criterion modulo each prime
/// factor.
pub fn is_qr(a: u64, m: &QrModulus) -> Result<bool, ResidueError> {
    if !m.is_unit(a) {
        return Err(ResidueError::NotCoprime { a, n: m.n });
    }
    match m.factors {
        Some((p, q)) => Ok(euler(a % p, p) && euler(a % q, q)),
        None if is_prime(m.n) => Ok(euler(a % m.n, m.n)),
        None => Err(ResidueError::UnknownFactorization(m.n)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QnrProver {
    /// Decides residuosity from the factorization and answers accordingly.
    WithFactors,
    /// Flips its own coin.
    Guessing,
}

/// One run of the non-residuosity protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QnrSession {
    pub a: u64,
    pub coins: Vec<bool>,
    pub challenges: Vec<u64>,
    pub answers: Vec<bool>,
    pub accepted: bool,
}

/// Uniform unit mod `n`, by rejection.
fn random_unit(rng: &mut RandomSource, n: u64) -> u64 {
    loop {
        let r = rng.below(n);
        if gcd(r, n) == 1 {
            return r;
        }
    }
}

/// Runs `rounds` rounds. The verifier's coins come from stream 0 of `seed`,
/// a guessing prover's from stream 1. A coin of `true` means the challenge
/// was `a r^2`.
pub fn qnr_protocol(
    m: &QrModulus,
    a: u64,
    rounds: usize,
    prover: QnrProver,
    seed: u64,
) -> Result<QnrSession, ResidueError> {
    if rounds == 0 {
        return Err(ResidueError::NoRounds);
    }
    if !m.is_unit(a) {
        return Err(ResidueError::NotCoprime { a, n: m.n });
    }
    if prover == QnrProver::WithFactors && m.factors.is_none() && !is_prime(m.n) {
        return Err(ResidueError::UnknownFactorization(m.n));
    }
    let n = m.n;
    let mut vrng = RandomSource::new(seed);
    let mut prng = RandomSource::with_stream(seed, PROVER_STREAM);
    let mut s = QnrSession {
        a,
        coins: Vec::with_capacity(rounds),
        challenges: Vec::with_capacity(rounds),
        answers: Vec::with_capacity(rounds),
        accepted: true,
    };
    for _ in 0..rounds {
        let coin = vrng.coin();
        let r = random_unit(&mut vrng, n);
        let sq = mul_mod(r, r, n);
        let t = if coin { mul_mod(a % n, sq, n) } else { sq };
        let answer = match prover {
            QnrProver::WithFactors => !is_qr(t, m)?,
            QnrProver::Guessing => prng.coin(),
        };
        s.accepted &= answer == coin;
        s.coins.push(coin);
        s.challenges.push(t);
        s.answers.push(answer);
    }
    Ok(s)
}
