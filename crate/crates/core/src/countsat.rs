//! Counting satisfying assignments with sum-check over an arithmetized
//! Boolean formula.
//!
//! `!x -> 1 - x`, `x & y -> x y`, `x | y -> x + y - x y`. On `{0,1}^m` the
//! result agrees with the formula, so its hypercube sum is the model count.

use std::fmt;

use thiserror::Error;

use crate::field::{FieldElement, PrimeModulus, RandomSource};
use crate::sumcheck::{
    run_sumcheck, FinalMode, ProverStrategy, SumcheckError, SumcheckRun, SummandOracle,
};

/// Largest variable count [`count_models`] will enumerate.
pub const MAX_COUNT_VARS: usize = 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountsatError {
    #[error("syntax error at byte {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("{0} variables is too many to enumerate (limit {MAX_COUNT_VARS})")]
    TooLarge(usize),
    #[error("modulus {modulus} must exceed 2^{vars} to hold every count")]
    FieldTooSmallForCount { modulus: u64, vars: usize },
    #[error(transparent)]
    Sumcheck(#[from] SumcheckError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Var(usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    fn size(&self) -> usize {
        match self {
            Expr::Var(_) => 1,
            Expr::Not(e) => 1 + e.size(),
            Expr::And(a, b) | Expr::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    fn eval_bool(&self, bits: &[bool]) -> bool {
        match self {
            Expr::Var(i) => bits[*i],
            Expr::Not(e) => !e.eval_bool(bits),
            Expr::And(a, b) => a.eval_bool(bits) && b.eval_bool(bits),
            Expr::Or(a, b) => a.eval_bool(bits) || b.eval_bool(bits),
        }
    }

    fn eval_field(&self, x: &[FieldElement], one: FieldElement) -> FieldElement {
        match self {
            Expr::Var(i) => x[*i],
            Expr::Not(e) => one - e.eval_field(x, one),
            Expr::And(a, b) => a.eval_field(x, one) * b.eval_field(x, one),
            Expr::Or(a, b) => {
                let (u, v) = (a.eval_field(x, one), b.eval_field(x, one));
                u + v - u * v
            }
        }
    }

    fn count_occurrences(&self, out: &mut [usize]) {
        match self {
            Expr::Var(i) => out[*i] += 1,
            Expr::Not(e) => e.count_occurrences(out),
            Expr::And(a, b) | Expr::Or(a, b) => {
                a.count_occurrences(out);
                b.count_occurrences(out);
            }
        }
    }
}

/// A parsed formula. Variables are numbered in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub root: Expr,
    pub names: Vec<String>,
}

impl Formula {
    /// `m`.
    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    /// `S`: Var, Not, And and Or nodes.
    pub fn size(&self) -> usize {
        self.root.size()
    }

    pub fn eval(&self, bits: &[bool]) -> bool {
        self.root.eval_bool(bits)
    }

    /// Occurrences of each variable, which bound its degree after
    /// arithmetization.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut out = vec![0; self.num_vars()];
        self.root.count_occurrences(&mut out);
        out
    }

    fn write_expr(&self, e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match e {
            Expr::Var(i) => f.write_str(&self.names[*i]),
            Expr::Not(x) => {
                f.write_str("!")?;
                self.write_expr(x, f)
            }
            Expr::And(a, b) | Expr::Or(a, b) => {
                f.write_str("(")?;
                self.write_expr(a, f)?;
                f.write_str(if matches!(e, Expr::And(..)) {
                    " & "
                } else {
                    " | "
                })?;
                self.write_expr(b, f)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_expr(&self.root, f)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: Vec<String>,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, CountsatError> {
        Err(CountsatError::SyntaxError {
            position: self.pos,
            message: message.into(),
        })
    }

    fn expect(&mut self, c: u8) -> Result<(), CountsatError> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn expr(&mut self) -> Result<Expr, CountsatError> {
        self.skip_ws();
        match self.src.get(self.pos) {
            None => self.err("unexpected end of input"),
            Some(b'!') => {
                self.pos += 1;
                Ok(Expr::Not(Box::new(self.expr()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let a = self.expr()?;
                self.skip_ws();
                let op = match self.src.get(self.pos) {
                    Some(b'&') => b'&',
                    Some(b'|') => b'|',
                    _ => return self.err("expected '&' or '|'"),
                };
                self.pos += 1;
                let b = self.expr()?;
                self.expect(b')')?;
                Ok(if op == b'&' {
                    Expr::And(Box::new(a), Box::new(b))
                } else {
                    Expr::Or(Box::new(a), Box::new(b))
                })
            }
            Some(c) if c.is_ascii_lowercase() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_lowercase()
                        || self.src[self.pos].is_ascii_digit())
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let idx = match self.names.iter().position(|n| n == name) {
                    Some(i) => i,
                    None => {
                        self.names.push(name.to_string());
                        self.names.len() - 1
                    }
                };
                Ok(Expr::Var(idx))
            }
            Some(_) => self.err("expected a variable, '!' or '('"),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, CountsatError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        names: Vec::new(),
    };
    let root = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("trailing input");
    }
    Ok(Formula {
        root,
        names: p.names,
    })
}

/// The arithmetized formula as a sum-check summand.
#[derive(Debug, Clone)]
pub struct ArithmeticFormula {
    formula: Formula,
    modulus: PrimeModulus,
    bounds: Vec<usize>,
}

pub fn arithmetize(f: &Formula, modulus: PrimeModulus) -> ArithmeticFormula {
    ArithmeticFormula {
        bounds: f.occurrences(),
        formula: f.clone(),
        modulus,
    }
}

impl ArithmeticFormula {
    pub fn formula(&self) -> &Formula {
        &self.formula
    }
}

impl SummandOracle for ArithmeticFormula {
    fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    fn num_vars(&self) -> usize {
        self.formula.num_vars()
    }

    fn degree_bounds(&self) -> Vec<usize> {
        self.bounds.clone()
    }

    fn evaluate(&self, point: &[FieldElement]) -> FieldElement {
        assert_eq!(point.len(), self.num_vars());
        self.formula.root.eval_field(point, self.modulus.one())
    }

    fn describe(&self) -> String {
        format!("formula:{}", self.formula)
    }
}

/// Truth-table count.
pub fn count_models(f: &Formula) -> Result<u64, CountsatError> {
    let m = f.num_vars();
    if m > MAX_COUNT_VARS {
        return Err(CountsatError::TooLarge(m));
    }
    let mut bits = vec![false; m];
    let mut count = 0;
    for idx in 0..(1u64 << m) {
        for (j, b) in bits.iter_mut().enumerate() {
            *b = (idx >> (m - 1 - j)) & 1 == 1;
        }
        count += f.eval(&bits) as u64;
    }
    Ok(count)
}

/// Sum-check in direct mode over the arithmetization, opening with
/// `claimed mod p`.
pub fn countsat_protocol(
    f: &Formula,
    claimed: u64,
    modulus: PrimeModulus,
    seed: u64,
    strategy: ProverStrategy,
) -> Result<SumcheckRun, CountsatError> {
    let m = f.num_vars();
    if m >= 64 || modulus.value() <= (1u64 << m) {
        return Err(CountsatError::FieldTooSmallForCount {
            modulus: modulus.value(),
            vars: m,
        });
    }
    let g = arithmetize(f, modulus);
    Ok(run_sumcheck(
        &g,
        modulus.elem(claimed),
        seed,
        strategy,
        FinalMode::Direct,
    )?)
}

/// Random formula with exactly `size` nodes over variables `x1..=xk`,
/// `k <= max_vars`.
pub fn random_formula(max_vars: usize, size: usize, seed: u64) -> Formula {
    assert!(max_vars >= 1 && size >= 1);
    let mut rng = RandomSource::with_stream(seed, 13);
    fn gen(rng: &mut RandomSource, size: usize, vars: u64) -> Expr {
        match size {
            1 => Expr::Var(rng.below(vars) as usize),
            2 => Expr::Not(Box::new(gen(rng, 1, vars))),
            _ => {
                if rng.below(4) == 0 {
                    Expr::Not(Box::new(gen(rng, size - 1, vars)))
                } else {
                    let left = 1 + rng.below(size as u64 - 2) as usize;
                    let (a, b) = (gen(rng, left, vars), gen(rng, size - 1 - left, vars));
                    if rng.coin() {
                        Expr::And(Box::new(a), Box::new(b))
                    } else {
                        Expr::Or(Box::new(a), Box::new(b))
                    }
                }
            }
        }
    }
    let raw = gen(&mut rng, size, max_vars as u64);
    // renumber by first appearance through the printed form
    let names: Vec<String> = (1..=max_vars).map(|i| format!("x{i}")).collect();
    let text = Formula { root: raw, names }.to_string();
    parse_formula(&text).expect("generated formulas print in the grammar")
}
