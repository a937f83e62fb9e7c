//! The sum-check protocol: a prover convinces a verifier of
//! `H = sum_{b in {0,1}^l} g(b)` in `l` rounds of univariate messages.
//!
//! [`SumcheckProver`] produces round polynomials under a [`ProverStrategy`],
//! [`VerifierState`] checks them, and [`run_sumcheck`] drives the two and
//! records a [`Transcript`]. The verifier either evaluates `g` itself at the
//! end ([`FinalMode::Direct`]) or hands the final point and value to a
//! caller ([`FinalMode::Deferred`]), which is how GKR composes layers.
//!
//! Non-honest provers "carry the lie": whenever the verifier's running claim
//! disagrees with the true partial sum, the prover sends the true round
//! polynomial plus a correction that keeps `s(0) + s(1)` consistent and
//! vanishes at guessed challenge values. A lucky challenge makes the claim
//! true again and the prover continues honestly from there.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{measure, FieldElement, OpCounter, PrimeModulus, RandomSource, PROVER_STREAM};
use crate::poly::{interpolate_consecutive, UnivariatePoly};
use crate::transcript::{hex_all, Header, ProverMsg, Record, Summary, Transcript, VerifierMsg};

/// Largest number of variables [`brute_force_sum`] will enumerate.
pub const MAX_BRUTE_FORCE_VARS: usize = 25;

/// A polynomial `g: F^l -> F` the verifier can evaluate.
pub trait SummandOracle: Send + Sync {
    fn modulus(&self) -> PrimeModulus;
    fn num_vars(&self) -> usize;
    /// Upper bound on the degree of `g` in each variable.
    fn degree_bounds(&self) -> Vec<usize>;
    /// Upper bound on the total degree; defaults to the sum of the
    /// per-variable bounds.
    fn total_degree(&self) -> usize {
        self.degree_bounds().iter().sum()
    }
    fn evaluate(&self, point: &[FieldElement]) -> FieldElement;
    /// A label that identifies this oracle in transcript headers.
    fn describe(&self) -> String;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SumcheckError {
    #[error("{0} variables is too many to enumerate (limit {MAX_BRUTE_FORCE_VARS})")]
    TooLarge(usize),
    #[error("message arrived out of phase: {0}")]
    OutOfPhase(&'static str),
    #[error("degree bound {bound} needs {needed} distinct abscissae but the field has {field}")]
    FieldTooSmall {
        bound: usize,
        needed: usize,
        field: u64,
    },
}

/// Why a verifier rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Rejection {
    #[error("round {round}: s(0) + s(1) does not match the running claim")]
    SumMismatch { round: usize },
    #[error("round {round}: degree {degree} exceeds bound {bound}")]
    DegreeExceeded {
        round: usize,
        degree: usize,
        bound: usize,
    },
    #[error("final check: s_l(r_l) != g(r_1, ..., r_l)")]
    FinalMismatch,
}

/// Exact sum of `g` over `{0,1}^l`.
pub fn brute_force_sum(g: &dyn SummandOracle) -> Result<FieldElement, SumcheckError> {
    let l = g.num_vars();
    if l > MAX_BRUTE_FORCE_VARS {
        return Err(SumcheckError::TooLarge(l));
    }
    let m = g.modulus();
    let mut point = vec![m.zero(); l];
    let mut acc = m.zero();
    for idx in 0..(1usize << l) {
        set_bits(m, &mut point, 0, l, idx);
        acc += g.evaluate(&point);
    }
    Ok(acc)
}

fn set_bits(m: PrimeModulus, point: &mut [FieldElement], start: usize, width: usize, idx: usize) {
    for j in 0..width {
        point[start + j] = m.elem(((idx >> (width - 1 - j)) & 1) as u64);
    }
}

/// `s_i(x) = sum_{b_{i+1..l}} g(r_1, ..., r_{i-1}, x, b_{i+1}, ..., b_l)`,
/// from `degree_bounds[i-1] + 1` evaluations of `2^(l-i)` terms each.
///
/// `round` is 1-based and `fixed` holds the `round - 1` earlier challenges.
pub fn honest_round_poly(
    g: &dyn SummandOracle,
    fixed: &[FieldElement],
    round: usize,
) -> UnivariatePoly {
    let l = g.num_vars();
    assert!(
        round >= 1 && round <= l,
        "round {round} out of range 1..={l}"
    );
    assert_eq!(fixed.len(), round - 1, "need exactly round-1 fixed values");
    let m = g.modulus();
    let bound = g.degree_bounds()[round - 1];
    let free = l - round;
    let mut point = Vec::with_capacity(l);
    point.extend_from_slice(fixed);
    point.push(m.zero());
    point.resize(l, m.zero());
    let values: Vec<FieldElement> = (0..=bound)
        .map(|t| {
            point[round - 1] = m.elem(t as u64);
            let mut acc = m.zero();
            for idx in 0..(1usize << free) {
                if free > 0 {
                    set_bits(m, &mut point, round, free, idx);
                }
                acc += g.evaluate(&point);
            }
            acc
        })
        .collect();
    interpolate_consecutive(&values)
}

/// How the prover behaves.
#[derive(Clone)]
pub enum ProverStrategy {
    Honest,
    /// Open with `claim + offset` and carry the discrepancy.
    WrongClaim(FieldElement),
    /// Send a wrong polynomial in this (1-based) round that still passes the
    /// sum test when possible, then carry the discrepancy.
    DeviateAtRound(usize),
    /// Compute every message from a different polynomial.
    WrongOracle(Arc<dyn SummandOracle>),
}

impl ProverStrategy {
    pub fn label(&self) -> String {
        match self {
            ProverStrategy::Honest => "honest".into(),
            ProverStrategy::WrongClaim(o) => format!("wrong-claim:{}", o.value()),
            ProverStrategy::DeviateAtRound(i) => format!("deviate-at-round:{i}"),
            ProverStrategy::WrongOracle(j) => format!("wrong-oracle:{}", j.describe()),
        }
    }

    pub fn is_honest(&self) -> bool {
        matches!(self, ProverStrategy::Honest)
    }
}

impl fmt::Debug for ProverStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// A polynomial of degree `<= bound` with `q(0) + q(1) = 1`, vanishing at
/// `bound` random points.
fn lie_carrier(m: PrimeModulus, bound: usize, rng: &mut RandomSource) -> UnivariatePoly {
    let half = m.elem(2).inv().expect("p is odd");
    if bound == 0 {
        return UnivariatePoly::constant(half);
    }
    loop {
        let roots = rng.field_elements(m, bound);
        let q = UnivariatePoly::from_roots(m, &roots);
        let s = q.sum_over_bits(m);
        if let Ok(k) = s.inv() {
            return q.scale(k);
        }
    }
}

/// A nonzero polynomial of degree `<= bound` with `q(0) + q(1) = 0`, or a
/// nonzero constant when `bound == 0` (no such polynomial exists).
fn zero_sum_perturbation(m: PrimeModulus, bound: usize, rng: &mut RandomSource) -> UnivariatePoly {
    let c = rng.nonzero_field_element(m);
    let base = match bound {
        0 => UnivariatePoly::constant(m.one()),
        1 => UnivariatePoly::new(vec![m.one(), -m.elem(2)]),
        _ => {
            let mut roots = vec![m.zero(), m.one()];
            roots.extend(rng.field_elements(m, bound - 2));
            UnivariatePoly::from_roots(m, &roots)
        }
    };
    base.scale(c)
}

/// Prover side of one sum-check session.
pub struct SumcheckProver<'a> {
    oracle: &'a dyn SummandOracle,
    strategy: ProverStrategy,
    rng: RandomSource,
    fixed: Vec<FieldElement>,
    asserted: FieldElement,
    last: Option<UnivariatePoly>,
}

impl<'a> SumcheckProver<'a> {
    /// `claim` is what the caller asks the prover to defend; `WrongClaim`
    /// shifts it before opening.
    pub fn new(
        g: &'a dyn SummandOracle,
        claim: FieldElement,
        strategy: ProverStrategy,
        rng: RandomSource,
    ) -> Self {
        let asserted = match &strategy {
            ProverStrategy::WrongClaim(offset) => claim + *offset,
            _ => claim,
        };
        SumcheckProver {
            oracle: g,
            strategy,
            rng,
            fixed: Vec::new(),
            asserted,
            last: None,
        }
    }

    /// `H_0` as sent to the verifier.
    pub fn opening_claim(&self) -> FieldElement {
        self.asserted
    }

    /// The value the verifier holds after the last challenge.
    pub fn current_claim(&self) -> FieldElement {
        self.asserted
    }

    pub fn challenges(&self) -> &[FieldElement] {
        &self.fixed
    }

    fn working_oracle(&self) -> &dyn SummandOracle {
        match &self.strategy {
            ProverStrategy::WrongOracle(j) => j.as_ref(),
            _ => self.oracle,
        }
    }

    pub fn round_message(&mut self) -> UnivariatePoly {
        let round = self.fixed.len() + 1;
        let m = self.oracle.modulus();
        let bound = self.oracle.degree_bounds()[round - 1];
        let truth = honest_round_poly(self.working_oracle(), &self.fixed, round);
        let msg = if self.strategy.is_honest() {
            truth
        } else {
            let delta = self.asserted - truth.sum_over_bits(m);
            if !delta.is_zero() {
                truth.add(&lie_carrier(m, bound, &mut self.rng).scale(delta))
            } else if matches!(self.strategy, ProverStrategy::DeviateAtRound(i) if i == round) {
                truth.add(&zero_sum_perturbation(m, bound, &mut self.rng))
            } else {
                truth
            }
        };
        self.last = Some(msg.clone());
        msg
    }

    pub fn into_rng(self) -> RandomSource {
        self.rng
    }

    pub fn receive_challenge(&mut self, r: FieldElement) {
        let last = self
            .last
            .take()
            .expect("challenge before any round message");
        self.asserted = last.evaluate(r);
        self.fixed.push(r);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinalMode {
    Direct,
    Deferred,
}

impl FinalMode {
    pub fn label(&self) -> &'static str {
        match self {
            FinalMode::Direct => "direct",
            FinalMode::Deferred => "deferred",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Waiting for the polynomial of this 1-based round.
    AwaitRound(usize),
    FinalCheck,
    Accepted,
    Rejected,
}

/// A round polynomial as transmitted: exactly the coefficients sent, which
/// for an honest prover is `degree_bound + 1` of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundMessage {
    pub round: usize,
    pub coeffs: Vec<FieldElement>,
}

impl RoundMessage {
    pub fn padded(round: usize, poly: &UnivariatePoly, bound: usize, m: PrimeModulus) -> Self {
        let mut coeffs = poly.coeffs().to_vec();
        if coeffs.len() < bound + 1 {
            coeffs.resize(bound + 1, m.zero());
        }
        RoundMessage { round, coeffs }
    }

    pub fn poly(&self) -> UnivariatePoly {
        UnivariatePoly::new(self.coeffs.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoundOutcome {
    Challenge(FieldElement),
    Reject(Rejection),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FinalOutcome {
    Accepted,
    Rejected(Rejection),
    DeferredClaim {
        point: Vec<FieldElement>,
        value: FieldElement,
    },
}

/// Verifier state machine.
#[derive(Debug, Clone)]
pub struct VerifierState {
    modulus: PrimeModulus,
    degree_bounds: Vec<usize>,
    phase: Phase,
    running_claim: FieldElement,
    challenges: Vec<FieldElement>,
    mode: FinalMode,
}

impl VerifierState {
    pub fn new(
        modulus: PrimeModulus,
        degree_bounds: Vec<usize>,
        claim: FieldElement,
        mode: FinalMode,
    ) -> Result<Self, SumcheckError> {
        if let Some(&b) = degree_bounds.iter().max() {
            if (b as u64) >= modulus.value() {
                return Err(SumcheckError::FieldTooSmall {
                    bound: b,
                    needed: b + 1,
                    field: modulus.value(),
                });
            }
        }
        let phase = if degree_bounds.is_empty() {
            Phase::FinalCheck
        } else {
            Phase::AwaitRound(1)
        };
        Ok(VerifierState {
            modulus,
            degree_bounds,
            phase,
            running_claim: claim,
            challenges: Vec::new(),
            mode,
        })
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn running_claim(&self) -> FieldElement {
        self.running_claim
    }

    pub fn challenges(&self) -> &[FieldElement] {
        &self.challenges
    }

    /// Checks degree and `s(0) + s(1) == H_{i-1}`, then draws `r_i` and sets
    /// `H_i = s_i(r_i)`.
    pub fn check_round(
        &mut self,
        msg: &RoundMessage,
        rng: &mut RandomSource,
    ) -> Result<RoundOutcome, SumcheckError> {
        let Phase::AwaitRound(i) = self.phase else {
            return Err(SumcheckError::OutOfPhase("round message outside a round"));
        };
        if msg.round != i {
            return Err(SumcheckError::OutOfPhase("round number does not match"));
        }
        let poly = msg.poly();
        let bound = self.degree_bounds[i - 1];
        if let Some(d) = poly.degree() {
            if d > bound {
                self.phase = Phase::Rejected;
                return Ok(RoundOutcome::Reject(Rejection::DegreeExceeded {
                    round: i,
                    degree: d,
                    bound,
                }));
            }
        }
        if poly.sum_over_bits(self.modulus) != self.running_claim {
            self.phase = Phase::Rejected;
            return Ok(RoundOutcome::Reject(Rejection::SumMismatch { round: i }));
        }
        let r = rng.field_element(self.modulus);
        self.running_claim = poly.evaluate(r);
        self.challenges.push(r);
        self.phase = if i == self.degree_bounds.len() {
            Phase::FinalCheck
        } else {
            Phase::AwaitRound(i + 1)
        };
        Ok(RoundOutcome::Challenge(r))
    }

    /// Direct mode evaluates `g` at the challenge point; deferred mode hands
    /// the point and `H_l` back without touching `g`.
    pub fn final_check(
        &mut self,
        g: Option<&dyn SummandOracle>,
    ) -> Result<FinalOutcome, SumcheckError> {
        if self.phase != Phase::FinalCheck {
            return Err(SumcheckError::OutOfPhase(
                "final check before the last round",
            ));
        }
        match self.mode {
            FinalMode::Deferred => {
                self.phase = Phase::Accepted;
                Ok(FinalOutcome::DeferredClaim {
                    point: self.challenges.clone(),
                    value: self.running_claim,
                })
            }
            FinalMode::Direct => {
                let g = g.ok_or(SumcheckError::OutOfPhase(
                    "direct final check needs the oracle",
                ))?;
                if g.evaluate(&self.challenges) == self.running_claim {
                    self.phase = Phase::Accepted;
                    Ok(FinalOutcome::Accepted)
                } else {
                    self.phase = Phase::Rejected;
                    Ok(FinalOutcome::Rejected(Rejection::FinalMismatch))
                }
            }
        }
    }
}

/// Result of [`run_sumcheck`].
#[derive(Debug, Clone)]
pub struct SumcheckRun {
    pub outcome: FinalOutcome,
    pub transcript: Transcript,
    pub prover_ops: OpCounter,
    pub verifier_ops: OpCounter,
}

impl SumcheckRun {
    pub fn accepted(&self) -> bool {
        matches!(
            self.outcome,
            FinalOutcome::Accepted | FinalOutcome::DeferredClaim { .. }
        )
    }
}

/// Interleaves prover and verifier for all rounds, appending records to
/// `transcript`. Returns the rejection if one happened.
pub(crate) fn drive_rounds(
    prover: &mut SumcheckProver<'_>,
    verifier: &mut VerifierState,
    verifier_rng: &mut RandomSource,
    transcript: &mut Transcript,
    layer: Option<usize>,
    prover_ops: &mut OpCounter,
    verifier_ops: &mut OpCounter,
) -> Option<Rejection> {
    let m = verifier.modulus;
    let bounds = verifier.degree_bounds.clone();
    for (idx, &bound) in bounds.iter().enumerate() {
        let round = idx + 1;
        let (poly, ops) = measure(|| prover.round_message());
        *prover_ops += ops;
        let msg = RoundMessage::padded(round, &poly, bound, m);
        transcript.push(Record::Prover(ProverMsg::Round {
            layer,
            round,
            coeffs: hex_all(&msg.coeffs),
        }));
        let (outcome, ops) = measure(|| verifier.check_round(&msg, verifier_rng));
        *verifier_ops += ops;
        match outcome.expect("rounds are driven in phase") {
            RoundOutcome::Reject(reason) => return Some(reason),
            RoundOutcome::Challenge(r) => {
                transcript.push(Record::Verifier(VerifierMsg::Challenge {
                    layer,
                    round,
                    challenge: r.to_hex(),
                }));
                let ((), ops) = measure(|| prover.receive_challenge(r));
                *prover_ops += ops;
            }
        }
    }
    None
}

pub(crate) fn sumcheck_header(
    g: &dyn SummandOracle,
    claim: FieldElement,
    seed: u64,
    strategy: &ProverStrategy,
    mode: FinalMode,
) -> Header {
    Header::Sumcheck {
        modulus: g.modulus().value(),
        num_vars: g.num_vars(),
        degree_bounds: g.degree_bounds(),
        seed,
        strategy: strategy.label(),
        oracle: g.describe(),
        claim: claim.to_hex(),
        mode: mode.label().into(),
    }
}

/// Runs one full session. The verifier draws challenges from stream 0 of
/// `seed`; a cheating prover draws its guesses from stream 1.
pub fn run_sumcheck(
    g: &dyn SummandOracle,
    claim: FieldElement,
    seed: u64,
    strategy: ProverStrategy,
    mode: FinalMode,
) -> Result<SumcheckRun, SumcheckError> {
    let m = g.modulus();
    let mut transcript = Transcript::new(sumcheck_header(g, claim, seed, &strategy, mode));
    let mut verifier_rng = RandomSource::new(seed);
    let mut prover = SumcheckProver::new(
        g,
        claim,
        strategy,
        RandomSource::with_stream(seed, PROVER_STREAM),
    );
    let opening = prover.opening_claim();
    transcript.push(Record::Prover(ProverMsg::Claim {
        layer: None,
        value: opening.to_hex(),
    }));
    let mut verifier = VerifierState::new(m, g.degree_bounds(), opening, mode)?;
    let mut prover_ops = OpCounter::default();
    let mut verifier_ops = OpCounter::default();
    let rejected = drive_rounds(
        &mut prover,
        &mut verifier,
        &mut verifier_rng,
        &mut transcript,
        None,
        &mut prover_ops,
        &mut verifier_ops,
    );
    let outcome = match rejected {
        Some(reason) => FinalOutcome::Rejected(reason),
        None => {
            let (out, ops) = measure(|| verifier.final_check(Some(g)));
            verifier_ops += ops;
            out?
        }
    };
    transcript.summary = Some(summarize(
        &transcript,
        &outcome,
        m,
        prover_ops,
        verifier_ops,
    ));
    Ok(SumcheckRun {
        outcome,
        transcript,
        prover_ops,
        verifier_ops,
    })
}

pub(crate) fn summarize(
    t: &Transcript,
    outcome: &FinalOutcome,
    m: PrimeModulus,
    prover_ops: OpCounter,
    verifier_ops: OpCounter,
) -> Summary {
    let (verdict, reason) = match outcome {
        FinalOutcome::Accepted => ("accept", None),
        FinalOutcome::DeferredClaim { .. } => ("deferred", None),
        FinalOutcome::Rejected(r) => ("reject", Some(r.to_string())),
    };
    let elements = t.field_elements();
    Summary {
        verdict: verdict.into(),
        reason,
        rounds: t.round_messages(),
        field_elements: elements,
        bytes: elements * m.element_bytes(),
        prover_ops: prover_ops.total(),
        verifier_ops: verifier_ops.total(),
    }
}

/// Sparse polynomial `sum_k c_k prod_j x_j^{e_kj}`, the oracle behind the
/// built-in families.
#[derive(Debug, Clone)]
pub struct SparsePolyOracle {
    modulus: PrimeModulus,
    num_vars: usize,
    terms: Vec<(FieldElement, Vec<u32>)>,
    label: String,
}

impl SparsePolyOracle {
    pub fn new(
        modulus: PrimeModulus,
        num_vars: usize,
        terms: Vec<(FieldElement, Vec<u32>)>,
        label: impl Into<String>,
    ) -> Self {
        assert!(terms.iter().all(|(_, e)| e.len() == num_vars));
        SparsePolyOracle {
            modulus,
            num_vars,
            terms,
            label: label.into(),
        }
    }

    /// `x_1 x_2 ... x_l`.
    pub fn product(m: PrimeModulus, l: usize) -> Self {
        Self::new(m, l, vec![(m.one(), vec![1; l])], format!("product:{l}"))
    }

    /// `x_1 + ... + x_l`.
    pub fn linear(m: PrimeModulus, l: usize) -> Self {
        let terms = (0..l)
            .map(|j| {
                let mut e = vec![0; l];
                e[j] = 1;
                (m.one(), e)
            })
            .collect();
        Self::new(m, l, terms, format!("linear:{l}"))
    }

    /// `x_1 x_2 + x_3`.
    pub fn demo(m: PrimeModulus) -> Self {
        Self::new(
            m,
            3,
            vec![(m.one(), vec![1, 1, 0]), (m.one(), vec![0, 0, 1])],
            "demo",
        )
    }

    /// The constant `c` in `l` variables.
    pub fn constant(m: PrimeModulus, l: usize, c: u64) -> Self {
        Self::new(
            m,
            l,
            vec![(m.elem(c), vec![0; l])],
            format!("constant:{l}:{c}"),
        )
    }

    /// Random polynomial with per-variable degree `<= max_degree`, drawn
    /// from `seed`. Every variable reaches its bound in at least one term.
    pub fn random(m: PrimeModulus, l: usize, max_degree: u32, seed: u64) -> Self {
        let mut rng = RandomSource::with_stream(seed, 7);
        let count = 1 + rng.below(6) as usize;
        let mut terms: Vec<(FieldElement, Vec<u32>)> = (0..count)
            .map(|_| {
                let e = (0..l)
                    .map(|_| rng.below(max_degree as u64 + 1) as u32)
                    .collect();
                (rng.nonzero_field_element(m), e)
            })
            .collect();
        // one term of full per-variable degree pins the bounds exactly
        terms.push((rng.nonzero_field_element(m), vec![max_degree; l]));
        Self::new(m, l, terms, format!("random:{l}:{max_degree}:{seed}"))
    }

    pub fn terms(&self) -> &[(FieldElement, Vec<u32>)] {
        &self.terms
    }
}

impl SummandOracle for SparsePolyOracle {
    fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn degree_bounds(&self) -> Vec<usize> {
        (0..self.num_vars)
            .map(|j| {
                self.terms
                    .iter()
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(_, e)| e[j] as usize)
                    .max()
                    .unwrap_or(0)
            })
            .collect()
    }

    fn total_degree(&self) -> usize {
        self.terms
            .iter()
            .filter(|(c, _)| !c.is_zero())
            .map(|(_, e)| e.iter().map(|&x| x as usize).sum::<usize>())
            .max()
            .unwrap_or(0)
    }

    fn evaluate(&self, point: &[FieldElement]) -> FieldElement {
        assert_eq!(point.len(), self.num_vars);
        let mut acc = self.modulus.zero();
        for (c, exps) in &self.terms {
            let mut t = *c;
            for (&x, &e) in point.iter().zip(exps) {
                if e > 0 {
                    t *= x.pow(e as u64);
                }
            }
            acc += t;
        }
        acc
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

/// Parses the oracle labels produced by [`SparsePolyOracle`] families:
/// `product:L`, `linear:L`, `demo`, `constant:L:C`, `random:L:D:SEED`.
pub fn builtin_oracle(spec: &str, m: PrimeModulus) -> Option<SparsePolyOracle> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| s.parse::<u64>().ok();
    let o = match parts.as_slice() {
        ["demo"] => SparsePolyOracle::demo(m),
        ["product", l] => SparsePolyOracle::product(m, num(l)? as usize),
        ["linear", l] => SparsePolyOracle::linear(m, num(l)? as usize),
        ["constant", l, c] => SparsePolyOracle::constant(m, num(l)? as usize, num(c)?),
        ["random", l, d, s] => {
            SparsePolyOracle::random(m, num(l)? as usize, num(d)? as u32, num(s)?)
        }
        _ => return None,
    };
    // the canonical label must round-trip
    (o.describe() == spec).then_some(o)
}
