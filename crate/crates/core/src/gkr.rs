//! GKR: verifying a layered circuit's outputs with one sum-check per layer.
//!
//! The verifier starts from a random point `z_0` against the multilinear
//! extension of the claimed outputs. Layer `i` turns a claim about
//! `V~_i(z_i)` into claims about `V~_{i+1}` at two points via a deferred
//! sum-check over
//!
//! ```text
//! f(p, w1, w2) = eq(z_i, p) [add~_i(p,w1,w2) (V~_{i+1}(w1) + V~_{i+1}(w2))
//!                           + mult~_i(p,w1,w2) V~_{i+1}(w1) V~_{i+1}(w2)]
//! ```
//!
//! and then merges the two claims by restricting `V~_{i+1}` to the line
//! through both points. The last claim is checked against the input.
//!
//! [`GkrVerifier`] holds only the circuit, the input and the claimed
//! outputs. The trace lives on the prover side.

use std::fmt;

use thiserror::Error;

use crate::circuit::{
    evaluate, wiring_mle_with, wiring_pair, CircuitError, EvaluationTrace, GateOp, LayeredCircuit,
    WiringBackend, WiringPoint,
};
use crate::field::{measure, FieldElement, OpCounter, PrimeModulus, RandomSource, PROVER_STREAM};
use crate::fingerprint::DataVector;
use crate::poly::{
    eq_at_index, eq_eval, line_through, AffineLine, MultilinearTable, Point, UnivariatePoly,
};
use crate::sumcheck::{
    drive_rounds, summarize, FinalMode, FinalOutcome, ProverStrategy, Rejection, SumcheckProver,
    SummandOracle, VerifierState,
};
use crate::transcript::{hex_all, Header, ProverMsg, Record, Transcript, VerifierMsg};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GkrError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("claimed outputs have {got} entries, circuit has {expected}")]
    OutputWidthMismatch { expected: usize, got: usize },
    #[error("layer {0} has no sum-check (layers are 0..depth)")]
    LayerOutOfRange(usize),
}

/// Why a GKR verifier rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GkrRejection {
    #[error("layer {layer}: {reason}")]
    Sumcheck { layer: usize, reason: Rejection },
    #[error("layer {layer}: prover values do not reproduce the sum-check's final claim")]
    FinalValueMismatch { layer: usize },
    #[error("layer {layer}: line polynomial degree {degree} exceeds {bound}")]
    DegreeExceeded {
        layer: usize,
        degree: usize,
        bound: usize,
    },
    #[error("layer {layer}: line polynomial does not pass through the two claimed values")]
    EndpointMismatch { layer: usize },
    #[error("final claim does not match the input's extension")]
    InputMismatch,
}

/// `V~_layer(point) = value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerClaim {
    pub layer: usize,
    pub point: Point,
    pub value: FieldElement,
}

/// The summand `f_{i,z_i}` evaluated from the trace (prover side).
pub struct LayerOracle<'a> {
    circuit: &'a LayeredCircuit,
    below: &'a MultilinearTable,
    layer: usize,
    z: Point,
    s_i: usize,
    s_next: usize,
}

pub fn make_layer_oracle<'a>(
    c: &'a LayeredCircuit,
    trace: &'a EvaluationTrace,
    claim: &LayerClaim,
) -> Result<LayerOracle<'a>, GkrError> {
    let i = claim.layer;
    if i >= c.depth() {
        return Err(GkrError::LayerOutOfRange(i));
    }
    let s_i = c.log_width(i);
    if claim.point.len() != s_i {
        return Err(CircuitError::ArityMismatch {
            expected: s_i,
            got: claim.point.len(),
        }
        .into());
    }
    Ok(LayerOracle {
        circuit: c,
        below: trace.table(i + 1),
        layer: i,
        z: claim.point.clone(),
        s_i,
        s_next: c.log_width(i + 1),
    })
}

impl SummandOracle for LayerOracle<'_> {
    fn modulus(&self) -> PrimeModulus {
        self.circuit.modulus()
    }

    fn num_vars(&self) -> usize {
        self.s_i + 2 * self.s_next
    }

    fn degree_bounds(&self) -> Vec<usize> {
        vec![2; self.num_vars()]
    }

    fn evaluate(&self, point: &[FieldElement]) -> FieldElement {
        let m = self.modulus();
        let (p, w) = point.split_at(self.s_i);
        let (w1, w2) = w.split_at(self.s_next);
        let (add, mul) = wiring_pair(self.circuit, self.layer, p, w1, w2);
        if add.is_zero() && mul.is_zero() {
            return m.zero();
        }
        let e = eq_eval(m, &self.z, p).expect("arity fixed at construction");
        let v1 = self.below.evaluate(w1).expect("arity");
        let v2 = self.below.evaluate(w2).expect("arity");
        e * (add * (v1 + v2) + mul * v1 * v2)
    }

    fn describe(&self) -> String {
        format!("gkr-layer:{}", self.layer)
    }
}

/// Draws `z_0` and evaluates the claimed outputs' extension there.
pub fn output_claim(
    c: &LayeredCircuit,
    claimed_outputs: &[FieldElement],
    rng: &mut RandomSource,
) -> Result<LayerClaim, GkrError> {
    if claimed_outputs.len() != c.width(0) {
        return Err(GkrError::OutputWidthMismatch {
            expected: c.width(0),
            got: claimed_outputs.len(),
        });
    }
    let m = c.modulus();
    let point = rng.field_elements(m, c.log_width(0));
    let value = MultilinearTable::padded(m, claimed_outputs.to_vec())
        .evaluate(&point)
        .expect("arity matches");
    Ok(LayerClaim {
        layer: 0,
        point,
        value,
    })
}

/// Verifier side of the line reduction: checks `deg f <= s_{i+1}`,
/// `f(0) = v1`, `f(1) = v2`, draws `r` and returns `(gamma(r), f(r))`.
pub fn reduce_two_claims(
    next_layer: usize,
    z1: &[FieldElement],
    z2: &[FieldElement],
    v1: FieldElement,
    v2: FieldElement,
    f: &UnivariatePoly,
    rng: &mut RandomSource,
) -> Result<(LayerClaim, FieldElement), GkrRejection> {
    let bound = z1.len();
    let layer = next_layer - 1;
    if let Some(degree) = f.degree() {
        if degree > bound {
            return Err(GkrRejection::DegreeExceeded {
                layer,
                degree,
                bound,
            });
        }
    }
    let m = v1.modulus();
    if f.evaluate(m.zero()) != v1 || f.evaluate(m.one()) != v2 {
        return Err(GkrRejection::EndpointMismatch { layer });
    }
    let line = line_through(z1, z2).expect("equal arity");
    let r = rng.field_element(m);
    Ok((
        LayerClaim {
            layer: next_layer,
            point: line.at(r),
            value: f.evaluate(r),
        },
        r,
    ))
}

/// The verifier. It never sees the evaluation trace.
pub struct GkrVerifier<'a> {
    circuit: &'a LayeredCircuit,
    input: &'a [FieldElement],
    claimed_outputs: &'a [FieldElement],
    backend: WiringBackend,
    rng: RandomSource,
}

impl<'a> GkrVerifier<'a> {
    pub fn new(
        circuit: &'a LayeredCircuit,
        input: &'a [FieldElement],
        claimed_outputs: &'a [FieldElement],
        backend: WiringBackend,
        seed: u64,
    ) -> Self {
        GkrVerifier {
            circuit,
            input,
            claimed_outputs,
            backend,
            rng: RandomSource::new(seed),
        }
    }

    pub fn rng(&mut self) -> &mut RandomSource {
        &mut self.rng
    }

    pub fn output_claim(&mut self) -> Result<LayerClaim, GkrError> {
        output_claim(self.circuit, self.claimed_outputs, &mut self.rng)
    }

    pub fn layer_state(&self, claim: &LayerClaim) -> VerifierState {
        let i = claim.layer;
        let l = self.circuit.log_width(i) + 2 * self.circuit.log_width(i + 1);
        VerifierState::new(
            self.circuit.modulus(),
            vec![2; l],
            claim.value,
            FinalMode::Deferred,
        )
        .expect("fields used for GKR have more than three elements")
    }

    /// Recomputes `f_{i,z_i}(p*, w1*, w2*)` from the wiring predicates and
    /// the prover's `V~_{i+1}` values.
    pub fn check_final_values(
        &self,
        claim: &LayerClaim,
        point: &[FieldElement],
        value: FieldElement,
        v1: FieldElement,
        v2: FieldElement,
    ) -> Result<(), GkrRejection> {
        let i = claim.layer;
        let m = self.circuit.modulus();
        let s_i = self.circuit.log_width(i);
        let s_next = self.circuit.log_width(i + 1);
        let at = WiringPoint {
            z: point[..s_i].to_vec(),
            w1: point[s_i..s_i + s_next].to_vec(),
            w2: point[s_i + s_next..].to_vec(),
        };
        let add = wiring_mle_with(&self.backend, self.circuit, i, GateOp::Add, &at)
            .expect("arity fixed by layer shape");
        let mul = wiring_mle_with(&self.backend, self.circuit, i, GateOp::Mul, &at)
            .expect("arity fixed by layer shape");
        let e = eq_eval(m, &claim.point, &at.z).expect("arity");
        if e * (add * (v1 + v2) + mul * v1 * v2) == value {
            Ok(())
        } else {
            Err(GkrRejection::FinalValueMismatch { layer: i })
        }
    }

    pub fn reduce(
        &mut self,
        claim: &LayerClaim,
        point: &[FieldElement],
        v1: FieldElement,
        v2: FieldElement,
        f: &UnivariatePoly,
    ) -> Result<(LayerClaim, FieldElement), GkrRejection> {
        let s_i = self.circuit.log_width(claim.layer);
        let s_next = self.circuit.log_width(claim.layer + 1);
        let w1 = &point[s_i..s_i + s_next];
        let w2 = &point[s_i + s_next..];
        reduce_two_claims(claim.layer + 1, w1, w2, v1, v2, f, &mut self.rng)
    }

    /// `V~_d(z_d)` from the input the verifier holds.
    pub fn check_input(&self, claim: &LayerClaim) -> Result<(), GkrRejection> {
        let t = MultilinearTable::padded(self.circuit.modulus(), self.input.to_vec());
        if t.evaluate(&claim.point).ok() == Some(claim.value) {
            Ok(())
        } else {
            Err(GkrRejection::InputMismatch)
        }
    }
}

/// Prover behaviour. Every strategy except `Honest` defends a false claim
/// adaptively once it holds one: it carries the lie through the sum-check,
/// solves for a second value that matches the final check, and bends the
/// line to hit both endpoints.
#[derive(Clone)]
pub enum GkrStrategy {
    Honest,
    /// Defend whatever outputs were claimed.
    CorruptOutput,
    /// Send `V~_{i+1}(w1*) + 1` at the end of this layer's sum-check.
    LieInValue {
        layer: usize,
    },
    /// Send a line polynomial with the right endpoints but the wrong shape.
    FabricateLine {
        layer: usize,
    },
    /// Use a sum-check strategy inside one layer.
    Sumcheck {
        layer: usize,
        strategy: ProverStrategy,
    },
}

impl GkrStrategy {
    pub fn label(&self) -> String {
        match self {
            GkrStrategy::Honest => "honest".into(),
            GkrStrategy::CorruptOutput => "corrupt-output".into(),
            GkrStrategy::LieInValue { layer } => format!("lie-in-value:{layer}"),
            GkrStrategy::FabricateLine { layer } => format!("fabricate-line:{layer}"),
            GkrStrategy::Sumcheck { layer, strategy } => {
                format!("sumcheck:{layer}:{}", strategy.label())
            }
        }
    }
}

impl fmt::Debug for GkrStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

struct GkrProver<'a> {
    circuit: &'a LayeredCircuit,
    trace: &'a EvaluationTrace,
    strategy: GkrStrategy,
    rng: RandomSource,
}

impl<'a> GkrProver<'a> {
    fn sumcheck_strategy(&self, claim: &LayerClaim) -> ProverStrategy {
        match &self.strategy {
            GkrStrategy::Honest => ProverStrategy::Honest,
            GkrStrategy::Sumcheck { layer, strategy } if *layer == claim.layer => strategy.clone(),
            // carrying is a no-op while the claim is true
            _ => ProverStrategy::WrongClaim(self.circuit.modulus().zero()),
        }
    }

    fn values_at(&self, layer: usize, w: &[FieldElement]) -> FieldElement {
        self.trace.table(layer).evaluate(w).expect("arity")
    }

    /// `(v1, v2)` for the end of layer `claim.layer`'s sum-check.
    fn final_values(
        &mut self,
        claim: &LayerClaim,
        point: &[FieldElement],
        value: FieldElement,
    ) -> (FieldElement, FieldElement) {
        let i = claim.layer;
        let s_i = self.circuit.log_width(i);
        let s_next = self.circuit.log_width(i + 1);
        let (p, w) = point.split_at(s_i);
        let (w1, w2) = w.split_at(s_next);
        let t1 = self.values_at(i + 1, w1);
        let t2 = self.values_at(i + 1, w2);
        match self.strategy {
            GkrStrategy::Honest => return (t1, t2),
            GkrStrategy::LieInValue { layer } if layer == i => {
                return (t1 + self.circuit.modulus().one(), t2)
            }
            _ => {}
        }
        let m = self.circuit.modulus();
        let (add, mul) = wiring_pair(self.circuit, i, p, w1, w2);
        let e = eq_eval(m, &claim.point, p).expect("arity");
        if e * (add * (t1 + t2) + mul * t1 * t2) == value {
            return (t1, t2);
        }
        // keep v1 true and solve e (add (v1 + v2) + mul v1 v2) = value for v2
        let denom = e * (add + mul * t1);
        match denom.inv() {
            Ok(inv) => (t1, (value - e * add * t1) * inv),
            Err(_) => (t1, t2),
        }
    }

    /// The restriction of `V~_{i+1}` to the line through `w1*` and `w2*`,
    /// corrected to pass through `(0, v1)` and `(1, v2)`.
    fn line_poly(
        &mut self,
        claim: &LayerClaim,
        point: &[FieldElement],
        v1: FieldElement,
        v2: FieldElement,
    ) -> UnivariatePoly {
        let i = claim.layer;
        let m = self.circuit.modulus();
        let s_i = self.circuit.log_width(i);
        let s_next = self.circuit.log_width(i + 1);
        let w1 = &point[s_i..s_i + s_next];
        let w2 = &point[s_i + s_next..];
        let line = line_through(w1, w2).expect("equal arity");
        let f = restrict(self.trace.table(i + 1), &line);
        if matches!(self.strategy, GkrStrategy::Honest) {
            return f;
        }
        let (t1, t2) = (f.evaluate(m.zero()), f.evaluate(m.one()));
        let one = m.one();
        // (v1 - t1)(1 - t) + (v2 - t2) t
        let fix = UnivariatePoly::new(vec![v1 - t1, (v2 - t2) - (v1 - t1)]);
        let mut out = f.add(&fix);
        if matches!(self.strategy, GkrStrategy::FabricateLine { layer } if layer == i) {
            let c = self.rng.nonzero_field_element(m);
            let mut roots = vec![m.zero(), one];
            roots.extend(self.rng.field_elements(m, s_next.saturating_sub(2)));
            out = out.add(&UnivariatePoly::from_roots(m, &roots).scale(c));
        }
        out
    }
}

fn restrict(table: &MultilinearTable, line: &AffineLine) -> UnivariatePoly {
    crate::poly::mle_restrict_line(table, line).expect("arity")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GkrVerdict {
    Accept,
    Reject(GkrRejection),
}

/// Per-layer record of the line reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub layer: usize,
    pub line: AffineLine,
    pub f: UnivariatePoly,
    pub r: FieldElement,
    pub next: LayerClaim,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LayerCost {
    pub rounds: usize,
    pub prover_ops: OpCounter,
    pub verifier_ops: OpCounter,
}

#[derive(Debug, Clone)]
pub struct GkrRun {
    pub verdict: GkrVerdict,
    pub transcript: Transcript,
    pub reductions: Vec<Reduction>,
    pub layers: Vec<LayerCost>,
    /// Cost of evaluating the circuit to build the trace.
    pub trace_ops: OpCounter,
    pub prover_ops: OpCounter,
    pub verifier_ops: OpCounter,
}

impl GkrRun {
    pub fn accepted(&self) -> bool {
        self.verdict == GkrVerdict::Accept
    }

    pub fn rounds(&self) -> usize {
        self.layers.iter().map(|l| l.rounds).sum()
    }
}

pub fn gkr_header(
    c: &LayeredCircuit,
    input: &DataVector,
    claimed_outputs: &[FieldElement],
    seed: u64,
    strategy: &GkrStrategy,
) -> Header {
    Header::Gkr {
        modulus: c.modulus().value(),
        seed,
        strategy: strategy.label(),
        circuit: c.to_document(),
        input: hex_all(input.entries()),
        claimed_outputs: hex_all(claimed_outputs),
    }
}

/// Runs GKR end to end with the direct-sum wiring backend.
pub fn gkr_prove_verify(
    c: &LayeredCircuit,
    input: &DataVector,
    claimed_outputs: &[FieldElement],
    seed: u64,
    strategy: GkrStrategy,
) -> Result<GkrRun, GkrError> {
    gkr_prove_verify_with(
        &WiringBackend::DirectSum,
        c,
        input,
        claimed_outputs,
        seed,
        strategy,
    )
}

pub fn gkr_prove_verify_with(
    backend: &WiringBackend,
    c: &LayeredCircuit,
    input: &DataVector,
    claimed_outputs: &[FieldElement],
    seed: u64,
    strategy: GkrStrategy,
) -> Result<GkrRun, GkrError> {
    let m = c.modulus();
    let (trace, trace_ops) = measure(|| evaluate(c, input));
    let trace = trace?;
    let mut transcript = Transcript::new(gkr_header(c, input, claimed_outputs, seed, &strategy));
    let mut verifier = GkrVerifier::new(c, input.entries(), claimed_outputs, backend.clone(), seed);
    let mut prover = GkrProver {
        circuit: c,
        trace: &trace,
        strategy,
        rng: RandomSource::with_stream(seed, PROVER_STREAM),
    };
    let mut prover_ops = OpCounter::default();
    let mut verifier_ops = OpCounter::default();
    let mut layers = Vec::with_capacity(c.depth());
    let mut reductions = Vec::with_capacity(c.depth());

    let (claim, ops) = measure(|| verifier.output_claim());
    verifier_ops += ops;
    let mut claim = claim?;
    transcript.push(Record::Verifier(VerifierMsg::OutputPoint {
        point: hex_all(&claim.point),
    }));

    let mut verdict = GkrVerdict::Accept;
    for i in 0..c.depth() {
        let mut cost = LayerCost::default();
        let step = run_layer(
            &mut prover,
            &mut verifier,
            &claim,
            &trace,
            &mut transcript,
            &mut cost,
        );
        prover_ops += cost.prover_ops;
        verifier_ops += cost.verifier_ops;
        layers.push(cost);
        match step {
            Ok(red) => {
                claim = red.next.clone();
                reductions.push(red);
            }
            Err(rej) => {
                verdict = GkrVerdict::Reject(rej);
                break;
            }
        }
        debug_assert_eq!(claim.layer, i + 1);
    }
    if verdict == GkrVerdict::Accept {
        let (res, ops) = measure(|| verifier.check_input(&claim));
        verifier_ops += ops;
        if let Err(rej) = res {
            verdict = GkrVerdict::Reject(rej);
        }
    }

    let outcome = match &verdict {
        GkrVerdict::Accept => FinalOutcome::Accepted,
        // the summary only needs the reason text
        GkrVerdict::Reject(_) => FinalOutcome::Rejected(Rejection::FinalMismatch),
    };
    let mut summary = summarize(&transcript, &outcome, m, prover_ops, verifier_ops);
    if let GkrVerdict::Reject(rej) = &verdict {
        summary.reason = Some(rej.to_string());
    }
    transcript.summary = Some(summary);
    Ok(GkrRun {
        verdict,
        transcript,
        reductions,
        layers,
        trace_ops,
        prover_ops,
        verifier_ops,
    })
}

fn run_layer(
    prover: &mut GkrProver<'_>,
    verifier: &mut GkrVerifier<'_>,
    claim: &LayerClaim,
    trace: &EvaluationTrace,
    transcript: &mut Transcript,
    cost: &mut LayerCost,
) -> Result<Reduction, GkrRejection> {
    let i = claim.layer;
    let c = prover.circuit;
    let oracle = make_layer_oracle(c, trace, claim).expect("claim shape matches the circuit");
    let mut state = verifier.layer_state(claim);
    let prover_rng = std::mem::replace(&mut prover.rng, RandomSource::new(0));
    let mut sc = SumcheckProver::new(
        &oracle,
        claim.value,
        prover.sumcheck_strategy(claim),
        prover_rng,
    );
    cost.rounds = oracle.num_vars();
    let rejected = drive_rounds(
        &mut sc,
        &mut state,
        verifier.rng(),
        transcript,
        Some(i),
        &mut cost.prover_ops,
        &mut cost.verifier_ops,
    );
    prover.rng = sc.into_rng();
    if let Some(reason) = rejected {
        return Err(GkrRejection::Sumcheck { layer: i, reason });
    }
    let (point, value) = match state.final_check(None).expect("in phase") {
        FinalOutcome::DeferredClaim { point, value } => (point, value),
        _ => unreachable!("GKR layers run in deferred mode"),
    };

    let ((v1, v2), ops) = measure(|| prover.final_values(claim, &point, value));
    cost.prover_ops += ops;
    transcript.push(Record::Prover(ProverMsg::FinalValues {
        layer: i,
        values: hex_all(&[v1, v2]),
    }));
    let (res, ops) = measure(|| verifier.check_final_values(claim, &point, value, v1, v2));
    cost.verifier_ops += ops;
    res?;

    let (f, ops) = measure(|| prover.line_poly(claim, &point, v1, v2));
    cost.prover_ops += ops;
    let s_next = c.log_width(i + 1);
    let mut coeffs = f.coeffs().to_vec();
    coeffs.resize(coeffs.len().max(s_next + 1), c.modulus().zero());
    transcript.push(Record::Prover(ProverMsg::Line {
        layer: i,
        coeffs: hex_all(&coeffs),
    }));
    let (res, ops) = measure(|| verifier.reduce(claim, &point, v1, v2, &f));
    cost.verifier_ops += ops;
    let (next, r) = res?;
    transcript.push(Record::Verifier(VerifierMsg::LineChallenge {
        layer: i,
        challenge: r.to_hex(),
    }));
    let s_i = c.log_width(i);
    let line = line_through(&point[s_i..s_i + s_next], &point[s_i + s_next..]).expect("arity");
    Ok(Reduction {
        layer: i,
        line,
        f,
        r,
        next,
    })
}

/// The whole circuit unrolled into a single sum-check summand, so that
/// `sum_b g(b) = V~_0(z_0)` with no intermediate claims. Used to compare
/// GKR's prover cost against running one monolithic sum-check.
///
/// With `T_d(a) = V~_d(a)` and, for `j < d`,
///
/// ```text
/// T_j(w; a, b, alpha, beta) = add~_j(w,a,b) (T_{j+1}(a; alpha) eq(beta, 0) + eq(alpha, 0) T_{j+1}(b; beta))
///                           + mult~_j(w,a,b) T_{j+1}(a; alpha) T_{j+1}(b; beta)
/// ```
///
/// the summand is `g(p, vars) = eq(z_0, p) T_0(p; vars)`. Every variable has
/// degree at most 2.
pub struct UnrolledCircuitOracle<'a> {
    circuit: &'a LayeredCircuit,
    input: MultilinearTable,
    z0: Point,
    /// `M_j`, the number of auxiliary variables below layer `j`.
    aux: Vec<usize>,
}

impl<'a> UnrolledCircuitOracle<'a> {
    pub fn new(circuit: &'a LayeredCircuit, input: &DataVector, z0: Point) -> Self {
        let d = circuit.depth();
        assert_eq!(z0.len(), circuit.log_width(0));
        let mut aux = vec![0; d + 1];
        for j in (0..d).rev() {
            aux[j] = 2 * circuit.log_width(j + 1) + 2 * aux[j + 1];
        }
        UnrolledCircuitOracle {
            circuit,
            input: MultilinearTable::padded(circuit.modulus(), input.entries().to_vec()),
            z0,
            aux,
        }
    }

    /// Total variable count `s_0 + M_0`.
    pub fn variables(circuit: &LayeredCircuit) -> usize {
        let d = circuit.depth();
        let mut aux = 0;
        for j in (0..d).rev() {
            aux = 2 * circuit.log_width(j + 1) + 2 * aux;
        }
        circuit.log_width(0) + aux
    }

    fn t(&self, j: usize, w: &[FieldElement], vars: &[FieldElement]) -> FieldElement {
        let m = self.circuit.modulus();
        if j == self.circuit.depth() {
            return self.input.evaluate(w).expect("arity");
        }
        let s = self.circuit.log_width(j + 1);
        let mj = self.aux[j + 1];
        let (a, rest) = vars.split_at(s);
        let (b, rest) = rest.split_at(s);
        let (alpha, beta) = rest.split_at(mj);
        let (add, mul) = wiring_pair(self.circuit, j, w, a, b);
        if add.is_zero() && mul.is_zero() {
            return m.zero();
        }
        let ta = self.t(j + 1, a, alpha);
        let tb = self.t(j + 1, b, beta);
        let mut acc = mul * ta * tb;
        if !add.is_zero() {
            let ea = eq_at_index(m, alpha, 0);
            let eb = eq_at_index(m, beta, 0);
            acc += add * (ta * eb + ea * tb);
        }
        acc
    }
}

impl SummandOracle for UnrolledCircuitOracle<'_> {
    fn modulus(&self) -> PrimeModulus {
        self.circuit.modulus()
    }

    fn num_vars(&self) -> usize {
        self.z0.len() + self.aux[0]
    }

    fn degree_bounds(&self) -> Vec<usize> {
        vec![2; self.num_vars()]
    }

    fn evaluate(&self, point: &[FieldElement]) -> FieldElement {
        let m = self.modulus();
        let (p, vars) = point.split_at(self.z0.len());
        let t = self.t(0, p, vars);
        if t.is_zero() {
            return t;
        }
        eq_eval(m, &self.z0, p).expect("arity") * t
    }

    fn describe(&self) -> String {
        "unrolled-circuit".into()
    }
}

/// Number of summand evaluations an honest brute-force sum-check prover
/// makes over `bounds`: `sum_k (b_k + 1) 2^{m - k}`. Each one costs at
/// least the field addition that accumulates it.
pub fn monolithic_evaluations(bounds: &[usize]) -> f64 {
    let m = bounds.len() as i32;
    bounds
        .iter()
        .enumerate()
        .map(|(k, &b)| (b as f64 + 1.0) * 2f64.powi(m - k as i32 - 1))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{layer_mle, product_tree, random_circuit, Gate};
    use crate::sumcheck::brute_force_sum;

    fn single_mul(m: PrimeModulus) -> LayeredCircuit {
        LayeredCircuit::new(m, 2, vec![vec![Gate::mul(0, 1)]]).unwrap()
    }

    #[test]
    fn layer_oracle_sums_to_layer_mle() {
        let m = PrimeModulus::new(1_000_003).unwrap();
        let mut rng = RandomSource::new(31);
        for seed in 0..5 {
            let c = random_circuit(m, 2, 4, seed);
            let input = DataVector::new(rng.field_elements(m, 4)).unwrap();
            let t = evaluate(&c, &input).unwrap();
            for i in 0..c.depth() {
                for _ in 0..10 {
                    let z = rng.field_elements(m, c.log_width(i));
                    let claim = LayerClaim {
                        layer: i,
                        value: layer_mle(&t, i, &z).unwrap(),
                        point: z,
                    };
                    let o = make_layer_oracle(&c, &t, &claim).unwrap();
                    assert_eq!(brute_force_sum(&o).unwrap(), claim.value);
                }
            }
        }
    }

    #[test]
    fn single_gate_layer_has_no_p_block() {
        let m = PrimeModulus::mersenne61();
        let c = single_mul(m);
        let t = evaluate(&c, &DataVector::from_u64(m, &[3, 4]).unwrap()).unwrap();
        let claim = LayerClaim {
            layer: 0,
            point: vec![],
            value: m.elem(12),
        };
        let o = make_layer_oracle(&c, &t, &claim).unwrap();
        assert_eq!(o.num_vars(), 2);
        assert_eq!(brute_force_sum(&o).unwrap(), m.elem(12));
        let bad = LayerClaim {
            layer: 1,
            point: vec![],
            value: m.zero(),
        };
        assert!(make_layer_oracle(&c, &t, &bad).is_err());
    }

    #[test]
    fn output_claim_examples() {
        let m = PrimeModulus::mersenne61();
        let mut rng = RandomSource::new(1);
        let c = single_mul(m);
        let cl = output_claim(&c, &[m.elem(12)], &mut rng).unwrap();
        assert_eq!((cl.point.len(), cl.value), (0, m.elem(12)));
        assert!(output_claim(&c, &[m.one(), m.one()], &mut rng).is_err());

        let two = LayeredCircuit::new(m, 2, vec![vec![Gate::add(0, 1), Gate::mul(0, 1)]]).unwrap();
        let cl = output_claim(&two, &[m.elem(1), m.elem(2)], &mut rng).unwrap();
        assert_eq!(cl.value, m.one() + cl.point[0]);
    }

    #[test]
    fn reduction_example() {
        let m = PrimeModulus::mersenne61();
        let table = MultilinearTable::new(m, vec![m.elem(1), m.elem(2)]).unwrap();
        let (z1, z2) = (vec![m.elem(5)], vec![m.elem(8)]);
        let f = restrict(&table, &line_through(&z1, &z2).unwrap());
        assert_eq!(f.coeffs(), &[m.elem(6), m.elem(3)]);
        let line = line_through(&z1, &z2).unwrap();
        assert_eq!(line.at(m.elem(2)), vec![m.elem(11)]);
        assert_eq!(f.evaluate(m.elem(2)), m.elem(12));

        let mut rng = RandomSource::new(2);
        let (next, r) = reduce_two_claims(1, &z1, &z2, m.elem(6), m.elem(9), &f, &mut rng).unwrap();
        assert_eq!(next.point, line.at(r));
        assert_eq!(next.value, table.evaluate(&next.point).unwrap());
        assert_eq!(
            reduce_two_claims(1, &z1, &z2, m.elem(7), m.elem(9), &f, &mut rng),
            Err(GkrRejection::EndpointMismatch { layer: 0 })
        );
        let high = f.add(&UnivariatePoly::from_roots(m, &[m.zero(), m.one()]));
        assert!(matches!(
            reduce_two_claims(1, &z1, &z2, m.elem(6), m.elem(9), &high, &mut rng),
            Err(GkrRejection::DegreeExceeded {
                degree: 2,
                bound: 1,
                ..
            })
        ));
    }

    #[test]
    fn single_gate_end_to_end() {
        let m = PrimeModulus::mersenne61();
        let c = single_mul(m);
        let input = DataVector::from_u64(m, &[3, 4]).unwrap();
        let run = gkr_prove_verify(&c, &input, &[m.elem(12)], 9, GkrStrategy::Honest).unwrap();
        assert!(run.accepted());
        assert_eq!(run.rounds(), 2);
        let run = gkr_prove_verify(&c, &input, &[m.elem(13)], 9, GkrStrategy::Honest).unwrap();
        assert!(!run.accepted());
        let run =
            gkr_prove_verify(&c, &input, &[m.elem(13)], 9, GkrStrategy::CorruptOutput).unwrap();
        assert!(!run.accepted());
    }

    #[test]
    fn honest_reductions_are_exact() {
        let m = PrimeModulus::mersenne61();
        let c = random_circuit(m, 3, 6, 17);
        let mut rng = RandomSource::new(3);
        let input = DataVector::new(rng.field_elements(m, 6)).unwrap();
        let t = evaluate(&c, &input).unwrap();
        let run = gkr_prove_verify(&c, &input, &t.outputs(), 4, GkrStrategy::Honest).unwrap();
        assert!(run.accepted());
        for red in &run.reductions {
            let n = &red.next;
            assert_eq!(layer_mle(&t, n.layer, &n.point).unwrap(), n.value);
            assert_eq!(
                run.layers[red.layer].rounds,
                c.log_width(red.layer) + 2 * c.log_width(red.layer + 1)
            );
        }
    }

    #[test]
    fn closed_form_backend_agrees() {
        use std::sync::Arc;
        let m = PrimeModulus::mersenne61();
        let c = product_tree(m, 2, 8);
        let input = DataVector::from_u64(m, &[1, 2, 3, 4, 5, 6, 7, 8]).unwrap();
        let out = evaluate(&c, &input).unwrap().outputs();
        let cf = WiringBackend::ClosedForm(Arc::new(crate::circuit::ProductTreeWiring));
        let a = gkr_prove_verify_with(&cf, &c, &input, &out, 5, GkrStrategy::Honest).unwrap();
        let b = gkr_prove_verify(&c, &input, &out, 5, GkrStrategy::Honest).unwrap();
        assert!(a.accepted() && b.accepted());
        assert_eq!(a.transcript.records, b.transcript.records);
    }

    #[test]
    fn unrolled_oracle_sums_to_output_mle() {
        let m = PrimeModulus::new(1_000_003).unwrap();
        let c = product_tree(m, 2, 4);
        assert_eq!(UnrolledCircuitOracle::variables(&c), 10);
        let input = DataVector::from_u64(m, &[2, 3, 5, 7]).unwrap();
        let t = evaluate(&c, &input).unwrap();
        let o = UnrolledCircuitOracle::new(&c, &input, vec![]);
        assert_eq!(o.num_vars(), 10);
        assert_eq!(brute_force_sum(&o).unwrap(), t.outputs()[0]);

        let c = random_circuit(m, 2, 3, 8);
        let mut rng = RandomSource::new(6);
        let input = DataVector::new(rng.field_elements(m, 3)).unwrap();
        let t = evaluate(&c, &input).unwrap();
        let z0 = rng.field_elements(m, c.log_width(0));
        let o = UnrolledCircuitOracle::new(&c, &input, z0.clone());
        assert_eq!(brute_force_sum(&o).unwrap(), layer_mle(&t, 0, &z0).unwrap());
    }

    #[test]
    fn evaluation_count_formula() {
        assert_eq!(
            monolithic_evaluations(&[1, 1, 1]),
            2.0 * 4.0 + 2.0 * 2.0 + 2.0
        );
    }
}
