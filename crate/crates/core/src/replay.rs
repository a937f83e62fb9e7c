//! Name resolution for oracles and strategies, and transcript replay.
//!
//! Replay runs two checks. The verifier alone is re-run against the
//! recorded prover messages with the recorded seed: every challenge it
//! draws must match the file, and so must its verdict. Then the whole
//! session is regenerated from the header and compared byte for byte, which
//! also covers prover-side header fields the verifier never reads.

use std::sync::Arc;

use thiserror::Error;

use crate::circuit::{LayeredCircuit, WiringBackend};
use crate::countsat::{arithmetize, parse_formula};
use crate::field::{FieldElement, PrimeModulus};
use crate::fingerprint::DataVector;
use crate::gkr::{gkr_prove_verify, GkrRejection, GkrStrategy, GkrVerifier};
use crate::poly::UnivariatePoly;
use crate::sumcheck::{
    builtin_oracle, run_sumcheck, FinalMode, FinalOutcome, ProverStrategy, Rejection, RoundMessage,
    RoundOutcome, SummandOracle, VerifierState,
};
use crate::transcript::{
    parse_hex_all, parse_hex_one, Header, ProverMsg, Record, Transcript, TranscriptError,
    VerifierMsg,
};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("unknown oracle {0:?}")]
    UnknownOracle(String),
    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),
}

/// Built-in oracle families plus `formula:<text>`.
pub fn resolve_oracle(spec: &str, m: PrimeModulus) -> Result<Arc<dyn SummandOracle>, SpecError> {
    if let Some(text) = spec.strip_prefix("formula:") {
        let f = parse_formula(text).map_err(|_| SpecError::UnknownOracle(spec.into()))?;
        return Ok(Arc::new(arithmetize(&f, m)));
    }
    builtin_oracle(spec, m)
        .map(|o| Arc::new(o) as Arc<dyn SummandOracle>)
        .ok_or_else(|| SpecError::UnknownOracle(spec.into()))
}

/// `honest`, `wrong-claim[:N]`, `deviate-at-round:I`, `wrong-oracle:SPEC`.
pub fn parse_sumcheck_strategy(s: &str, m: PrimeModulus) -> Result<ProverStrategy, SpecError> {
    let bad = || SpecError::UnknownStrategy(s.into());
    let (head, arg) = match s.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (s, None),
    };
    Ok(match (head, arg) {
        ("honest", None) => ProverStrategy::Honest,
        ("wrong-claim", None) => ProverStrategy::WrongClaim(m.one()),
        ("wrong-claim", Some(a)) => {
            ProverStrategy::WrongClaim(m.parse_decimal(a).map_err(|_| bad())?)
        }
        ("deviate-at-round", Some(a)) => {
            let i: usize = a.parse().map_err(|_| bad())?;
            if i == 0 {
                return Err(bad());
            }
            ProverStrategy::DeviateAtRound(i)
        }
        ("wrong-oracle", Some(a)) => ProverStrategy::WrongOracle(resolve_oracle(a, m)?),
        _ => return Err(bad()),
    })
}

/// `honest`, `corrupt-output`, `lie-in-value:L`, `fabricate-line:L`,
/// `sumcheck:L:STRATEGY`.
pub fn parse_gkr_strategy(s: &str, m: PrimeModulus) -> Result<GkrStrategy, SpecError> {
    let bad = || SpecError::UnknownStrategy(s.into());
    let layer = |a: &str| a.parse::<usize>().map_err(|_| bad());
    let mut parts = s.splitn(3, ':');
    let head = parts.next().unwrap_or_default();
    let a = parts.next();
    let b = parts.next();
    Ok(match (head, a, b) {
        ("honest", None, None) => GkrStrategy::Honest,
        ("corrupt-output", None, None) => GkrStrategy::CorruptOutput,
        ("lie-in-value", Some(l), None) => GkrStrategy::LieInValue { layer: layer(l)? },
        ("fabricate-line", Some(l), None) => GkrStrategy::FabricateLine { layer: layer(l)? },
        ("sumcheck", Some(l), Some(inner)) => {
            let strategy = parse_sumcheck_strategy(inner, m)?;
            if matches!(strategy, ProverStrategy::WrongOracle(_)) {
                return Err(bad());
            }
            GkrStrategy::Sumcheck {
                layer: layer(l)?,
                strategy,
            }
        }
        _ => return Err(bad()),
    })
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("malformed transcript: {0}")]
    Malformed(#[from] TranscriptError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplayVerdict {
    /// Both checks passed; carries the recorded verdict.
    Verified {
        verdict: String,
    },
    TamperDetected {
        reason: String,
    },
}

/// Replays a transcript file. Unparseable input is an error; anything that
/// parses but fails a check is [`ReplayVerdict::TamperDetected`].
pub fn replay(text: &str) -> Result<ReplayVerdict, ReplayError> {
    let t = Transcript::from_jsonl(text)?;
    let recorded = t
        .summary
        .as_ref()
        .expect("parsed transcripts have a summary")
        .verdict
        .clone();
    let tamper = |reason: String| Ok(ReplayVerdict::TamperDetected { reason });
    let verdict = match verify_only(&t) {
        Ok(v) => v,
        Err(reason) => return tamper(reason),
    };
    if verdict != recorded {
        return tamper(format!(
            "verifier reaches {verdict:?}, file records {recorded:?}"
        ));
    }
    let regenerated = match regenerate(&t) {
        Ok(r) => r,
        Err(reason) => return tamper(reason),
    };
    if regenerated != text {
        let line = regenerated
            .lines()
            .zip(text.lines())
            .position(|(a, b)| a != b)
            .unwrap_or_else(|| regenerated.lines().count().min(text.lines().count()))
            + 1;
        return tamper(format!("line {line} differs from the regenerated session"));
    }
    Ok(ReplayVerdict::Verified { verdict })
}

/// Re-runs the full session described by the header.
pub fn regenerate(t: &Transcript) -> Result<String, String> {
    match &t.header {
        Header::Sumcheck {
            modulus,
            seed,
            strategy,
            oracle,
            claim,
            mode,
            ..
        } => {
            let m = PrimeModulus::new(*modulus).map_err(|e| e.to_string())?;
            let g = resolve_oracle(oracle, m).map_err(|e| e.to_string())?;
            let s = parse_sumcheck_strategy(strategy, m).map_err(|e| e.to_string())?;
            let claim = parse_hex_one(m, claim).map_err(|e| e.to_string())?;
            let mode = parse_mode(mode)?;
            let run = run_sumcheck(g.as_ref(), claim, *seed, s, mode).map_err(|e| e.to_string())?;
            Ok(run.transcript.to_jsonl())
        }
        Header::Gkr {
            modulus,
            seed,
            strategy,
            circuit,
            input,
            claimed_outputs,
        } => {
            let (c, input, claimed) = gkr_parts(*modulus, circuit, input, claimed_outputs)?;
            let s = parse_gkr_strategy(strategy, c.modulus()).map_err(|e| e.to_string())?;
            let run =
                gkr_prove_verify(&c, &input, &claimed, *seed, s).map_err(|e| e.to_string())?;
            Ok(run.transcript.to_jsonl())
        }
    }
}

fn parse_mode(s: &str) -> Result<FinalMode, String> {
    match s {
        "direct" => Ok(FinalMode::Direct),
        "deferred" => Ok(FinalMode::Deferred),
        _ => Err(format!("unknown final mode {s:?}")),
    }
}

fn gkr_parts(
    modulus: u64,
    doc: &crate::circuit::CircuitDocument,
    input: &[String],
    claimed: &[String],
) -> Result<(LayeredCircuit, DataVector, Vec<FieldElement>), String> {
    if doc.modulus != modulus {
        return Err("circuit modulus differs from header modulus".into());
    }
    let c = LayeredCircuit::from_document(doc).map_err(|e| e.to_string())?;
    let m = c.modulus();
    let input = parse_hex_all(m, input).map_err(|e| e.to_string())?;
    let input = DataVector::new(input).map_err(|e| e.to_string())?;
    let claimed = parse_hex_all(m, claimed).map_err(|e| e.to_string())?;
    Ok((c, input, claimed))
}

/// Walks the records in order, feeding prover messages to a fresh verifier.
struct Cursor<'a> {
    records: &'a [Record],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self) -> Option<&'a Record> {
        let r = self.records.get(self.pos);
        self.pos += 1;
        r
    }

    fn done(&self) -> bool {
        self.pos >= self.records.len()
    }
}

fn verify_only(t: &Transcript) -> Result<String, String> {
    match &t.header {
        Header::Sumcheck { .. } => verify_sumcheck(t),
        Header::Gkr { .. } => verify_gkr(t),
    }
}

fn verify_sumcheck(t: &Transcript) -> Result<String, String> {
    let Header::Sumcheck {
        modulus,
        num_vars,
        degree_bounds,
        seed,
        oracle,
        mode,
        ..
    } = &t.header
    else {
        unreachable!()
    };
    let m = PrimeModulus::new(*modulus).map_err(|e| e.to_string())?;
    let g = resolve_oracle(oracle, m).map_err(|e| e.to_string())?;
    if g.num_vars() != *num_vars || &g.degree_bounds() != degree_bounds {
        return Err("header shape does not match the oracle".into());
    }
    let mode = parse_mode(mode)?;
    let mut cur = Cursor {
        records: &t.records,
        pos: 0,
    };
    let opening = match cur.next() {
        Some(Record::Prover(ProverMsg::Claim { layer: None, value })) => {
            parse_hex_one(m, value).map_err(|e| e.to_string())?
        }
        _ => return Err("expected the opening claim".into()),
    };
    let mut rng = crate::field::RandomSource::new(*seed);
    let mut state =
        VerifierState::new(m, degree_bounds.clone(), opening, mode).map_err(|e| e.to_string())?;
    let rejected = replay_rounds(&mut cur, &mut state, &mut rng, None, m, degree_bounds.len())?;
    let verdict = match rejected {
        Some(_) => "reject",
        None => match state
            .final_check(Some(g.as_ref()))
            .map_err(|e| e.to_string())?
        {
            FinalOutcome::Accepted => "accept",
            FinalOutcome::Rejected(_) => "reject",
            FinalOutcome::DeferredClaim { .. } => "deferred",
        },
    };
    if !cur.done() {
        return Err("records continue after the verdict".into());
    }
    Ok(verdict.into())
}

/// Feeds `rounds` recorded round messages to `state`. Returns the rejection
/// if the verifier stops early.
fn replay_rounds(
    cur: &mut Cursor<'_>,
    state: &mut VerifierState,
    rng: &mut crate::field::RandomSource,
    layer: Option<usize>,
    m: PrimeModulus,
    rounds: usize,
) -> Result<Option<Rejection>, String> {
    for i in 1..=rounds {
        let coeffs = match cur.next() {
            Some(Record::Prover(ProverMsg::Round {
                layer: l,
                round,
                coeffs,
            })) if *l == layer && *round == i => {
                parse_hex_all(m, coeffs).map_err(|e| e.to_string())?
            }
            _ => return Err(format!("expected round {i} message")),
        };
        let msg = RoundMessage { round: i, coeffs };
        match state.check_round(&msg, rng).map_err(|e| e.to_string())? {
            RoundOutcome::Reject(r) => return Ok(Some(r)),
            RoundOutcome::Challenge(r) => match cur.next() {
                Some(Record::Verifier(VerifierMsg::Challenge {
                    layer: l,
                    round,
                    challenge,
                })) if *l == layer && *round == i && *challenge == r.to_hex() => {}
                _ => return Err(format!("round {i} challenge does not match the seed")),
            },
        }
    }
    Ok(None)
}

fn verify_gkr(t: &Transcript) -> Result<String, String> {
    let Header::Gkr {
        modulus,
        seed,
        circuit,
        input,
        claimed_outputs,
        ..
    } = &t.header
    else {
        unreachable!()
    };
    let (c, input, claimed) = gkr_parts(*modulus, circuit, input, claimed_outputs)?;
    let m = c.modulus();
    let mut v = GkrVerifier::new(
        &c,
        input.entries(),
        &claimed,
        WiringBackend::DirectSum,
        *seed,
    );
    let mut cur = Cursor {
        records: &t.records,
        pos: 0,
    };
    let mut claim = v.output_claim().map_err(|e| e.to_string())?;
    match cur.next() {
        Some(Record::Verifier(VerifierMsg::OutputPoint { point }))
            if parse_hex_all(m, point).ok().as_ref() == Some(&claim.point) => {}
        _ => return Err("output point does not match the seed".into()),
    }
    let verdict = 'layers: {
        for i in 0..c.depth() {
            let mut state = v.layer_state(&claim);
            let rounds = c.log_width(i) + 2 * c.log_width(i + 1);
            if replay_rounds(&mut cur, &mut state, v.rng(), Some(i), m, rounds)?.is_some() {
                break 'layers "reject";
            }
            let (point, value) = match state.final_check(None).map_err(|e| e.to_string())? {
                FinalOutcome::DeferredClaim { point, value } => (point, value),
                _ => return Err("deferred check expected".into()),
            };
            let (v1, v2) = match cur.next() {
                Some(Record::Prover(ProverMsg::FinalValues { layer, values }))
                    if *layer == i && values.len() == 2 =>
                {
                    let vs = parse_hex_all(m, values).map_err(|e| e.to_string())?;
                    (vs[0], vs[1])
                }
                _ => return Err(format!("expected layer {i} final values")),
            };
            if let Err(GkrRejection::FinalValueMismatch { .. }) =
                v.check_final_values(&claim, &point, value, v1, v2)
            {
                break 'layers "reject";
            }
            let f = match cur.next() {
                Some(Record::Prover(ProverMsg::Line { layer, coeffs })) if *layer == i => {
                    UnivariatePoly::new(parse_hex_all(m, coeffs).map_err(|e| e.to_string())?)
                }
                _ => return Err(format!("expected layer {i} line polynomial")),
            };
            match v.reduce(&claim, &point, v1, v2, &f) {
                Err(_) => break 'layers "reject",
                Ok((next, r)) => {
                    match cur.next() {
                        Some(Record::Verifier(VerifierMsg::LineChallenge { layer, challenge }))
                            if *layer == i && *challenge == r.to_hex() => {}
                        _ => {
                            return Err(format!("layer {i} line challenge does not match the seed"))
                        }
                    }
                    claim = next;
                }
            }
        }
        if v.check_input(&claim).is_ok() {
            "accept"
        } else {
            "reject"
        }
    };
    if !cur.done() {
        return Err("records continue after the verdict".into());
    }
    Ok(verdict.into())
}
