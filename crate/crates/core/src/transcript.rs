//! Replayable protocol transcripts as JSON lines.
//!
//! Line one is a [`Header`], then one [`Record`] per message, then a
//! [`Summary`]. Field elements are lowercase hex residues; the modulus is
//! declared once in the header. Serialization is canonical, so equal
//! transcripts are byte-identical.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::CircuitDocument;
use crate::field::{FieldElement, PrimeModulus};

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("empty transcript")]
    Empty,
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("transcript has no summary line")]
    MissingSummary,
    #[error("bad field element {0:?}")]
    BadElement(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Header {
    Sumcheck {
        modulus: u64,
        num_vars: usize,
        degree_bounds: Vec<usize>,
        seed: u64,
        strategy: String,
        oracle: String,
        claim: String,
        mode: String,
    },
    Gkr {
        modulus: u64,
        seed: u64,
        strategy: String,
        circuit: CircuitDocument,
        input: Vec<String>,
        claimed_outputs: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "dir", rename_all = "lowercase")]
pub enum Record {
    Prover(ProverMsg),
    Verifier(VerifierMsg),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum ProverMsg {
    /// The opening claim `H_0` of a sum-check.
    Claim {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        layer: Option<usize>,
        value: String,
    },
    Round {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        layer: Option<usize>,
        round: usize,
        coeffs: Vec<String>,
    },
    /// `V~_{i+1}(w1*)` and `V~_{i+1}(w2*)` at the end of a GKR layer.
    FinalValues { layer: usize, values: Vec<String> },
    /// The restriction of `V~_{i+1}` to the line through both points.
    Line { layer: usize, coeffs: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum VerifierMsg {
    Challenge {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        layer: Option<usize>,
        round: usize,
        challenge: String,
    },
    OutputPoint {
        point: Vec<String>,
    },
    LineChallenge {
        layer: usize,
        challenge: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub rounds: usize,
    pub field_elements: usize,
    pub bytes: usize,
    pub prover_ops: u64,
    pub verifier_ops: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub header: Header,
    pub records: Vec<Record>,
    pub summary: Option<Summary>,
}

impl Transcript {
    pub fn new(header: Header) -> Self {
        Transcript {
            header,
            records: Vec::new(),
            summary: None,
        }
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    /// Number of sum-check round polynomials recorded.
    pub fn round_messages(&self) -> usize {
        self.records
            .iter()
            .filter(|r| matches!(r, Record::Prover(ProverMsg::Round { .. })))
            .count()
    }

    /// Every field element that crossed the wire, in both directions.
    pub fn field_elements(&self) -> usize {
        self.records
            .iter()
            .map(|r| match r {
                Record::Prover(ProverMsg::Claim { .. }) => 1,
                Record::Prover(ProverMsg::Round { coeffs, .. }) => coeffs.len(),
                Record::Prover(ProverMsg::FinalValues { values, .. }) => values.len(),
                Record::Prover(ProverMsg::Line { coeffs, .. }) => coeffs.len(),
                Record::Verifier(VerifierMsg::Challenge { .. }) => 1,
                Record::Verifier(VerifierMsg::OutputPoint { point }) => point.len(),
                Record::Verifier(VerifierMsg::LineChallenge { .. }) => 1,
            })
            .sum()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        if let Some(s) = &self.summary {
            out.push_str(&serde_json::to_string(s).expect("summary serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, TranscriptError> {
        let lines: Vec<&str> = text.lines().collect();
        let (first, rest) = lines.split_first().ok_or(TranscriptError::Empty)?;
        let header: Header = serde_json::from_str(first)
            .map_err(|source| TranscriptError::Json { line: 1, source })?;
        let (last, body) = rest.split_last().ok_or(TranscriptError::MissingSummary)?;
        let records = body
            .iter()
            .enumerate()
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|source| TranscriptError::Json {
                    line: i + 2,
                    source,
                })
            })
            .collect::<Result<Vec<Record>, _>>()?;
        let summary: Summary =
            serde_json::from_str(last).map_err(|source| TranscriptError::Json {
                line: lines.len(),
                source,
            })?;
        Ok(Transcript {
            header,
            records,
            summary: Some(summary),
        })
    }
}

pub fn hex_all(v: &[FieldElement]) -> Vec<String> {
    v.iter().map(FieldElement::to_hex).collect()
}

pub fn parse_hex_all(m: PrimeModulus, v: &[String]) -> Result<Vec<FieldElement>, TranscriptError> {
    v.iter()
        .map(|s| {
            m.parse_hex(s)
                .map_err(|_| TranscriptError::BadElement(s.clone()))
        })
        .collect()
}

pub fn parse_hex_one(m: PrimeModulus, s: &str) -> Result<FieldElement, TranscriptError> {
    m.parse_hex(s)
        .map_err(|_| TranscriptError::BadElement(s.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_wire_shape() {
        let r = Record::Prover(ProverMsg::Round {
            layer: None,
            round: 2,
            coeffs: vec!["1".into(), "a".into()],
        });
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            r#"{"dir":"prover","step":"round","round":2,"coeffs":["1","a"]}"#
        );
        assert_eq!(serde_json::from_str::<Record>(&s).unwrap(), r);
        let v = Record::Verifier(VerifierMsg::Challenge {
            layer: Some(1),
            round: 3,
            challenge: "ff".into(),
        });
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(
            s,
            r#"{"dir":"verifier","step":"challenge","layer":1,"round":3,"challenge":"ff"}"#
        );
        assert_eq!(serde_json::from_str::<Record>(&s).unwrap(), v);
    }

    #[test]
    fn truncated_files_are_errors() {
        assert!(matches!(
            Transcript::from_jsonl(""),
            Err(TranscriptError::Empty)
        ));
        let header = r#"{"protocol":"sumcheck","modulus":17,"num_vars":0,"degree_bounds":[],"seed":1,"strategy":"honest","oracle":"demo","claim":"0","mode":"direct"}"#;
        assert!(matches!(
            Transcript::from_jsonl(header),
            Err(TranscriptError::MissingSummary)
        ));
    }
}
