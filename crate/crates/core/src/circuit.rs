//! Layered fan-in-2 arithmetic circuits.
//!
//! Layer 0 holds the outputs and the inputs sit below layer `d - 1`, so the
//! input vector is layer `d` of an [`EvaluationTrace`]. Every layer is
//! zero-padded to a power of two; the phantom gates have no wiring.

use std::fmt::{self, Write as _};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldElement, PrimeModulus, RandomSource};
use crate::fingerprint::DataVector;
use crate::poly::{eq_at_index, MultilinearTable, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("layer {layer} gate {gate}: wire {index} out of range for width {width}")]
    BadWire {
        layer: usize,
        gate: usize,
        index: usize,
        width: usize,
    },
    #[error("layer {0} is empty")]
    EmptyLayer(usize),
    #[error("malformed circuit document at line {line}, column {column}: {message}")]
    MalformedDocument {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("input has {got} entries, circuit expects {expected}")]
    InputWidthMismatch { expected: usize, got: usize },
    #[error("layer {0} out of range")]
    LayerOutOfRange(usize),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("modulus mismatch")]
    ModulusMismatch,
}

impl From<PolyError> for CircuitError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::LengthMismatch { expected, got } => {
                CircuitError::ArityMismatch { expected, got }
            }
            _ => CircuitError::ModulusMismatch,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateOp {
    Add,
    Mul,
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateOp::Add => "add",
            GateOp::Mul => "mul",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gate {
    pub op: GateOp,
    pub left: usize,
    pub right: usize,
}

impl Gate {
    pub fn add(left: usize, right: usize) -> Self {
        Gate {
            op: GateOp::Add,
            left,
            right,
        }
    }

    pub fn mul(left: usize, right: usize) -> Self {
        Gate {
            op: GateOp::Mul,
            left,
            right,
        }
    }
}

/// The on-disk form of a circuit, layers listed top-down.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitDocument {
    pub modulus: u64,
    pub input_width: usize,
    pub layers: Vec<Vec<Gate>>,
}

/// A validated circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredCircuit {
    modulus: PrimeModulus,
    input_width: usize,
    layers: Vec<Vec<Gate>>,
}

/// `ceil(log2(width))`, with `log_width(1) == 0`.
pub fn log_width(width: usize) -> usize {
    width.max(1).next_power_of_two().trailing_zeros() as usize
}

impl LayeredCircuit {
    pub fn new(
        modulus: PrimeModulus,
        input_width: usize,
        layers: Vec<Vec<Gate>>,
    ) -> Result<Self, CircuitError> {
        if layers.is_empty() {
            return Err(CircuitError::EmptyLayer(0));
        }
        if input_width == 0 {
            return Err(CircuitError::EmptyLayer(layers.len()));
        }
        for (i, layer) in layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(CircuitError::EmptyLayer(i));
            }
            let below = layers.get(i + 1).map_or(input_width, Vec::len);
            for (g, gate) in layer.iter().enumerate() {
                for index in [gate.left, gate.right] {
                    if index >= below {
                        return Err(CircuitError::BadWire {
                            layer: i,
                            gate: g,
                            index,
                            width: below,
                        });
                    }
                }
            }
        }
        Ok(LayeredCircuit {
            modulus,
            input_width,
            layers,
        })
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    /// Number of gate layers `d`.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn layer(&self, i: usize) -> &[Gate] {
        &self.layers[i]
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    /// `S_i`; layer `d` is the input.
    pub fn width(&self, i: usize) -> usize {
        if i == self.depth() {
            self.input_width
        } else {
            self.layers[i].len()
        }
    }

    /// `s_i = ceil(log2 S_i)`.
    pub fn log_width(&self, i: usize) -> usize {
        log_width(self.width(i))
    }

    /// Total gate count, inputs excluded.
    pub fn size(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn to_document(&self) -> CircuitDocument {
        CircuitDocument {
            modulus: self.modulus.value(),
            input_width: self.input_width,
            layers: self.layers.clone(),
        }
    }

    pub fn from_document(doc: &CircuitDocument) -> Result<Self, CircuitError> {
        let m = PrimeModulus::new(doc.modulus).map_err(|e| CircuitError::MalformedDocument {
            line: 0,
            column: 0,
            message: format!("modulus: {e}"),
        })?;
        Self::new(m, doc.input_width, doc.layers.clone())
    }
}

pub fn parse_circuit(text: &str) -> Result<LayeredCircuit, CircuitError> {
    let doc: CircuitDocument =
        serde_json::from_str(text).map_err(|e| CircuitError::MalformedDocument {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    LayeredCircuit::from_document(&doc)
}

/// Canonical text form: one layer per line. `parse_circuit` inverts it.
pub fn serialize(c: &LayeredCircuit) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"modulus\": {},", c.modulus.value());
    let _ = writeln!(out, "  \"input_width\": {},", c.input_width);
    out.push_str("  \"layers\": [\n");
    for (i, layer) in c.layers.iter().enumerate() {
        out.push_str("    [");
        for (g, gate) in layer.iter().enumerate() {
            if g > 0 {
                out.push_str(", ");
            }
            let _ = write!(
                out,
                "{{\"op\": \"{}\", \"left\": {}, \"right\": {}}}",
                gate.op, gate.left, gate.right
            );
        }
        out.push(']');
        if i + 1 < c.layers.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]\n}\n");
    out
}

/// Gate values for every layer, each zero-padded to `2^{s_i}` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationTrace {
    layers: Vec<MultilinearTable>,
    widths: Vec<usize>,
}

impl EvaluationTrace {
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn table(&self, i: usize) -> &MultilinearTable {
        &self.layers[i]
    }

    /// Padded values of layer `i`.
    pub fn values(&self, i: usize) -> &[FieldElement] {
        self.layers[i].values()
    }

    /// The real (unpadded) outputs.
    pub fn outputs(&self) -> Vec<FieldElement> {
        self.layers[0].values()[..self.widths[0]].to_vec()
    }
}

pub fn evaluate(c: &LayeredCircuit, input: &DataVector) -> Result<EvaluationTrace, CircuitError> {
    if input.len() != c.input_width {
        return Err(CircuitError::InputWidthMismatch {
            expected: c.input_width,
            got: input.len(),
        });
    }
    if input.modulus() != c.modulus {
        return Err(CircuitError::ModulusMismatch);
    }
    let m = c.modulus;
    let d = c.depth();
    let mut tables = vec![MultilinearTable::padded(m, input.entries().to_vec())];
    for i in (0..d).rev() {
        let below = tables.last().expect("nonempty").values();
        let vals: Vec<FieldElement> = c.layers[i]
            .iter()
            .map(|g| match g.op {
                GateOp::Add => below[g.left] + below[g.right],
                GateOp::Mul => below[g.left] * below[g.right],
            })
            .collect();
        tables.push(MultilinearTable::padded(m, vals));
    }
    tables.reverse();
    let widths = (0..=d).map(|i| c.width(i)).collect();
    Ok(EvaluationTrace {
        layers: tables,
        widths,
    })
}

/// `V~_i(z)`.
pub fn layer_mle(
    trace: &EvaluationTrace,
    i: usize,
    z: &[FieldElement],
) -> Result<FieldElement, CircuitError> {
    let t = trace
        .layers
        .get(i)
        .ok_or(CircuitError::LayerOutOfRange(i))?;
    Ok(t.evaluate(z)?)
}

/// Argument `(z, w1, w2)` of `add~_i` / `mult~_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WiringPoint {
    pub z: Vec<FieldElement>,
    pub w1: Vec<FieldElement>,
    pub w2: Vec<FieldElement>,
}

/// A per-family closed form for the wiring predicates.
pub trait ClosedFormWiring: Send + Sync {
    fn evaluate(&self, layer: usize, kind: GateOp, at: &WiringPoint) -> FieldElement;
}

/// How `wiring_mle` evaluates the predicates.
#[derive(Clone, Default)]
pub enum WiringBackend {
    /// Sum over the gates of the layer: works for any circuit.
    #[default]
    DirectSum,
    ClosedForm(Arc<dyn ClosedFormWiring>),
}

impl fmt::Debug for WiringBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WiringBackend::DirectSum => f.write_str("DirectSum"),
            WiringBackend::ClosedForm(_) => f.write_str("ClosedForm"),
        }
    }
}

/// `sum_{gates g of kind} eq(z, g) eq(w1, left(g)) eq(w2, right(g))`.
pub fn wiring_mle(
    c: &LayeredCircuit,
    i: usize,
    kind: GateOp,
    at: &WiringPoint,
) -> Result<FieldElement, CircuitError> {
    wiring_mle_with(&WiringBackend::DirectSum, c, i, kind, at)
}

pub fn wiring_mle_with(
    backend: &WiringBackend,
    c: &LayeredCircuit,
    i: usize,
    kind: GateOp,
    at: &WiringPoint,
) -> Result<FieldElement, CircuitError> {
    if i >= c.depth() {
        return Err(CircuitError::LayerOutOfRange(i));
    }
    let (s_i, s_next) = (c.log_width(i), c.log_width(i + 1));
    for (got, expected) in [
        (at.z.len(), s_i),
        (at.w1.len(), s_next),
        (at.w2.len(), s_next),
    ] {
        if got != expected {
            return Err(CircuitError::ArityMismatch { expected, got });
        }
    }
    Ok(match backend {
        WiringBackend::DirectSum => direct_sum(c, i, kind, at),
        WiringBackend::ClosedForm(f) => f.evaluate(i, kind, at),
    })
}

fn direct_sum(c: &LayeredCircuit, i: usize, kind: GateOp, at: &WiringPoint) -> FieldElement {
    let m = c.modulus;
    let mut acc = m.zero();
    for (g, gate) in c.layers[i].iter().enumerate() {
        if gate.op != kind {
            continue;
        }
        let a = eq_at_index(m, &at.z, g);
        if a.is_zero() {
            continue;
        }
        let b = eq_at_index(m, &at.w1, gate.left);
        if b.is_zero() {
            continue;
        }
        acc += a * b * eq_at_index(m, &at.w2, gate.right);
    }
    acc
}

/// `(add~_i, mult~_i)` at `(z, w1, w2)` in one pass over the gates, slices
/// unchecked. Zero factors short-circuit, which makes hypercube queries cheap.
pub(crate) fn wiring_pair(
    c: &LayeredCircuit,
    i: usize,
    z: &[FieldElement],
    w1: &[FieldElement],
    w2: &[FieldElement],
) -> (FieldElement, FieldElement) {
    let m = c.modulus;
    let (mut add, mut mul) = (m.zero(), m.zero());
    for (g, gate) in c.layers[i].iter().enumerate() {
        let a = eq_at_index(m, z, g);
        if a.is_zero() {
            continue;
        }
        let b = eq_at_index(m, w1, gate.left);
        if b.is_zero() {
            continue;
        }
        let e = eq_at_index(m, w2, gate.right);
        if e.is_zero() {
            continue;
        }
        let term = a * b * e;
        match gate.op {
            GateOp::Add => add += term,
            GateOp::Mul => mul += term,
        }
    }
    (add, mul)
}

/// Binary product tree: `width` inputs, layer `i` has `width >> (d - i)` Mul
/// gates and gate `g` multiplies `2g` and `2g + 1` below it. `width` must be
/// a power of two with `width >= 2^depth`.
pub fn product_tree(m: PrimeModulus, depth: usize, width: usize) -> LayeredCircuit {
    assert!(depth >= 1 && width.is_power_of_two() && width >> depth >= 1);
    let layers = (0..depth)
        .map(|i| {
            (0..width >> (depth - i))
                .map(|g| Gate::mul(2 * g, 2 * g + 1))
                .collect()
        })
        .collect();
    LayeredCircuit::new(m, width, layers).expect("product tree is well formed")
}

/// Closed-form wiring for [`product_tree`]: `add~ = 0` and
/// `mult~(z, w1, w2) = (1 - w1_last) w2_last prod_j eq3(z_j, w1_j, w2_j)`,
/// in `O(s_i)` operations.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProductTreeWiring;

impl ClosedFormWiring for ProductTreeWiring {
    fn evaluate(&self, _layer: usize, kind: GateOp, at: &WiringPoint) -> FieldElement {
        let m = at.w1[0].modulus();
        if kind == GateOp::Add {
            return m.zero();
        }
        let one = m.one();
        let s = at.z.len();
        let mut acc = (one - at.w1[s]) * at.w2[s];
        for j in 0..s {
            let (a, b, c) = (at.z[j], at.w1[j], at.w2[j]);
            acc *= a * b * c + (one - a) * (one - b) * (one - c);
        }
        acc
    }
}

/// Random circuit: each layer width drawn from `1..=max_width`, random ops
/// and wires. The inputs are `max_width` wide.
pub fn random_circuit(
    m: PrimeModulus,
    depth: usize,
    max_width: usize,
    seed: u64,
) -> LayeredCircuit {
    assert!(depth >= 1 && max_width >= 1);
    let mut rng = RandomSource::with_stream(seed, 11);
    let mut widths: Vec<usize> = (0..depth)
        .map(|_| 1 + rng.below(max_width as u64) as usize)
        .collect();
    widths.push(max_width);
    let layers = (0..depth)
        .map(|i| {
            let below = widths[i + 1] as u64;
            (0..widths[i])
                .map(|_| Gate {
                    op: if rng.coin() { GateOp::Add } else { GateOp::Mul },
                    left: rng.below(below) as usize,
                    right: rng.below(below) as usize,
                })
                .collect()
        })
        .collect();
    LayeredCircuit::new(m, max_width, layers).expect("random circuit is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::index_bits;

    fn big() -> PrimeModulus {
        PrimeModulus::mersenne61()
    }

    fn single_mul(m: PrimeModulus) -> LayeredCircuit {
        LayeredCircuit::new(m, 2, vec![vec![Gate::mul(0, 1)]]).unwrap()
    }

    #[test]
    fn parse_minimal_and_bad_wire() {
        let c = parse_circuit(
            r#"{"modulus": 101, "input_width": 2, "layers": [[{"op": "mul", "left": 0, "right": 1}]]}"#,
        )
        .unwrap();
        assert_eq!((c.depth(), c.width(0), c.input_width()), (1, 1, 2));
        let bad = parse_circuit(
            r#"{"modulus": 101, "input_width": 2, "layers": [[{"op": "mul", "left": 0, "right": 2}]]}"#,
        );
        assert!(matches!(
            bad,
            Err(CircuitError::BadWire {
                index: 2,
                width: 2,
                ..
            })
        ));
        let empty = parse_circuit(r#"{"modulus": 101, "input_width": 2, "layers": [[]]}"#);
        assert_eq!(empty, Err(CircuitError::EmptyLayer(0)));
        let junk = parse_circuit("{\n  \"modulus\": 101,\n  \"layers\": oops\n}");
        assert!(matches!(
            junk,
            Err(CircuitError::MalformedDocument { line: 3, .. })
        ));
    }

    #[test]
    fn serialize_round_trip() {
        let c = random_circuit(PrimeModulus::new(101).unwrap(), 3, 5, 2);
        let text = serialize(&c);
        assert_eq!(parse_circuit(&text).unwrap(), c);
        assert_eq!(serialize(&parse_circuit(&text).unwrap()), text);
    }

    #[test]
    fn evaluation_examples() {
        let m = big();
        let t = evaluate(&single_mul(m), &DataVector::from_u64(m, &[3, 4]).unwrap()).unwrap();
        assert_eq!(t.outputs(), vec![m.elem(12)]);

        let add = LayeredCircuit::new(m, 2, vec![vec![Gate::add(0, 1)]]).unwrap();
        let t = evaluate(&add, &DataVector::from_u64(m, &[77, 0]).unwrap()).unwrap();
        assert_eq!(t.outputs(), vec![m.elem(77)]);

        let c = LayeredCircuit::new(
            m,
            4,
            vec![
                vec![Gate::mul(0, 1)],
                vec![Gate::add(0, 1), Gate::add(2, 3)],
            ],
        )
        .unwrap();
        let t = evaluate(&c, &DataVector::from_u64(m, &[1, 2, 3, 4]).unwrap()).unwrap();
        assert_eq!(t.outputs(), vec![m.elem(21)]);

        assert!(matches!(
            evaluate(&c, &DataVector::from_u64(m, &[1, 2]).unwrap()),
            Err(CircuitError::InputWidthMismatch {
                expected: 4,
                got: 2
            })
        ));
    }

    #[test]
    fn layer_mle_examples() {
        let m = big();
        // three gates, so layer 0 is padded to four entries
        let c = LayeredCircuit::new(
            m,
            2,
            vec![vec![Gate::add(0, 1), Gate::mul(0, 1), Gate::add(0, 0)]],
        )
        .unwrap();
        let t = evaluate(&c, &DataVector::from_u64(m, &[1, 2]).unwrap()).unwrap();
        assert_eq!(layer_mle(&t, 0, &index_bits(m, 1, 2)).unwrap(), m.elem(2));
        assert_eq!(layer_mle(&t, 0, &index_bits(m, 3, 2)).unwrap(), m.zero());
        assert_eq!(layer_mle(&t, 1, &[m.elem(5)]).unwrap(), m.elem(6));
        assert!(layer_mle(&t, 1, &[]).is_err());
    }

    #[test]
    fn wiring_examples() {
        let m = big();
        let c = single_mul(m);
        let at = WiringPoint {
            z: vec![],
            w1: vec![m.zero()],
            w2: vec![m.one()],
        };
        assert_eq!(wiring_mle(&c, 0, GateOp::Mul, &at).unwrap(), m.one());
        assert_eq!(wiring_mle(&c, 0, GateOp::Add, &at).unwrap(), m.zero());

        let p = PrimeModulus::new(17).unwrap();
        let c = single_mul(p);
        let at = WiringPoint {
            z: vec![],
            w1: vec![p.elem(2)],
            w2: vec![p.elem(3)],
        };
        assert_eq!(wiring_mle(&c, 0, GateOp::Mul, &at).unwrap().value(), 14);

        let short = WiringPoint {
            z: vec![],
            w1: vec![],
            w2: vec![p.elem(3)],
        };
        assert!(matches!(
            wiring_mle(&c, 0, GateOp::Mul, &short),
            Err(CircuitError::ArityMismatch {
                expected: 1,
                got: 0
            })
        ));
    }

    #[test]
    fn product_tree_closed_form_matches_direct_sum() {
        let m = PrimeModulus::new(1_000_003).unwrap();
        let c = product_tree(m, 3, 16);
        assert_eq!((c.width(0), c.width(2), c.width(3)), (2, 8, 16));
        let mut rng = RandomSource::new(4);
        let backend = WiringBackend::ClosedForm(Arc::new(ProductTreeWiring));
        for i in 0..3 {
            for _ in 0..20 {
                let at = WiringPoint {
                    z: rng.field_elements(m, c.log_width(i)),
                    w1: rng.field_elements(m, c.log_width(i + 1)),
                    w2: rng.field_elements(m, c.log_width(i + 1)),
                };
                for kind in [GateOp::Add, GateOp::Mul] {
                    assert_eq!(
                        wiring_mle_with(&backend, &c, i, kind, &at).unwrap(),
                        wiring_mle(&c, i, kind, &at).unwrap()
                    );
                }
            }
        }
    }
}
