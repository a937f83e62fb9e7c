//! Interactive proofs over prime fields: fingerprinting, sum-check, GKR for
//! layered arithmetic circuits, #SAT by arithmetization, and the quadratic
//! non-residuosity protocol.

pub mod circuit;
pub mod cli;
pub mod countsat;
pub mod field;
pub mod fingerprint;
pub mod gkr;
pub mod poly;
pub mod replay;
pub mod residue;
pub mod sumcheck;
pub mod transcript;

pub use field::{FieldElement, PrimeModulus, RandomSource};
