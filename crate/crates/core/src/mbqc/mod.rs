//! Measurement patterns for blind evaluation: pattern description, flow
//! dependency sets, angle arithmetic, Alice's client bookkeeping, Bob's
//! graph-state server, and plain evaluators used as oracles.
//!
//! Column 0 holds Bob's input, measured at angle 0 with no mask. The
//! last column's corrected outcomes form the output. A pattern computes the
//! Z measurement of Π_j (⊗ H·Rz(−φ_{·,j}))·V_j on H^{⊗n}|ψ⟩, V_j being the
//! vertical CZ edges of column j.

mod blind;
mod evaluate;
mod pattern;

pub use blind::{accumulate_dependencies, compute_delta, compute_phi_prime, BlindClient, BlindServer, OutcomeBoard, SiteAngles};
pub use evaluate::{blind_law, circuit_law, reference_conditional_laws, reference_law, reference_sample, Law};
pub use pattern::{flow_dependencies, library, BrickworkPattern, Site, PATTERN_FORMAT, PATTERN_VERSION};

use crate::qsim::QsimError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MbqcError {
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("site {0:?} has not been measured")]
    Unmeasured(Site),
    #[error("input has {got} qubits, pattern needs {expected}")]
    InputWidth { expected: usize, got: usize },
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

#[cfg(test)]
mod tests;
