//! Small quantum simulator: a dense statevector for circuit qubits and a
//! sparse two-term state for wide registers holding a pair of basis strings.
//!
//! Qubit `k` is bit `k` of an amplitude index (little-endian) everywhere.

mod angle;
mod bits;
mod state;
mod two_term;

pub use angle::Angle8;
pub use bits::BitString;
pub use state::{Basis, Branch, Gate, StateVector, DEFAULT_MAX_QUBITS};
pub use two_term::{two_term_to_dense, SparseState, TwoTermState, XLaw};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QsimError {
    #[error("{requested} qubits exceeds the limit of {limit}")]
    TooManyQubits { requested: usize, limit: usize },
    #[error("qubit {index} out of range for {num_qubits} qubits")]
    IndexOutOfRange { index: usize, num_qubits: usize },
    #[error("gate expects {expected} targets, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("qubit {0} given twice")]
    DuplicateTarget(usize),
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),
    #[error("width mismatch: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("relative phase is not of unit modulus")]
    NotUnitPhase,
    #[error("degenerate state: every branch has vanishing norm")]
    Degenerate,
}
