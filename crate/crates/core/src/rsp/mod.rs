//! Remote state preparation from the two-to-one trapdoor function.
//!
//! Bob holds (|x⟩ + |x′⟩)/√2 for the two preimages of his image point y,
//! copies the hardcore bit d onto a fresh target with a CNOT, measures the
//! preimage register in the X basis (outcome w) and applies H·Rz(−π/2) to
//! the target. The target is then |+_θ⟩ with θ = 4θ1 + 2θ2 (units of π/4),
//! where θ2 = h(x)⊕h(x′) and θ1 = θ2·⟨w, x⊕x′⟩ ⊕ h(x)h(x′), which Alice
//! computes from the trapdoor.
//!
//! Eight states come from two runs: Bob undoes the correction on the
//! second qubit (H then S), applies CNOT from the first qubit onto it and
//! measures it at angle π/4, reporting the outcome s.

mod bob;
mod merge;

pub use bob::{
    quantum_w_law, shortcut_w_law, BobBackend, RspBobOutput, SiblingSource, rsp_bob_quantum, rsp_bob_quantum_with, rsp_bob_shortcut,
    rsp_bob,
};
pub use merge::{alice_merge, bob_merge};

use crate::channel::{parse, ChannelError, Endpoint, Writer};
use crate::lattice::{encode, hardcore, LatticeError, PublicKey, TrapdoorKeypair};
use crate::qsim::{Angle8, BitString, QsimError};

pub const MSG_KEY: &str = "rsp.key";
pub const MSG_MEAS: &str = "rsp.meas";
pub const MSG_MERGE: &str = "rsp.merge";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RspError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("no image point with two preimages after {0} draws")]
    ResampleLimit(u32),
    #[error("sibling preimage unavailable: exhaustive search infeasible and no trapdoor supplied")]
    NoSibling,
    #[error("measurement string has width {got}, expected {expected}")]
    Width { expected: usize, got: usize },
}

/// Alice's view of one four-state run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rsp4Output {
    pub theta1: bool,
    pub theta2: bool,
}

impl Rsp4Output {
    pub fn angle(&self) -> Angle8 {
        Angle8::new(4 * self.theta1 as i64 + 2 * self.theta2 as i64)
    }
}

/// Alice's decoding of (y, w) with the trapdoor.
pub fn rsp_alice_decode(kp: &TrapdoorKeypair, y: &[u32], w: &BitString) -> Result<Rsp4Output, RspError> {
    let p = &kp.public.params;
    if w.len() != p.preimage_width() {
        return Err(RspError::Width {
            expected: p.preimage_width(),
            got: w.len(),
        });
    }
    let (x, x2) = kp.invert(y)?;
    Ok(decode_pair(p, &x, &x2, w))
}

/// The decode formula given both preimages.
pub fn decode_pair(
    p: &crate::lattice::LatticeParams,
    x: &crate::lattice::Preimage,
    x2: &crate::lattice::Preimage,
    w: &BitString,
) -> Rsp4Output {
    let (hx, hx2) = (hardcore(x), hardcore(x2));
    let theta2 = hx ^ hx2;
    let ip = w.dot(&encode(p, x).xor(&encode(p, x2)));
    Rsp4Output {
        theta1: (theta2 && ip) ^ (hx && hx2),
        theta2,
    }
}

pub fn send_key(ep: &mut Endpoint, pk: &PublicKey) -> Result<(), ChannelError> {
    ep.send(MSG_KEY, Writer::new().put(pk).finish())
}

pub fn recv_key(ep: &mut Endpoint) -> Result<PublicKey, ChannelError> {
    parse(&ep.expect(MSG_KEY)?)
}

pub fn send_meas(ep: &mut Endpoint, y: &[u32], w: &BitString) -> Result<(), ChannelError> {
    ep.send(MSG_MEAS, Writer::new().put(&y.to_vec()).put(w).finish())
}

pub fn recv_meas(ep: &mut Endpoint) -> Result<(Vec<u32>, BitString), ChannelError> {
    parse(&ep.expect(MSG_MEAS)?)
}

pub fn send_merge(ep: &mut Endpoint, s: bool) -> Result<(), ChannelError> {
    ep.send(MSG_MERGE, Writer::new().put(&s).finish())
}

pub fn recv_merge(ep: &mut Endpoint) -> Result<bool, ChannelError> {
    parse(&ep.expect(MSG_MERGE)?)
}
