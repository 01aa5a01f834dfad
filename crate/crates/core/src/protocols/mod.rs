//! The interactive protocols, each as an Alice function and a Bob function
//! driving one `Endpoint`: oblivious evaluation of Rx(−b·π/2) against a
//! semi-honest or a malicious Alice, the blind pattern protocol, and the
//! authenticated output-delivery wrapper.

mod delivery;
mod oqfe;
mod q2pc;

pub use delivery::{delivery_alice, delivery_bob, wrapped_eval, DeliveryKeys, TruthTable, Wrapped, MSG_ENC_B};
pub use oqfe::{
    oqfe_bob_branches, oqfe_decode, oqfe_delta, oqfe_exact_law, oqfe_mal_alice, oqfe_mal_bob, oqfe_sh_alice, oqfe_sh_bob,
    oqfe_target_law, AliceStrategy, BobStrategy, OqfeAliceConfig, OqfeAliceOutput, OqfeBobConfig, OqfeBobOutput,
    OqfeBranch, MSG_COIN, MSG_COMMIT, MSG_DELTA, MSG_RESULT,
};
pub use q2pc::{
    q2pc_alice, q2pc_bob, Q2pcAliceConfig, Q2pcAliceOutput, Q2pcAliceStrategy, Q2pcBobConfig, Q2pcBobOutput, RspRecord,
    SiteConsistency, SiteStatement, SiteWitness, MSG_Q_COIN, MSG_Q_COMMIT, MSG_Q_DELTA, MSG_Q_OUTCOME,
};

use crate::channel::{inproc_pair, Abort, ChannelError, Endpoint, Message};
use crate::lattice::LatticeError;
use crate::mbqc::MbqcError;
use crate::qsim::QsimError;
use crate::rsp::RspError;
use crate::zk::ZkError;

/// Proof tokens of the ideal zero-knowledge functionality.
pub const MSG_ZK: &str = "zk.token";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProtocolError {
    #[error("aborted: {0}")]
    Aborted(Abort),
    #[error("peer aborted: {0}")]
    PeerAborted(Abort),
    #[error(transparent)]
    Channel(ChannelError),
    #[error(transparent)]
    Rsp(RspError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error(transparent)]
    Mbqc(#[from] MbqcError),
    #[error(transparent)]
    Zk(#[from] ZkError),
    #[error("invalid input: {0}")]
    Input(String),
}

impl From<ChannelError> for ProtocolError {
    fn from(e: ChannelError) -> Self {
        match e {
            ChannelError::PeerAborted(a) => ProtocolError::PeerAborted(a),
            e => ProtocolError::Channel(e),
        }
    }
}

impl From<RspError> for ProtocolError {
    fn from(e: RspError) -> Self {
        match e {
            RspError::Channel(c) => c.into(),
            e => ProtocolError::Rsp(e),
        }
    }
}

impl ProtocolError {
    /// The abort notice, whichever side raised it.
    pub fn abort(&self) -> Option<&Abort> {
        match self {
            ProtocolError::Aborted(a) | ProtocolError::PeerAborted(a) => Some(a),
            _ => None,
        }
    }
}

/// Sends an abort notice (best effort) and returns the matching error.
pub(crate) fn fail(ep: &mut Endpoint, phase: &str, site: Option<(u32, u32)>, cause: &str) -> ProtocolError {
    let a = Abort::new(phase, site, cause);
    let _ = ep.send_abort(&a);
    ProtocolError::Aborted(a)
}

/// Phase-tagged abort without a site, for protocols built on top of these.
pub fn fail_with(ep: &mut Endpoint, phase: &str, cause: &str) -> ProtocolError {
    fail(ep, phase, None, cause)
}

/// Runs Alice and Bob on two threads over an in-process channel and returns
/// both results plus the transcript as logged by Alice.
pub fn run_pair<A, B, FA, FB>(session_id: [u8; 16], alice: FA, bob: FB) -> (A, B, Vec<Message>)
where
    A: Send,
    B: Send,
    FA: FnOnce(&mut Endpoint) -> A + Send,
    FB: FnOnce(&mut Endpoint) -> B + Send,
{
    let (mut ea, mut eb) = inproc_pair(session_id);
    let log = ea.log_handle();
    let (a, b) = std::thread::scope(|s| {
        let hb = s.spawn(move || bob(&mut eb));
        let a = alice(&mut ea);
        // Alice may stop early; dropping her end unblocks a waiting Bob
        drop(ea);
        (a, hb.join().expect("bob thread"))
    });
    let msgs = log.lock().unwrap().clone();
    (a, b, msgs)
}
