use std::collections::VecDeque;

use num_complex::Complex64;
use serde::Serialize;

use crate::channel::{parse, ChannelError, Endpoint, Message, Party, Transport, Writer};
use crate::lattice::LatticeParams;
use crate::primitives::{commit, verify_commitment, CoinSource, Commitment, Opening};
use crate::protocols::{q2pc_alice, q2pc_bob, ProtocolError, Q2pcAliceConfig, Q2pcAliceOutput, Q2pcAliceStrategy, Q2pcBobConfig};
use crate::mbqc::{BrickworkPattern, Site};
use crate::qsim::StateVector;
use crate::rsp::BobBackend;
use crate::zk::{CommitOpening, IdealZk, Relation, ZkSession};

pub const MSG_FS_COMMIT: &str = "fs.commit";
pub const MSG_FS_ZK: &str = "fs.zk";

/// Classical description of Bob's input: its amplitudes, encoded as
/// little-endian (re, im) f64 pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct StateDescription {
    pub amps: Vec<Complex64>,
}

impl StateDescription {
    pub fn of(state: &StateVector) -> Self {
        StateDescription {
            amps: state.amplitudes().to_vec(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.amps.iter().flat_map(|a| a.re.to_le_bytes().into_iter().chain(a.im.to_le_bytes())).collect()
    }

    pub fn from_bytes(b: &[u8]) -> Option<Self> {
        if b.len() % 16 != 0 {
            return None;
        }
        let f = |c: &[u8]| f64::from_le_bytes(c.try_into().unwrap());
        Some(StateDescription {
            amps: b.chunks(16).map(|c| Complex64::new(f(&c[..8]), f(&c[8..]))).collect(),
        })
    }

    pub fn to_state(&self) -> Option<StateVector> {
        StateVector::from_amplitudes(self.amps.clone()).ok()
    }
}

/// Bob's inner messages were produced by the honest Bob algorithm on the
/// committed input description, given Alice's messages: checked by
/// replaying honest Bob with the witness coins against the logged frames.
pub struct InnerConsistency {
    pub params: LatticeParams,
    pub backend: BobBackend,
}

#[derive(Clone, Debug, Serialize)]
pub struct InnerStatement {
    pub com_y: Commitment,
    pub session_id: [u8; 16],
    /// Encoded frames of the inner run, both directions, in order.
    pub frames: Vec<Vec<u8>>,
}

#[derive(Clone, Debug)]
pub struct InnerWitness {
    pub dec_y: Opening,
    pub description: Vec<u8>,
    pub seed: [u8; 32],
}

/// Serves logged Alice frames and checks every frame Bob sends against the
/// log.
struct Replay(VecDeque<Message>);

impl Transport for Replay {
    fn send_frame(&mut self, frame: &[u8]) -> Result<(), ChannelError> {
        match self.0.pop_front() {
            Some(m) if m.sender == Party::Bob && m.encode() == frame => Ok(()),
            _ => Err(ChannelError::Framing("replayed Bob diverges from the transcript".into())),
        }
    }

    fn recv_frame(&mut self) -> Result<Vec<u8>, ChannelError> {
        match self.0.pop_front() {
            Some(m) if m.sender == Party::Alice => Ok(m.encode()),
            _ => Err(ChannelError::PeerClosed),
        }
    }
}

impl Relation for InnerConsistency {
    type Statement = InnerStatement;
    type Witness = InnerWitness;

    fn name(&self) -> &'static str {
        "rel.fs.consistency"
    }

    fn holds(&self, x: &InnerStatement, w: &InnerWitness) -> bool {
        if !verify_commitment(&x.com_y, &w.dec_y, &w.description) {
            return false;
        }
        let Some(input) = StateDescription::from_bytes(&w.description).and_then(|d| d.to_state()) else {
            return false;
        };
        let Ok(msgs) = x.frames.iter().map(|f| Message::decode(f)).collect::<Result<VecDeque<_>, _>>() else {
            return false;
        };
        let Some(start) = msgs.front().map(|m| m.seq) else {
            return false;
        };
        let mut ep = Endpoint::resume(Party::Bob, x.session_id, start, Box::new(Replay(msgs)));
        let cfg = Q2pcBobConfig {
            input,
            params: self.params,
            backend: self.backend.clone(),
            lie_at: None,
        };
        let zk = IdealZk::new(&x.session_id);
        if q2pc_bob(&mut ep, &zk, &cfg, &mut inner_coins(&w.seed)).is_err() {
            return false;
        }
        // every logged frame must have been consumed
        ep.messages().len() == x.frames.len()
    }
}

fn inner_coins(seed: &[u8; 32]) -> CoinSource {
    CoinSource::new(*seed, "fs.inner")
}

#[derive(Clone, Debug)]
pub enum FullSimBobStrategy {
    Honest,
    /// Commits to this description but runs on the real input.
    WrongDescription(StateDescription),
    /// Reports a flipped outcome at the site during the inner run.
    InconsistentInner(Site),
    /// Proves knowledge of the commitment with a wrong opening.
    BadOpening,
}

#[derive(Clone, Debug)]
pub struct FullSimBobConfig {
    pub description: StateDescription,
    pub params: LatticeParams,
    pub backend: BobBackend,
    pub seed: [u8; 32],
    pub strategy: FullSimBobStrategy,
}

/// Alice's side: verify Bob's commitment proof, run the inner protocol,
/// verify Bob's consistency proof. Any rejection aborts with a phase tag.
pub fn fullsim_alice(ep: &mut Endpoint, zk: &IdealZk, pattern: &BrickworkPattern, params: &LatticeParams, coins: &mut CoinSource) -> Result<Q2pcAliceOutput, ProtocolError> {
    let com_y: Commitment = parse(&ep.expect(MSG_FS_COMMIT)?)?;
    let token = ep.expect(MSG_FS_ZK)?;
    if !ZkSession::verifier(&CommitOpening, com_y).verify(zk, &[token]).unwrap_or(false) {
        return Err(crate::protocols::fail_with(ep, "fs.commit", "commitment proof rejected"));
    }
    let start = ep.messages().len();
    let cfg = Q2pcAliceConfig {
        pattern: pattern.clone(),
        params: *params,
        strategy: Q2pcAliceStrategy::Honest,
    };
    let out = q2pc_alice(ep, zk, &cfg, coins)?;
    let frames = ep.messages()[start..].iter().map(Message::encode).collect();
    let token = ep.expect(MSG_FS_ZK)?;
    let rel = InnerConsistency {
        params: *params,
        backend: BobBackend::Quantum,
    };
    let stmt = InnerStatement {
        com_y,
        session_id: ep.session_id(),
        frames,
    };
    if !ZkSession::verifier(&rel, stmt).verify(zk, &[token]).unwrap_or(false) {
        return Err(crate::protocols::fail_with(ep, "fs.consistency", "consistency proof rejected"));
    }
    Ok(out)
}

pub fn fullsim_bob(ep: &mut Endpoint, zk: &IdealZk, cfg: &FullSimBobConfig, coins: &mut CoinSource) -> Result<(), ProtocolError> {
    let committed = match &cfg.strategy {
        FullSimBobStrategy::WrongDescription(d) => d.to_bytes(),
        _ => cfg.description.to_bytes(),
    };
    let (com_y, dec_y) = commit(&committed, coins);
    ep.send(MSG_FS_COMMIT, Writer::new().put(&com_y).finish())?;
    let opening = match cfg.strategy {
        FullSimBobStrategy::BadOpening => Opening(coins.bytes32()),
        _ => dec_y,
    };
    let token = ZkSession::prover(&CommitOpening, com_y).prove(zk, (opening, committed.clone()))?;
    ep.send(MSG_FS_ZK, token.concat())?;

    let input = cfg
        .description
        .to_state()
        .ok_or_else(|| ProtocolError::Input("description is not a state".into()))?;
    let start = ep.messages().len();
    let inner = Q2pcBobConfig {
        input,
        params: cfg.params,
        backend: cfg.backend.clone(),
        lie_at: match cfg.strategy {
            FullSimBobStrategy::InconsistentInner(s) => Some(s),
            _ => None,
        },
    };
    q2pc_bob(ep, zk, &inner, &mut inner_coins(&cfg.seed))?;
    let rel = InnerConsistency {
        params: cfg.params,
        backend: cfg.backend.clone(),
    };
    let stmt = InnerStatement {
        com_y,
        session_id: ep.session_id(),
        frames: ep.messages()[start..].iter().map(Message::encode).collect(),
    };
    let witness = InnerWitness {
        dec_y,
        description: committed,
        seed: cfg.seed,
    };
    let token = ZkSession::prover(&rel, stmt).prove(zk, witness)?;
    ep.send(MSG_FS_ZK, token.concat())?;
    Ok(())
}
