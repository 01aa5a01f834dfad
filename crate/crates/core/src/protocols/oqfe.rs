use rand::Rng;

use super::{fail, ProtocolError, MSG_ZK};
use crate::channel::{parse, Endpoint, Writer};
use crate::lattice::{gen, LatticeParams, PublicKey, TrapdoorKeypair};
use crate::primitives::{commit, CoinSource, Commitment};
use crate::qsim::{Angle8, BitString, Basis, StateVector};
use crate::rsp::{recv_key, recv_meas, rsp_alice_decode, rsp_bob, send_key, send_meas, BobBackend, Rsp4Output};
use crate::zk::{key_coins, IdealZk, KeyDerivation, KeyDerivationStatement, KeyDerivationWitness, ZkSession};

pub const MSG_COMMIT: &str = "oqfe.commit";
pub const MSG_COIN: &str = "oqfe.coin";
pub const MSG_DELTA: &str = "oqfe.delta";
pub const MSG_RESULT: &str = "oqfe.result";

/// δ = φ_b + θ2·π/2 + r_A·π with φ_b = b·π/2, as an even Angle8.
pub fn oqfe_delta(b: bool, theta2: bool, r_a: bool) -> Angle8 {
    Angle8::new(2 * ((b as i64 + theta2 as i64 + 2 * r_a as i64) % 4))
}

/// s_b = s̄ ⊕ θ1 ⊕ r_A ⊕ m0·b.
pub fn oqfe_decode(b: bool, theta1: bool, r_a: bool, m0: bool, s_bar: bool) -> bool {
    s_bar ^ theta1 ^ r_a ^ (m0 && b)
}

/// One outcome branch of Bob's three-qubit circuit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OqfeBranch {
    pub m0: bool,
    pub m1: bool,
    pub s_bar: bool,
    pub probability: f64,
}

/// Bob's circuit on |ψ_in⟩ ⊗ |+_θ⟩ ⊗ |+⟩: CZ(0,1), CZ(1,2), X measurement of
/// qubit 0 (m0), δ-plane measurement of qubit 1 (m1), X^{m1}Z^{m0} on
/// qubit 2, Z measurement (s̄). Every branch with its Born weight.
pub fn oqfe_bob_branches(psi_in: &StateVector, rsp_qubit: &StateVector, delta: Angle8) -> Result<Vec<OqfeBranch>, ProtocolError> {
    if psi_in.num_qubits() != 1 || rsp_qubit.num_qubits() != 1 {
        return Err(ProtocolError::Input("oblivious evaluation acts on one qubit".into()));
    }
    let mut st = psi_in.tensor(rsp_qubit)?.tensor(&StateVector::plus(Angle8::ZERO))?;
    st.cz(0, 1)?;
    st.cz(1, 2)?;
    let mut out = Vec::with_capacity(8);
    for m0 in [false, true] {
        let (p0, Some(s0)) = st.project(0, Basis::X, m0 as u8)? else { continue };
        for m1 in [false, true] {
            let (p1, Some(mut s1)) = s0.project(0, Basis::Plane(delta), m1 as u8)? else { continue };
            if m1 {
                s1.x(0)?;
            }
            if m0 {
                s1.z(0)?;
            }
            for s_bar in [false, true] {
                let (p2, _) = s1.project(0, Basis::Z, s_bar as u8)?;
                out.push(OqfeBranch {
                    m0,
                    m1,
                    s_bar,
                    probability: p0 * p1 * p2,
                });
            }
        }
    }
    Ok(out)
}

fn sample_branch<R: Rng + ?Sized>(branches: &[OqfeBranch], rng: &mut R) -> OqfeBranch {
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    let mut u: f64 = rng.gen::<f64>() * total;
    for b in branches {
        if u < b.probability {
            return *b;
        }
        u -= b.probability;
    }
    *branches.iter().rev().find(|b| b.probability > 0.0).expect("some branch has weight")
}

/// Alice's exact output law [Pr(0), Pr(1)], enumerating θ1, θ2, r_A
/// uniformly and Bob's outcomes with their Born weights.
pub fn oqfe_exact_law(psi_in: &StateVector, b: bool) -> Result<[f64; 2], ProtocolError> {
    let mut law = [0.0; 2];
    for theta1 in [false, true] {
        for theta2 in [false, true] {
            let rsp = StateVector::plus(Rsp4Output { theta1, theta2 }.angle());
            for r_a in [false, true] {
                let delta = oqfe_delta(b, theta2, r_a);
                for br in oqfe_bob_branches(psi_in, &rsp, delta)? {
                    law[oqfe_decode(b, theta1, r_a, br.m0, br.s_bar) as usize] += br.probability / 8.0;
                }
            }
        }
    }
    Ok(law)
}

/// Born law of M_Z·Rx(−b·π/2)|ψ_in⟩.
pub fn oqfe_target_law(psi_in: &StateVector, b: bool) -> Result<[f64; 2], ProtocolError> {
    let mut s = psi_in.clone();
    s.rx(0, Angle8::new(-2 * b as i64))?;
    let z = s.z_probabilities();
    Ok([z[0], z[1]])
}

/// Scripted malicious-Alice behaviours (honest-but-curious Alice is
/// `Honest`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AliceStrategy {
    Honest,
    /// r_A forced to a fixed value.
    FixedMask(bool),
    /// Sends a key not derived from the tossed coins.
    BadKey,
    /// Proves with a share different from the committed one.
    InconsistentCommitment,
    /// Adds the given offset to the honest δ.
    TamperedDelta(Angle8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BobStrategy {
    Honest,
    /// Bob's coin share is corrupted in transit: Alice derives the key from
    /// a flipped share while Bob checks against his own.
    FlipCoinInTransit,
}

#[derive(Clone, Debug)]
pub struct OqfeAliceConfig {
    pub b: bool,
    pub params: LatticeParams,
    pub strategy: AliceStrategy,
}

/// Alice's result together with her view of the run.
#[derive(Clone, Debug)]
pub struct OqfeAliceOutput {
    pub s_b: bool,
    pub theta: Rsp4Output,
    pub r_a: bool,
    pub delta: Angle8,
    pub y: Vec<u32>,
    pub w: BitString,
    pub m0: bool,
    pub s_bar: bool,
    pub public: PublicKey,
}

#[derive(Clone, Debug)]
pub struct OqfeBobConfig {
    pub psi_in: StateVector,
    pub backend: BobBackend,
    pub strategy: BobStrategy,
}

#[derive(Clone, Debug)]
pub struct OqfeBobOutput {
    pub rsp_state: StateVector,
    pub delta: Angle8,
    pub m0: bool,
    /// Stays with Bob; never sent.
    pub m1: bool,
    pub s_bar: bool,
}

/// Semi-honest protocol, Alice's side.
pub fn oqfe_sh_alice(ep: &mut Endpoint, cfg: &OqfeAliceConfig, coins: &mut CoinSource) -> Result<OqfeAliceOutput, ProtocolError> {
    let kp = gen(&cfg.params, &mut coins.derive("keygen"))?;
    send_key(ep, &kp.public)?;
    alice_tail(ep, cfg, &kp, coins)
}

/// Semi-honest protocol, Bob's side.
pub fn oqfe_sh_bob(ep: &mut Endpoint, cfg: &OqfeBobConfig, coins: &mut CoinSource) -> Result<OqfeBobOutput, ProtocolError> {
    let pk = recv_key(ep)?;
    bob_tail(ep, cfg, &pk, coins)
}

fn alice_tail(ep: &mut Endpoint, cfg: &OqfeAliceConfig, kp: &TrapdoorKeypair, coins: &mut CoinSource) -> Result<OqfeAliceOutput, ProtocolError> {
    let (y, w) = recv_meas(ep)?;
    let theta = match rsp_alice_decode(kp, &y, &w) {
        Ok(t) => t,
        Err(e) => return Err(fail(ep, "rsp.decode", None, &e.to_string())),
    };
    let mut r_a = coins.bit();
    if let AliceStrategy::FixedMask(v) = cfg.strategy {
        r_a = v;
    }
    let mut delta = oqfe_delta(cfg.b, theta.theta2, r_a);
    if let AliceStrategy::TamperedDelta(off) = cfg.strategy {
        delta = delta + off;
    }
    ep.send(MSG_DELTA, Writer::new().put(&delta).finish())?;
    let (m0, s_bar): (bool, bool) = parse(&ep.expect(MSG_RESULT)?)?;
    Ok(OqfeAliceOutput {
        s_b: oqfe_decode(cfg.b, theta.theta1, r_a, m0, s_bar),
        theta,
        r_a,
        delta,
        y,
        w,
        m0,
        s_bar,
        public: kp.public.clone(),
    })
}

fn bob_tail(ep: &mut Endpoint, cfg: &OqfeBobConfig, pk: &PublicKey, coins: &mut CoinSource) -> Result<OqfeBobOutput, ProtocolError> {
    let out = rsp_bob(pk, &cfg.backend, coins)?;
    send_meas(ep, &out.y, &out.w)?;
    let delta: crate::qsim::Angle8 = parse(&ep.expect(MSG_DELTA)?)?;
    if !delta.is_even() {
        return Err(fail(ep, "oqfe.delta", None, "δ is not a multiple of π/2"));
    }
    let branches = oqfe_bob_branches(&cfg.psi_in, &out.state, delta)?;
    let br = sample_branch(&branches, coins);
    ep.send(MSG_RESULT, Writer::new().put(&br.m0).put(&br.s_bar).finish())?;
    Ok(OqfeBobOutput {
        rsp_state: out.state,
        delta,
        m0: br.m0,
        m1: br.m1,
        s_bar: br.s_bar,
    })
}

/// Malicious-Alice protocol, Alice's side: coin toss for the key, proof
/// that the key came from it, then the semi-honest tail.
pub fn oqfe_mal_alice(
    ep: &mut Endpoint,
    zk: &IdealZk,
    cfg: &OqfeAliceConfig,
    coins: &mut CoinSource,
) -> Result<OqfeAliceOutput, ProtocolError> {
    let r_a = coins.bytes32();
    let (com_f, dec_f) = commit(&r_a, coins);
    ep.send(MSG_COMMIT, Writer::new().put(&com_f).finish())?;
    let r_b: [u8; 32] = parse(&ep.expect(MSG_COIN)?)?;
    let mut used = r_a;
    if cfg.strategy == AliceStrategy::InconsistentCommitment {
        used[0] ^= 1;
    }
    let kp = match cfg.strategy {
        AliceStrategy::BadKey => gen(&cfg.params, &mut coins.derive("own-key"))?,
        _ => gen(&cfg.params, &mut key_coins(&used, &r_b))?,
    };
    send_key(ep, &kp.public)?;
    let rel = KeyDerivation { params: cfg.params };
    let stmt = KeyDerivationStatement {
        com_f,
        r_b,
        key: kp.public.to_bytes(),
    };
    let token = ZkSession::prover(&rel, stmt).prove(zk, KeyDerivationWitness { r_a: used, dec_f })?;
    ep.send(MSG_ZK, token.concat())?;
    alice_tail(ep, cfg, &kp, coins)
}

/// Malicious-Alice protocol, Bob's side; aborts on a rejected key proof.
pub fn oqfe_mal_bob(
    ep: &mut Endpoint,
    zk: &IdealZk,
    params: &LatticeParams,
    cfg: &OqfeBobConfig,
    coins: &mut CoinSource,
) -> Result<OqfeBobOutput, ProtocolError> {
    let com_f: Commitment = parse(&ep.expect(MSG_COMMIT)?)?;
    let r_b = coins.bytes32();
    let mut sent = r_b;
    if cfg.strategy == BobStrategy::FlipCoinInTransit {
        sent[0] ^= 1;
    }
    ep.send(MSG_COIN, Writer::new().put(&sent).finish())?;
    let pk = recv_key(ep)?;
    let token = ep.expect(MSG_ZK)?;
    let rel = KeyDerivation { params: *params };
    let stmt = KeyDerivationStatement {
        com_f,
        r_b,
        key: pk.to_bytes(),
    };
    if !ZkSession::verifier(&rel, stmt).verify(zk, &[token]).unwrap_or(false) {
        return Err(fail(ep, "oqfe.keygen", None, "key derivation proof rejected"));
    }
    bob_tail(ep, cfg, &pk, coins)
}
