use serde::Serialize;

use crate::channel::{parse, Endpoint, Writer};
use crate::primitives::{commit, otp_decrypt, sha256, verify_commitment, CipherSession, CoinSource, Commitment, Opening, SymKey};
use crate::protocols::{fail_with, ProtocolError, MSG_ZK};
use crate::qsim::{Basis, StateVector};
use crate::zk::{CommitOpening, IdealZk, Relation, ZkError, ZkSession};

pub const MSG_COMSK: &str = "zkpoqk.comsk";
pub const MSG_ENC: &str = "zkpoqk.enc";
pub const MSG_VMSG: &str = "zkpoqk.vmsg";
pub const MSG_FINAL: &str = "zkpoqk.final";

/// Prover message: u32 round, parity byte, 32-byte digest.
pub const TOY_MSG_LEN: usize = 37;

/// Toy proof of quantum knowledge, standing in for a real one: the witness
/// is an n-qubit basis state |w⟩ with H(w) = target. Round i the verifier
/// sends a coin-derived challenge c_i and the prover answers ⟨c_i, w⟩ with
/// a per-round digest H(i, w). The verifier solves the parities over GF(2)
/// and checks the hash and digests.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ToyInstance {
    pub n: usize,
    pub target: [u8; 32],
}

fn word_bytes(n: usize, w: u64) -> Vec<u8> {
    w.to_le_bytes()[..n.div_ceil(8)].to_vec()
}

impl ToyInstance {
    pub fn for_witness(n: usize, w: u64) -> Self {
        assert!((1..=16).contains(&n) && w >> n == 0);
        ToyInstance {
            n,
            target: sha256(&[b"toy.witness", &word_bytes(n, w)]),
        }
    }

    /// Rel_Q: `w` is a witness.
    pub fn holds(&self, w: u64) -> bool {
        w >> self.n == 0 && sha256(&[b"toy.witness", &word_bytes(self.n, w)]) == self.target
    }

    fn digest(&self, round: u32, w: u64) -> [u8; 32] {
        sha256(&[b"toy.round", &round.to_le_bytes(), &word_bytes(self.n, w)])
    }
}

/// Prover holding the witness as a quantum state; it measures once.
pub struct ToyProver {
    inst: ToyInstance,
    state: Option<StateVector>,
    measured: Option<u64>,
}

impl ToyProver {
    pub fn new(inst: ToyInstance, witness: StateVector) -> Self {
        ToyProver {
            inst,
            state: Some(witness),
            measured: None,
        }
    }

    fn witness(&mut self, coins: &mut CoinSource) -> Result<u64, ProtocolError> {
        if let Some(w) = self.measured {
            return Ok(w);
        }
        let mut st = self.state.take().expect("state present until measured");
        let mut w = 0u64;
        for k in 0..self.inst.n {
            let (o, next) = st.measure(0, Basis::Z, coins)?;
            w |= (o as u64) << k;
            st = next;
        }
        self.measured = Some(w);
        Ok(w)
    }

    pub fn respond(&mut self, round: u32, challenge: &[u8], coins: &mut CoinSource) -> Result<Vec<u8>, ProtocolError> {
        let w = self.witness(coins)?;
        let c = challenge_word(self.inst.n, challenge);
        let mut out = Vec::with_capacity(TOY_MSG_LEN);
        out.extend_from_slice(&round.to_le_bytes());
        out.push(((c & w).count_ones() % 2) as u8);
        out.extend_from_slice(&self.inst.digest(round, w));
        Ok(out)
    }
}

fn challenge_word(n: usize, c: &[u8]) -> u64 {
    let mut b = [0u8; 8];
    for (i, v) in c.iter().take(8).enumerate() {
        b[i] = *v;
    }
    u64::from_le_bytes(b) & ((1u64 << n) - 1)
}

/// A verifier run in seeded mode: its next message given the prover's
/// previous one.
pub trait SeededVerifier {
    fn challenge(&mut self, round: u32, prev_prover: Option<&[u8]>) -> Vec<u8>;
}

/// The shipped verifier: challenges depend only on its seed and the round.
pub struct ToyVerifier {
    pub n: usize,
    pub seed: [u8; 32],
}

impl SeededVerifier for ToyVerifier {
    fn challenge(&mut self, round: u32, _prev: Option<&[u8]>) -> Vec<u8> {
        let h = sha256(&[b"toy.challenge", &self.seed, &round.to_le_bytes()]);
        word_bytes(self.n, challenge_word(self.n, &h))
    }
}

/// Counterexample verifier whose challenges depend on what the prover sent.
pub struct AdaptiveMockVerifier {
    pub n: usize,
    pub seed: [u8; 32],
}

impl SeededVerifier for AdaptiveMockVerifier {
    fn challenge(&mut self, round: u32, prev: Option<&[u8]>) -> Vec<u8> {
        let h = sha256(&[b"toy.challenge", &self.seed, &round.to_le_bytes(), prev.unwrap_or(&[])]);
        word_bytes(self.n, challenge_word(self.n, &h))
    }
}

/// Runs two fresh verifiers from `make` for `rounds` rounds against two
/// different prover message sequences; true iff their messages coincide.
pub fn check_message_independence(make: impl Fn() -> Box<dyn SeededVerifier>, rounds: u32) -> bool {
    let (mut a, mut b) = (make(), make());
    let (mut pa, mut pb): (Option<Vec<u8>>, Option<Vec<u8>>) = (None, None);
    for i in 0..rounds {
        if a.challenge(i, pa.as_deref()) != b.challenge(i, pb.as_deref()) {
            return false;
        }
        pa = Some(vec![0x00; TOY_MSG_LEN]);
        pb = Some(vec![0xff; TOY_MSG_LEN]);
    }
    true
}

/// The witness consistent with a transcript, if the verifier would accept.
pub fn toy_extract(inst: &ToyInstance, challenges: &[Vec<u8>], responses: &[Vec<u8>]) -> Option<u64> {
    if challenges.len() != responses.len() {
        return None;
    }
    // rows (c, parity) reduced to echelon form over GF(2)
    let mut rows: Vec<(u64, u8)> = Vec::new();
    for (i, (c, r)) in challenges.iter().zip(responses).enumerate() {
        if r.len() != TOY_MSG_LEN || u32::from_le_bytes(r[..4].try_into().unwrap()) != i as u32 || r[4] > 1 {
            return None;
        }
        let (mut v, mut p) = (challenge_word(inst.n, c), r[4]);
        for &(rv, rp) in &rows {
            if v & (1 << rv.trailing_zeros()) != 0 {
                v ^= rv;
                p ^= rp;
            }
        }
        if v == 0 {
            if p != 0 {
                return None;
            }
            continue;
        }
        let pivot = 1 << v.trailing_zeros();
        for row in rows.iter_mut() {
            if row.0 & pivot != 0 {
                row.0 ^= v;
                row.1 ^= p;
            }
        }
        rows.push((v, p));
    }
    let pivots: u64 = rows.iter().fold(0, |acc, r| acc | 1 << r.0.trailing_zeros());
    let free: Vec<usize> = (0..inst.n).filter(|k| pivots & (1 << k) == 0).collect();
    for assign in 0..1u64 << free.len() {
        let mut w = 0u64;
        for (t, &k) in free.iter().enumerate() {
            w |= ((assign >> t) & 1) << k;
        }
        for &(rv, rp) in &rows {
            let piv = rv.trailing_zeros();
            let rest = ((rv & !(1 << piv)) & w).count_ones() as u8 % 2;
            w |= ((rp ^ rest) as u64) << piv;
        }
        if inst.holds(w) && responses.iter().enumerate().all(|(i, r)| r[5..] == inst.digest(i as u32, w)) {
            return Some(w);
        }
    }
    None
}

pub fn toy_accepts(inst: &ToyInstance, challenges: &[Vec<u8>], responses: &[Vec<u8>]) -> bool {
    toy_extract(inst, challenges, responses).is_some()
}

fn nonce(session_id: &[u8; 16], round: u32) -> Vec<u8> {
    [&session_id[..], &round.to_le_bytes()].concat()
}

/// The encryptions are under the committed key and decrypt to a transcript
/// the inner verifier accepts.
pub struct EncryptedTranscript;

#[derive(Clone, Debug, Serialize)]
pub struct FinalStatement {
    pub com_sk: Commitment,
    pub instance: ToyInstance,
    pub session_id: [u8; 16],
    pub challenges: Vec<Vec<u8>>,
    pub encs: Vec<Vec<u8>>,
}

impl Relation for EncryptedTranscript {
    type Statement = FinalStatement;
    type Witness = (SymKey, Opening);

    fn name(&self) -> &'static str {
        "rel.zkpoqk.final"
    }

    fn holds(&self, x: &FinalStatement, (sk, dec): &(SymKey, Opening)) -> bool {
        if !verify_commitment(&x.com_sk, dec, &sk.0) {
            return false;
        }
        let plain: Vec<Vec<u8>> = x.encs.iter().enumerate().map(|(i, c)| otp_decrypt(sk, &nonce(&x.session_id, i as u32), c)).collect();
        toy_accepts(&x.instance, &x.challenges, &plain)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProverStrategy {
    Honest,
    /// Encrypts under a key other than the committed one.
    WrongKey,
    /// Holds no witness and sends encryptions of random bytes.
    NoWitness,
}

#[derive(Clone, Debug)]
pub struct ProverOutput {
    /// Inner prover messages before encryption.
    pub plaintexts: Vec<Vec<u8>>,
}

/// Prover (Bob): commit to sk, prove knowledge of the opening, answer the
/// inner verifier under encryption, prove the encryptions consistent.
pub fn zkpoqk_prover(
    ep: &mut Endpoint,
    zk: &IdealZk,
    inst: &ToyInstance,
    witness: StateVector,
    strategy: ProverStrategy,
    coins: &mut CoinSource,
) -> Result<ProverOutput, ProtocolError> {
    let sk = SymKey(coins.bytes32());
    let (com_sk, dec_sk) = commit(&sk.0, coins);
    ep.send(MSG_COMSK, Writer::new().put(&com_sk).finish())?;
    let token = ZkSession::prover(&CommitOpening, com_sk).prove(zk, (dec_sk, sk.0.to_vec()))?;
    ep.send(MSG_ZK, token.concat())?;

    let enc_key = match strategy {
        ProverStrategy::WrongKey => SymKey(coins.bytes32()),
        _ => sk,
    };
    let mut cipher = CipherSession::new(enc_key);
    let mut prover = ToyProver::new(inst.clone(), witness);
    let sid = ep.session_id();
    let (mut challenges, mut encs, mut plaintexts) = (Vec::new(), Vec::new(), Vec::new());
    loop {
        let msg = ep.recv()?;
        match msg.msg_type.as_str() {
            MSG_VMSG => {
                let c: Vec<u8> = parse(&msg.payload)?;
                let i = challenges.len() as u32;
                let m = match strategy {
                    ProverStrategy::NoWitness => (0..TOY_MSG_LEN).map(|_| coins.below(256) as u8).collect(),
                    _ => prover.respond(i, &c, coins)?,
                };
                let enc = cipher.encrypt(&nonce(&sid, i), &m).map_err(|e| ProtocolError::Input(e.to_string()))?;
                ep.send(MSG_ENC, Writer::new().put(&enc).finish())?;
                challenges.push(c);
                encs.push(enc);
                plaintexts.push(m);
            }
            MSG_FINAL => break,
            crate::channel::ABORT => {
                return Err(ProtocolError::PeerAborted(crate::channel::Abort::from_payload(&msg.payload)?));
            }
            other => return Err(fail_with(ep, "zkpoqk.inner", &format!("unexpected {other}"))),
        }
    }
    let stmt = FinalStatement {
        com_sk,
        instance: inst.clone(),
        session_id: sid,
        challenges,
        encs,
    };
    let token = ZkSession::prover(&EncryptedTranscript, stmt).prove(zk, (sk, dec_sk))?;
    ep.send(MSG_ZK, token.concat())?;
    Ok(ProverOutput { plaintexts })
}

/// What the verifier keeps from a session.
#[derive(Clone, Debug)]
pub struct VerifierOutput {
    pub accept: bool,
    /// Phase of the first rejected check.
    pub reject_phase: Option<String>,
    pub com_sk: Commitment,
    pub challenges: Vec<Vec<u8>>,
    pub encs: Vec<Vec<u8>>,
    pub session_id: [u8; 16],
}

/// Verifier (Alice): accepts iff both the key-opening proof and the final
/// consistency proof accept.
pub fn zkpoqk_verifier(ep: &mut Endpoint, zk: &IdealZk, inst: &ToyInstance, rounds: u32, coins: &mut CoinSource) -> Result<VerifierOutput, ProtocolError> {
    let com_sk: Commitment = parse(&ep.expect(MSG_COMSK)?)?;
    let token = ep.expect(MSG_ZK)?;
    let mut out = VerifierOutput {
        accept: false,
        reject_phase: None,
        com_sk,
        challenges: Vec::new(),
        encs: Vec::new(),
        session_id: ep.session_id(),
    };
    if !ZkSession::verifier(&CommitOpening, com_sk).verify(zk, &[token]).unwrap_or(false) {
        let _ = fail_with(ep, "zkpoqk.comsk", "key opening proof rejected");
        out.reject_phase = Some("zkpoqk.comsk".into());
        return Ok(out);
    }
    let mut v = ToyVerifier { n: inst.n, seed: coins.bytes32() };
    for i in 0..rounds {
        let c = v.challenge(i, None);
        ep.send(MSG_VMSG, Writer::new().put(&c).finish())?;
        out.challenges.push(c);
        out.encs.push(parse(&ep.expect(MSG_ENC)?)?);
    }
    ep.send(MSG_FINAL, Vec::new())?;
    let token = ep.expect(MSG_ZK)?;
    let stmt = FinalStatement {
        com_sk,
        instance: inst.clone(),
        session_id: out.session_id,
        challenges: out.challenges.clone(),
        encs: out.encs.clone(),
    };
    out.accept = ZkSession::verifier(&EncryptedTranscript, stmt).verify(zk, &[token]).unwrap_or(false);
    if !out.accept {
        out.reject_phase = Some("zkpoqk.final".into());
    }
    Ok(out)
}

/// Chains the two extractors: sk from the key-opening proof, then the
/// inner extractor on the decrypted transcript.
pub fn zkpoqk_extract(zk: &IdealZk, inst: &ToyInstance, session: &VerifierOutput) -> Result<u64, ZkError> {
    if !session.accept {
        return Err(ZkError::NotAccepted);
    }
    let (_, sk) = zk.extract(&CommitOpening, &session.com_sk)?;
    let sk = SymKey::from_slice(&sk).map_err(|_| ZkError::Malformed)?;
    let plain: Vec<Vec<u8>> = session
        .encs
        .iter()
        .enumerate()
        .map(|(i, c)| otp_decrypt(&sk, &nonce(&session.session_id, i as u32), c))
        .collect();
    toy_extract(inst, &session.challenges, &plain).ok_or(ZkError::Malformed)
}
