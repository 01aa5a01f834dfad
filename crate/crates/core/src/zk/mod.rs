//! Relations and an ideal zero-knowledge argument-of-knowledge backend.
//!
//! The ideal backend is a trusted functionality shared by both parties: the
//! prover hands it the witness, it evaluates the relation, and the verifier
//! receives a token `(relation, statement hash, verdict, tag)` where the tag
//! is keyed by a setup key only the functionality uses. Witnesses never
//! reach the verifier. Accepted witnesses are kept in the functionality's
//! escrow, which is what simulators and extractors read.

mod relations;

pub use relations::{key_coins, CommitOpening, KeyDerivation, KeyDerivationStatement, KeyDerivationWitness};

use std::any::Any;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::primitives::sha256;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ZkError {
    #[error("malformed proof token")]
    Malformed,
    #[error("verdict already set for this session")]
    AlreadyDecided,
    #[error("session has role {0:?}, operation needs the other role")]
    WrongRole(Role),
    #[error("extraction requires an accepting session")]
    NotAccepted,
}

/// A decidable NP-style relation.
pub trait Relation {
    type Statement: Serialize;
    type Witness: Clone + Send + 'static;

    fn name(&self) -> &'static str;

    fn holds(&self, x: &Self::Statement, w: &Self::Witness) -> bool;

    /// Canonical statement bytes bound into tokens.
    fn statement_bytes(&self, x: &Self::Statement) -> Vec<u8> {
        serde_json::to_vec(x).expect("statement serialises")
    }

    fn statement_hash(&self, x: &Self::Statement) -> [u8; 32] {
        sha256(&[b"zk.statement", self.name().as_bytes(), &[0], &self.statement_bytes(x)])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Prover,
    Verifier,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pending,
    Accept,
    Reject,
}

struct Escrowed {
    relation: &'static str,
    statement: [u8; 32],
    witness: Box<dyn Any + Send>,
}

/// The trusted functionality for one protocol session. Clones share the
/// escrow.
#[derive(Clone)]
pub struct IdealZk {
    setup_key: [u8; 32],
    escrow: Arc<Mutex<Vec<Escrowed>>>,
}

impl std::fmt::Debug for IdealZk {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IdealZk").field("escrowed", &self.escrow.lock().unwrap().len()).finish()
    }
}

impl IdealZk {
    pub fn new(session_id: &[u8]) -> Self {
        IdealZk {
            setup_key: sha256(&[b"zk.setup", session_id]),
            escrow: Arc::new(Mutex::new(Vec::new())),
        }
    }

    /// Witness of the most recent accepted proof of `x`.
    pub fn extract<R: Relation>(&self, rel: &R, x: &R::Statement) -> Result<R::Witness, ZkError> {
        let stmt = rel.statement_hash(x);
        let book = self.escrow.lock().unwrap();
        book.iter()
            .rev()
            .filter(|e| e.relation == rel.name() && e.statement == stmt)
            .find_map(|e| e.witness.downcast_ref::<R::Witness>().cloned())
            .ok_or(ZkError::NotAccepted)
    }

    /// Witness of the most recent accepted proof for `relation`, whatever the
    /// statement.
    pub fn extract_latest<R: Relation>(&self, rel: &R) -> Result<R::Witness, ZkError> {
        let book = self.escrow.lock().unwrap();
        book.iter()
            .rev()
            .filter(|e| e.relation == rel.name())
            .find_map(|e| e.witness.downcast_ref::<R::Witness>().cloned())
            .ok_or(ZkError::NotAccepted)
    }

    fn token(&self, name: &str, stmt: [u8; 32], accept: bool) -> ProofToken {
        let tag = sha256(&[&self.setup_key, name.as_bytes(), &[0], &stmt, &[accept as u8]]);
        ProofToken {
            relation: name.to_string(),
            statement_hash: stmt,
            accept,
            tag,
        }
    }

    fn authentic(&self, t: &ProofToken) -> bool {
        self.token(&t.relation, t.statement_hash, t.accept).tag == t.tag
    }

    /// Token for `x` without a witness; true iff some witness the
    /// environment registered in `book` satisfies the relation.
    pub fn simulate<R: Relation>(&self, rel: &R, x: &R::Statement, book: &WitnessBook<R::Witness>) -> Vec<Vec<u8>> {
        let truth = book.0.iter().any(|w| rel.holds(x, w));
        vec![self.token(rel.name(), rel.statement_hash(x), truth).to_bytes()]
    }
}

/// Witnesses known to the environment, consulted by `simulate`.
#[derive(Clone, Debug)]
pub struct WitnessBook<W>(pub Vec<W>);

impl<W> Default for WitnessBook<W> {
    fn default() -> Self {
        WitnessBook(Vec::new())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofToken {
    pub relation: String,
    pub statement_hash: [u8; 32],
    pub accept: bool,
    pub tag: [u8; 32],
}

impl ProofToken {
    /// u8 name length, name, 32-byte statement hash, verdict byte, 32-byte tag.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(66 + self.relation.len());
        out.push(self.relation.len() as u8);
        out.extend_from_slice(self.relation.as_bytes());
        out.extend_from_slice(&self.statement_hash);
        out.push(self.accept as u8);
        out.extend_from_slice(&self.tag);
        out
    }

    pub fn from_bytes(b: &[u8]) -> Result<ProofToken, ZkError> {
        let len = *b.first().ok_or(ZkError::Malformed)? as usize;
        if b.len() != 1 + len + 65 {
            return Err(ZkError::Malformed);
        }
        let relation = String::from_utf8(b[1..1 + len].to_vec()).map_err(|_| ZkError::Malformed)?;
        let rest = &b[1 + len..];
        let accept = match rest[32] {
            0 => false,
            1 => true,
            _ => return Err(ZkError::Malformed),
        };
        Ok(ProofToken {
            relation,
            statement_hash: rest[..32].try_into().unwrap(),
            accept,
            tag: rest[33..].try_into().unwrap(),
        })
    }
}

/// One proof instance, held by either the prover or the verifier.
pub struct ZkSession<'r, R: Relation> {
    relation: &'r R,
    statement: R::Statement,
    role: Role,
    verdict: Verdict,
    escrow: Option<R::Witness>,
}

impl<'r, R: Relation> ZkSession<'r, R> {
    pub fn prover(relation: &'r R, statement: R::Statement) -> Self {
        Self::new(relation, statement, Role::Prover)
    }

    pub fn verifier(relation: &'r R, statement: R::Statement) -> Self {
        Self::new(relation, statement, Role::Verifier)
    }

    fn new(relation: &'r R, statement: R::Statement, role: Role) -> Self {
        ZkSession {
            relation,
            statement,
            role,
            verdict: Verdict::Pending,
            escrow: None,
        }
    }

    pub fn statement(&self) -> &R::Statement {
        &self.statement
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    /// Hands the witness to the functionality; a false witness yields a
    /// rejecting token rather than an error.
    pub fn prove(&mut self, zk: &IdealZk, witness: R::Witness) -> Result<Vec<Vec<u8>>, ZkError> {
        if self.role != Role::Prover {
            return Err(ZkError::WrongRole(self.role));
        }
        if self.verdict != Verdict::Pending {
            return Err(ZkError::AlreadyDecided);
        }
        let ok = self.relation.holds(&self.statement, &witness);
        self.verdict = if ok { Verdict::Accept } else { Verdict::Reject };
        let stmt = self.relation.statement_hash(&self.statement);
        if ok {
            zk.escrow.lock().unwrap().push(Escrowed {
                relation: self.relation.name(),
                statement: stmt,
                witness: Box::new(witness.clone()),
            });
        }
        self.escrow = Some(witness);
        Ok(vec![zk.token(self.relation.name(), stmt, ok).to_bytes()])
    }

    pub fn verify(&mut self, zk: &IdealZk, messages: &[Vec<u8>]) -> Result<bool, ZkError> {
        if self.role != Role::Verifier {
            return Err(ZkError::WrongRole(self.role));
        }
        if self.verdict != Verdict::Pending {
            return Err(ZkError::AlreadyDecided);
        }
        let [msg] = messages else {
            return Err(ZkError::Malformed);
        };
        let t = ProofToken::from_bytes(msg)?;
        let ok = zk.authentic(&t)
            && t.accept
            && t.relation == self.relation.name()
            && t.statement_hash == self.relation.statement_hash(&self.statement);
        self.verdict = if ok { Verdict::Accept } else { Verdict::Reject };
        Ok(ok)
    }

    /// The escrowed witness of an accepted proof.
    pub fn extract(&self) -> Result<R::Witness, ZkError> {
        match (&self.escrow, self.verdict) {
            (Some(w), Verdict::Accept) => Ok(w.clone()),
            _ => Err(ZkError::NotAccepted),
        }
    }
}

#[cfg(test)]
mod tests;
