//! Classical building blocks: hash commitments, a PRG stream cipher with
//! nonce bookkeeping, a one-time polynomial MAC, and seeded coin sources.

mod cipher;
mod coins;
mod commit;
mod mac;

pub use cipher::{otp_decrypt, CipherSession, SymKey};
pub use coins::CoinSource;
pub use commit::{commit, commit_with, verify_commitment, Commitment, Opening};
pub use mac::{mac_tag, mac_verify, MacKey, MacTag};

use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PrimitiveError {
    #[error("nonce {0} already used under this key")]
    NonceReuse(String),
    #[error("key must be {expected} bytes, got {got}")]
    KeyLength { expected: usize, got: usize },
}

/// SHA-256 over the concatenation of `parts`.
pub fn sha256(parts: &[&[u8]]) -> [u8; 32] {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    h.finalize().into()
}
