use std::collections::HashSet;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::{sha256, PrimitiveError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymKey(pub [u8; 32]);

impl SymKey {
    pub fn from_slice(b: &[u8]) -> Result<Self, PrimitiveError> {
        b.try_into().map(SymKey).map_err(|_| PrimitiveError::KeyLength {
            expected: 32,
            got: b.len(),
        })
    }
}

fn keystream(key: &SymKey, nonce: &[u8], len: usize) -> Vec<u8> {
    let mut rng = ChaCha20Rng::from_seed(sha256(&[&key.0, nonce]));
    let mut out = vec![0u8; len];
    rng.fill_bytes(&mut out);
    out
}

/// Encrypting side of a key: refuses to reuse a nonce.
#[derive(Debug)]
pub struct CipherSession {
    key: SymKey,
    used: HashSet<Vec<u8>>,
}

impl CipherSession {
    pub fn new(key: SymKey) -> Self {
        CipherSession {
            key,
            used: HashSet::new(),
        }
    }

    pub fn key(&self) -> &SymKey {
        &self.key
    }

    /// msg ⊕ PRG(key, nonce).
    pub fn encrypt(&mut self, nonce: &[u8], msg: &[u8]) -> Result<Vec<u8>, PrimitiveError> {
        if !self.used.insert(nonce.to_vec()) {
            return Err(PrimitiveError::NonceReuse(hex::encode(nonce)));
        }
        Ok(xor(msg, &keystream(&self.key, nonce, msg.len())))
    }
}

pub fn otp_decrypt(key: &SymKey, nonce: &[u8], ct: &[u8]) -> Vec<u8> {
    xor(ct, &keystream(key, nonce, ct.len()))
}

fn xor(a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_reuse() {
        let k = SymKey([5; 32]);
        let mut s = CipherSession::new(k);
        let ct = s.encrypt(b"n1", b"secret").unwrap();
        assert_eq!(otp_decrypt(&k, b"n1", &ct), b"secret");
        assert!(s.encrypt(b"n2", b"").unwrap().is_empty());
        assert!(matches!(s.encrypt(b"n1", b"x"), Err(PrimitiveError::NonceReuse(_))));
    }

    #[test]
    fn key_length_checked() {
        assert!(SymKey::from_slice(&[0; 31]).is_err());
    }
}
