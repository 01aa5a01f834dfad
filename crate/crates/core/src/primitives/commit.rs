use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::sha256;

/// com = SHA-256(msg ‖ dec).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Commitment(#[serde(with = "hex32")] pub [u8; 32]);

/// Opening randomness, kept by the committer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Opening(#[serde(with = "hex32")] pub [u8; 32]);

pub fn commit<R: RngCore + ?Sized>(msg: &[u8], rng: &mut R) -> (Commitment, Opening) {
    let mut dec = [0u8; 32];
    rng.fill_bytes(&mut dec);
    (commit_with(msg, &Opening(dec)), Opening(dec))
}

pub fn commit_with(msg: &[u8], dec: &Opening) -> Commitment {
    Commitment(sha256(&[msg, &dec.0]))
}

pub fn verify_commitment(com: &Commitment, dec: &Opening, msg: &[u8]) -> bool {
    commit_with(msg, dec) == *com
}

pub(crate) mod hex32 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let s = String::deserialize(d)?;
        let v = hex::decode(&s).map_err(serde::de::Error::custom)?;
        v.try_into().map_err(|_| serde::de::Error::custom("expected 32 bytes"))
    }
}
