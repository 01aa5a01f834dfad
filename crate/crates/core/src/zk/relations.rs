use serde::Serialize;

use super::Relation;
use crate::lattice::{gen, LatticeParams, PublicKey};
use crate::primitives::{verify_commitment, CoinSource, Commitment, Opening};

/// Commitment opening: statement com, witness (dec, msg).
pub struct CommitOpening;

impl Relation for CommitOpening {
    type Statement = Commitment;
    type Witness = (Opening, Vec<u8>);

    fn name(&self) -> &'static str {
        "rel.open"
    }

    fn holds(&self, com: &Commitment, (dec, msg): &(Opening, Vec<u8>)) -> bool {
        verify_commitment(com, dec, msg)
    }
}

/// The public key was generated from coins r_A ⊕ r_B, with r_A the value
/// committed in com_f.
pub struct KeyDerivation {
    pub params: LatticeParams,
}

#[derive(Clone, Debug, Serialize)]
pub struct KeyDerivationStatement {
    pub com_f: Commitment,
    pub r_b: [u8; 32],
    pub key: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyDerivationWitness {
    pub r_a: [u8; 32],
    pub dec_f: Opening,
}

/// Coins used to generate a key from the two shares.
pub fn key_coins(r_a: &[u8; 32], r_b: &[u8; 32]) -> CoinSource {
    let mut r = [0u8; 32];
    for i in 0..32 {
        r[i] = r_a[i] ^ r_b[i];
    }
    CoinSource::new(r, "lattice.gen")
}

impl Relation for KeyDerivation {
    type Statement = KeyDerivationStatement;
    type Witness = KeyDerivationWitness;

    fn name(&self) -> &'static str {
        "rel.keygen"
    }

    fn holds(&self, x: &KeyDerivationStatement, w: &KeyDerivationWitness) -> bool {
        if !verify_commitment(&x.com_f, &w.dec_f, &w.r_a) {
            return false;
        }
        let Ok(pk) = PublicKey::from_bytes(&x.key) else {
            return false;
        };
        match gen(&self.params, &mut key_coins(&w.r_a, &x.r_b)) {
            Ok(kp) => kp.public == pk,
            Err(_) => false,
        }
    }
}
