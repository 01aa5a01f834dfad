use super::ProtocolError;
use crate::channel::{parse, Endpoint, Writer};
use crate::primitives::{mac_tag, mac_verify, otp_decrypt, CipherSession, MacKey, MacTag, SymKey};

pub const MSG_ENC_B: &str = "out.encb";

const NONCE: &[u8] = b"out.encb";

/// Two-output classical function given by its table, indexed by
/// x_a | x_b << a_bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    pub a_bits: usize,
    pub b_bits: usize,
    pub y_a: Vec<Vec<u8>>,
    pub y_b: Vec<Vec<u8>>,
}

impl TruthTable {
    pub fn from_fn(a_bits: usize, b_bits: usize, f: impl Fn(u64, u64) -> (Vec<u8>, Vec<u8>)) -> Self {
        let (mut y_a, mut y_b) = (Vec::new(), Vec::new());
        for idx in 0..1u64 << (a_bits + b_bits) {
            let (a, b) = f(idx & ((1 << a_bits) - 1), idx >> a_bits);
            y_a.push(a);
            y_b.push(b);
        }
        TruthTable { a_bits, b_bits, y_a, y_b }
    }

    pub fn eval(&self, x_a: u64, x_b: u64) -> Result<(&[u8], &[u8]), ProtocolError> {
        if x_a >> self.a_bits != 0 || x_b >> self.b_bits != 0 {
            return Err(ProtocolError::Input("input outside the table".into()));
        }
        let idx = (x_a | x_b << self.a_bits) as usize;
        Ok((&self.y_a[idx], &self.y_b[idx]))
    }
}

/// Bob's extra classical input: MAC key k1 and encryption key k2.
#[derive(Clone, Debug)]
pub struct DeliveryKeys {
    pub k1: MacKey,
    pub k2: SymKey,
}

/// Output of the extended function: Alice's part in clear, Bob's part
/// encrypted and authenticated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wrapped {
    /// Ciphertext followed by its 16-byte tag.
    pub enc_b: Vec<u8>,
    pub y_a: Vec<u8>,
}

/// f̃(x_a, (x_b, k1, k2)) = (Enc_B, y_A) with Enc_B = c ‖ MAC_k1(c) and
/// c = y_B ⊕ PRG(k2).
pub fn wrapped_eval(table: &TruthTable, x_a: u64, x_b: u64, keys: &DeliveryKeys) -> Result<Wrapped, ProtocolError> {
    let (y_a, y_b) = table.eval(x_a, x_b)?;
    let mut c = CipherSession::new(keys.k2)
        .encrypt(NONCE, y_b)
        .map_err(|e| ProtocolError::Input(e.to_string()))?;
    let tag = mac_tag(&keys.k1, &c);
    c.extend_from_slice(&tag);
    Ok(Wrapped {
        enc_b: c,
        y_a: y_a.to_vec(),
    })
}

/// Alice forwards Enc_B (optionally flipping one bit) and keeps y_A.
pub fn delivery_alice(ep: &mut Endpoint, wrapped: &Wrapped, flip_bit: Option<usize>) -> Result<Vec<u8>, ProtocolError> {
    let mut enc = wrapped.enc_b.clone();
    if let Some(k) = flip_bit {
        if k / 8 < enc.len() {
            enc[k / 8] ^= 1 << (k % 8);
        }
    }
    ep.send(MSG_ENC_B, Writer::new().put(&enc).finish())?;
    Ok(wrapped.y_a.clone())
}

/// Bob's y_B, or `None` when the tag does not verify.
pub fn delivery_bob(ep: &mut Endpoint, keys: &DeliveryKeys) -> Result<Option<Vec<u8>>, ProtocolError> {
    let enc: Vec<u8> = parse(&ep.expect(MSG_ENC_B)?)?;
    if enc.len() < 16 {
        return Ok(None);
    }
    let (c, tag) = enc.split_at(enc.len() - 16);
    let tag: MacTag = tag.try_into().expect("16 bytes");
    if !mac_verify(&keys.k1, c, &tag) {
        return Ok(None);
    }
    Ok(Some(otp_decrypt(&keys.k2, NONCE, c)))
}
