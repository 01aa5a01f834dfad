use super::PrimitiveError;

const P: u64 = (1 << 61) - 1;

/// One-time key: (r1, s1, r2, s2), 16 bytes each, reduced mod 2^61 − 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MacKey(pub [u8; 64]);

pub type MacTag = [u8; 16];

impl MacKey {
    pub fn from_slice(b: &[u8]) -> Result<Self, PrimitiveError> {
        b.try_into().map(MacKey).map_err(|_| PrimitiveError::KeyLength {
            expected: 64,
            got: b.len(),
        })
    }

    fn part(&self, i: usize) -> u64 {
        let v = u128::from_le_bytes(self.0[16 * i..16 * i + 16].try_into().unwrap());
        (v % P as u128) as u64
    }
}

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn add(a: u64, b: u64) -> u64 {
    (a + b) % P
}

/// 7-byte blocks, each with a length marker bit just above its data, so
/// messages differing only in trailing zeros get different blocks.
fn blocks(msg: &[u8]) -> impl Iterator<Item = u64> + '_ {
    msg.chunks(7).map(|c| {
        let mut v = 0u64;
        for (i, &b) in c.iter().enumerate() {
            v |= (b as u64) << (8 * i);
        }
        v | (1u64 << (8 * c.len()))
    })
}

fn poly(r: u64, s: u64, msg: &[u8]) -> u64 {
    let acc = blocks(msg).fold(0u64, |acc, m| mul(add(acc, m), r));
    add(acc, s)
}

/// Two independent Carter–Wegman polynomial evaluations over GF(2^61 − 1).
pub fn mac_tag(key: &MacKey, msg: &[u8]) -> MacTag {
    let mut out = [0u8; 16];
    out[..8].copy_from_slice(&poly(key.part(0), key.part(1), msg).to_le_bytes());
    out[8..].copy_from_slice(&poly(key.part(2), key.part(3), msg).to_le_bytes());
    out
}

pub fn mac_verify(key: &MacKey, msg: &[u8], tag: &MacTag) -> bool {
    let want = mac_tag(key, msg);
    want.iter().zip(tag).fold(0u8, |d, (a, b)| d | (a ^ b)) == 0
}
