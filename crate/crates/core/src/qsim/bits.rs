use std::fmt;

/// Fixed-width bit string, bit 0 first.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut out = BitString::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            out.set(i, b);
        }
        out
    }

    /// Low `len` bits of `value`.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mut out = BitString::zeros(len);
        if len > 0 {
            let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
            out.words[0] = value & mask;
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let m = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let v = self.get(i);
        self.set(i, !v);
    }

    pub fn push(&mut self, v: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, v);
    }

    /// Appends the low `width` bits of `value`, least significant first.
    pub fn push_uint(&mut self, value: u64, width: usize) {
        for k in 0..width {
            self.push(k < 64 && (value >> k) & 1 == 1);
        }
    }

    pub fn read_uint(&self, start: usize, width: usize) -> u64 {
        (0..width).fold(0u64, |acc, k| acc | ((self.get(start + k) as u64) << k))
    }

    pub fn xor(&self, other: &BitString) -> BitString {
        assert_eq!(self.len, other.len, "xor of unequal widths");
        BitString {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
            len: self.len,
        }
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BitString) -> bool {
        assert_eq!(self.len, other.len, "dot of unequal widths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Copy with bit `i` removed; later bits shift down by one.
    pub fn without(&self, i: usize) -> BitString {
        let mut out = BitString::zeros(0);
        for k in 0..self.len {
            if k != i {
                out.push(self.get(k));
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Packed little-endian bytes, `ceil(len/8)` long.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for i in self.ones() {
            out[i / 8] |= 1 << (i % 8);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Option<BitString> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        let mut out = BitString::zeros(len);
        for i in 0..len {
            out.set(i, (bytes[i / 8] >> (i % 8)) & 1 == 1);
        }
        // trailing padding must be zero so the encoding is canonical
        if out.to_bytes() != bytes {
            return None;
        }
        Some(out)
    }

    /// Value as an integer when it fits (bit 0 least significant).
    pub fn as_u64(&self) -> Option<u64> {
        (self.len <= 64).then(|| self.words.first().copied().unwrap_or(0))
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(")?;
        for b in self.iter() {
            write!(f, "{}", b as u8)?;
        }
        write!(f, ")")
    }
}
