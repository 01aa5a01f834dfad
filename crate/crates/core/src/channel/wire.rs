use crate::lattice::PublicKey;
use crate::primitives::{Commitment, Opening};
use crate::qsim::{Angle8, BitString};

use super::ChannelError;

/// Types that may be written into a payload. Quantum state types
/// deliberately have no implementation.
pub trait Wire: Sized {
    fn put(&self, w: &mut Writer);
    fn take(r: &mut Reader<'_>) -> Result<Self, ChannelError>;
}

/// Little-endian fixed-width integers, length-prefixed vectors.
#[derive(Default, Debug)]
pub struct Writer(Vec<u8>);

impl Writer {
    pub fn new() -> Self {
        Writer(Vec::new())
    }

    pub fn put<T: Wire>(mut self, v: &T) -> Self {
        v.put(&mut self);
        self
    }

    pub fn raw(&mut self, b: &[u8]) {
        self.0.extend_from_slice(b);
    }

    pub fn finish(self) -> Vec<u8> {
        self.0
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn raw(&mut self, n: usize) -> Result<&'a [u8], ChannelError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| ChannelError::Framing("payload truncated".into()))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    pub fn take<T: Wire>(&mut self) -> Result<T, ChannelError> {
        T::take(self)
    }

    /// Errors unless every byte was consumed.
    pub fn done(self) -> Result<(), ChannelError> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(ChannelError::Framing("trailing payload bytes".into()))
        }
    }
}

/// Decodes a whole payload as one value.
pub fn parse<T: Wire>(b: &[u8]) -> Result<T, ChannelError> {
    let mut r = Reader::new(b);
    let v = r.take()?;
    r.done()?;
    Ok(v)
}

macro_rules! wire_int {
    ($($t:ty),*) => {$(
        impl Wire for $t {
            fn put(&self, w: &mut Writer) {
                w.raw(&self.to_le_bytes());
            }
            fn take(r: &mut Reader<'_>) -> Result<Self, ChannelError> {
                Ok(<$t>::from_le_bytes(r.raw(std::mem::size_of::<$t>())?.try_into().unwrap()))
            }
        }
    )*};
}
wire_int!(u8, u16, u32, u64, i32);

impl Wire for bool {
    fn put(&self, w: &mut Writer) {
        w.raw(&[*self as u8]);
    }
    fn take(r: &mut Reader<'_>) -> Result<Self, ChannelError> {
        match r.raw(1)?[0] {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(ChannelError::Framing("bad bool".into())),
        }
    }
}

impl<const N: usize> Wire for [u8; N] {
    fn put(&self, w: &mut Writer) {
        w.raw(self);
    }
    fn take(r: &mut Reader<'_>) -> Result<Self, ChannelError> {
        Ok(r.raw(N)?.try_into().unwrap())
    }
}

impl<T: Wire> Wire for Vec<T> {
    fn put(&self, w: &mut Writer) {
        (self.len() as u32).put(w);
        for v in self {
            v.put(w);
        }
    }
    fn take(r: &mut Reader<'_>) -> Result<Self, ChannelError> {
        let n = u32::take(r)? as usize;
        if n > r.buf.len() - r.pos {
            return Err(ChannelError::Framing("vector length exceeds payload".into()));
        }
        (0..n).map(|_| T::take(r)).collect()
    }
}

impl Wire for String {
    fn put(&self, w: &mut Writer) {
        self.as_bytes().to_vec().put(w);
    }
    fn take(r: &mut Reader<'_>) -> Result<Self, ChannelError> {
        String::from_utf8(Vec::<u8>::take(r)?).map_err(|_| ChannelError::Framing("bad utf-8".into()))
    }
}

impl Wire for Angle8 {
    fn put(&self, w: &mut Writer) {
        self.value().put(w);
    }
    fn take(r: &mut Reader<'_>) -> Result<Self, ChannelError> {
        Angle8::try_from(u8::take(r)?).map_err(ChannelError::Framing)
    }
}

impl Wire for BitString {
    fn put(&self, w: &mut Writer) {
        (self.len() as u32).put(w);
        w.raw(&self.to_bytes());
    }
    fn take(r: &mut Reader<'_>) -> Result<Self, ChannelError> {
        let len = u32::take(r)? as usize;
        let bytes = r.raw(len.div_ceil(8))?;
        BitString::from_bytes(bytes, len).ok_or_else(|| ChannelError::Framing("non-canonical bits".into()))
    }
}

impl Wire for Commitment {
    fn put(&self, w: &mut Writer) {
        self.0.put(w);
    }
    fn take(r: &mut Reader<'_>) -> Result<Self, ChannelError> {
        Ok(Commitment(r.take()?))
    }
}

impl Wire for Opening {
    fn put(&self, w: &mut Writer) {
        self.0.put(w);
    }
    fn take(r: &mut Reader<'_>) -> Result<Self, ChannelError> {
        Ok(Opening(r.take()?))
    }
}

impl Wire for PublicKey {
    fn put(&self, w: &mut Writer) {
        self.to_bytes().put(w);
    }
    fn take(r: &mut Reader<'_>) -> Result<Self, ChannelError> {
        PublicKey::from_bytes(&Vec::<u8>::take(r)?).map_err(|e| ChannelError::Framing(e.to_string()))
    }
}

macro_rules! wire_tuple {
    ($($n:ident),*) => {
        impl<$($n: Wire),*> Wire for ($($n,)*) {
            #[allow(non_snake_case)]
            fn put(&self, w: &mut Writer) {
                let ($($n,)*) = self;
                $($n.put(w);)*
            }
            fn take(r: &mut Reader<'_>) -> Result<Self, ChannelError> {
                Ok(($(r.take::<$n>()?,)*))
            }
        }
    };
}
wire_tuple!(A, B);
wire_tuple!(A, B, C);
wire_tuple!(A, B, C, D);
wire_tuple!(A, B, C, D, E);
