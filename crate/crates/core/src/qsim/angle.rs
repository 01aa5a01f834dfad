use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// An angle in units of π/4, reduced mod 8.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Angle8(u8);

impl Angle8 {
    pub const ZERO: Angle8 = Angle8(0);
    /// π/2.
    pub const QUARTER: Angle8 = Angle8(2);
    /// π.
    pub const HALF: Angle8 = Angle8(4);

    pub fn new(value: i64) -> Self {
        Angle8(value.rem_euclid(8) as u8)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// Multiple of π/2, i.e. an angle reachable with Clifford phases only.
    pub fn is_even(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn radians(self) -> f64 {
        self.0 as f64 * std::f64::consts::FRAC_PI_4
    }

    /// (−1)^flip · self.
    pub fn signed(self, flip: bool) -> Self {
        if flip {
            -self
        } else {
            self
        }
    }

    pub fn all() -> impl Iterator<Item = Angle8> {
        (0..8).map(Angle8)
    }
}

impl Add for Angle8 {
    type Output = Angle8;
    fn add(self, rhs: Angle8) -> Angle8 {
        Angle8((self.0 + rhs.0) % 8)
    }
}

impl Sub for Angle8 {
    type Output = Angle8;
    fn sub(self, rhs: Angle8) -> Angle8 {
        Angle8((self.0 + 8 - rhs.0) % 8)
    }
}

impl Neg for Angle8 {
    type Output = Angle8;
    fn neg(self) -> Angle8 {
        Angle8((8 - self.0) % 8)
    }
}

impl TryFrom<u8> for Angle8 {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        if v < 8 {
            Ok(Angle8(v))
        } else {
            Err(format!("angle {v} outside 0..8"))
        }
    }
}

impl From<Angle8> for u8 {
    fn from(a: Angle8) -> u8 {
        a.0
    }
}

impl fmt::Display for Angle8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}π/4", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_wraps() {
        assert_eq!(Angle8::new(7) + Angle8::new(3), Angle8::new(2));
        assert_eq!(-Angle8::new(2), Angle8::new(6));
        assert_eq!(Angle8::new(1) - Angle8::new(3), Angle8::new(6));
        assert_eq!(Angle8::new(-1), Angle8::new(7));
        assert_eq!(Angle8::new(1).signed(true), Angle8::new(7));
    }

    #[test]
    fn serde_rejects_out_of_range() {
        assert!(serde_json::from_str::<Angle8>("8").is_err());
        assert_eq!(serde_json::from_str::<Angle8>("5").unwrap(), Angle8::new(5));
    }
}
