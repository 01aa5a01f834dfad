use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::LatticeError;

/// Dimensions, modulus and error-box radii of the trapdoor function family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeParams {
    pub n: usize,
    pub m: usize,
    pub q: u32,
    pub sigma0: u32,
    pub sigma: u32,
}

impl LatticeParams {
    pub fn validate(&self) -> Result<(), LatticeError> {
        let bad = |why: &str| Err(LatticeError::InvalidParams(why.to_string()));
        if self.n == 0 || self.m == 0 || self.sigma0 == 0 {
            return bad("all fields must be positive");
        }
        if self.q < 8 || !self.q.is_power_of_two() {
            return bad("q must be a power of two, at least 8");
        }
        if self.m <= self.n * self.log_q() {
            return bad("m must exceed n·log2(q) to leave gadget slack");
        }
        if self.sigma0 >= self.sigma || 8 * self.sigma >= self.q {
            return bad("need sigma0 < sigma < q/8");
        }
        // gadget decoding sees e_bot − Rᵀe_top, bounded by (m̄+1)·sigma
        if 4 * (self.m_bar() as u64 + 1) * self.sigma as u64 >= self.q as u64 {
            return bad("need (m - n·log2 q + 1)·sigma < q/4 for decoding");
        }
        Ok(())
    }

    pub fn log_q(&self) -> usize {
        self.q.trailing_zeros() as usize
    }

    /// Rows of the uniform block Ā.
    pub fn m_bar(&self) -> usize {
        self.m - self.n * self.log_q()
    }

    /// Bits per offset-encoded error coordinate.
    pub fn e_bits(&self) -> usize {
        let span = 2 * self.sigma as u64 + 1;
        (64 - (span - 1).leading_zeros()) as usize
    }

    /// Width of encode(z).
    pub fn preimage_width(&self) -> usize {
        self.n * self.log_q() + self.m * self.e_bits() + 2
    }

    /// Number of (s, e, c, d) points, if it fits in a u64.
    pub fn domain_size(&self) -> Option<u64> {
        let s = (self.q as u64).checked_pow(self.n as u32)?;
        let e = (2 * self.sigma as u64 + 1).checked_pow(self.m as u32)?;
        s.checked_mul(e)?.checked_mul(4)
    }

    pub fn half_q(&self) -> u32 {
        self.q / 2
    }

    /// Centered representative in (−q/2, q/2].
    pub fn center(&self, v: u32) -> i64 {
        let v = v as i64 % self.q as i64;
        if v > self.q as i64 / 2 {
            v - self.q as i64
        } else {
            v
        }
    }

    pub fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.q as i64) as u32
    }
}

/// Preset parameter sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Tiny,
    Small,
    Demo,
}

impl Profile {
    pub const ALL: [Profile; 3] = [Profile::Tiny, Profile::Small, Profile::Demo];

    pub fn params(self) -> LatticeParams {
        match self {
            Profile::Tiny => LatticeParams {
                n: 1,
                m: 6,
                q: 32,
                sigma0: 1,
                sigma: 2,
            },
            Profile::Small => LatticeParams {
                n: 2,
                m: 18,
                q: 256,
                sigma0: 1,
                sigma: 4,
            },
            Profile::Demo => LatticeParams {
                n: 4,
                m: 64,
                q: 4096,
                sigma0: 4,
                sigma: 32,
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Profile::Tiny => "tiny",
            Profile::Small => "small",
            Profile::Demo => "demo",
        }
    }

    /// Whole domain can be enumerated for exact laws.
    pub fn enumerable(self) -> bool {
        self == Profile::Tiny
    }

    /// Honest Bob can find both preimages of y by search over (s, c, d).
    pub fn searchable(self) -> bool {
        self != Profile::Demo
    }

    /// The simulated quantum Bob is supported.
    pub fn quantum_bob(self) -> bool {
        self == Profile::Tiny
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Profile {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tiny" => Ok(Profile::Tiny),
            "small" => Ok(Profile::Small),
            "demo" => Ok(Profile::Demo),
            other => Err(LatticeError::InvalidParams(format!("unknown profile {other}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_are_valid() {
        for p in Profile::ALL {
            p.params().validate().unwrap();
        }
        assert_eq!(Profile::Tiny.params().preimage_width(), 25);
        assert_eq!(Profile::Tiny.params().domain_size(), Some(2_000_000));
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = Profile::Tiny.params();
        p.q = 24;
        assert!(p.validate().is_err());
        let mut p = Profile::Tiny.params();
        p.sigma = 1;
        assert!(p.validate().is_err());
        let mut p = Profile::Tiny.params();
        p.m = 5;
        assert!(p.validate().is_err());
    }

    #[test]
    fn e_bits_cover_box() {
        let mut p = Profile::Tiny.params();
        for (sigma, bits) in [(1, 2), (2, 3), (3, 3), (4, 4), (32, 7)] {
            p.sigma = sigma;
            assert_eq!(p.e_bits(), bits);
        }
    }
}
