use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{LatticeError, LatticeParams};
use crate::primitives::CoinSource;
use crate::qsim::BitString;

/// Domain element z = (s, e, c, d).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Preimage {
    pub s: Vec<u32>,
    pub e: Vec<i32>,
    pub c: bool,
    pub d: bool,
}

/// k = (K′, y0); K′ is m×n, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicKey {
    pub params: LatticeParams,
    pub k: Vec<u32>,
    pub y0: Vec<u32>,
}

/// Gadget trapdoor R ∈ {−1,0,1}^{m̄×nk} (row-major) and z0 = (s0, e0, d0).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trapdoor {
    pub r: Vec<i8>,
    pub s0: Vec<u32>,
    pub e0: Vec<i32>,
    pub d0: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapdoorKeypair {
    pub public: PublicKey,
    pub trapdoor: Trapdoor,
    pub hp: bool,
}

impl Preimage {
    pub fn zero(p: &LatticeParams) -> Preimage {
        Preimage {
            s: vec![0; p.n],
            e: vec![0; p.m],
            c: false,
            d: false,
        }
    }

    pub fn check(&self, p: &LatticeParams) -> Result<(), LatticeError> {
        if self.s.len() != p.n || self.e.len() != p.m {
            return Err(LatticeError::Dimension);
        }
        if self.s.iter().any(|&v| v >= p.q) {
            return Err(LatticeError::OutOfRange("s"));
        }
        if self.e.iter().any(|v| v.unsigned_abs() > p.sigma) {
            return Err(LatticeError::OutOfRange("e"));
        }
        Ok(())
    }

    /// Uniform point of the domain.
    pub fn sample<R: RngCore + ?Sized>(p: &LatticeParams, rng: &mut R) -> Preimage {
        use rand::Rng;
        let sig = p.sigma as i32;
        Preimage {
            s: (0..p.n).map(|_| rng.gen_range(0..p.q)).collect(),
            e: (0..p.m).map(|_| rng.gen_range(-sig..=sig)).collect(),
            c: rng.gen(),
            d: rng.gen(),
        }
    }
}

/// Bits: s limbs (log2 q bits each, least significant first), then each e
/// coordinate as e + sigma in e_bits bits, then c, then d.
pub fn encode(p: &LatticeParams, z: &Preimage) -> BitString {
    let mut out = BitString::zeros(0);
    for &v in &z.s {
        out.push_uint(v as u64, p.log_q());
    }
    for &v in &z.e {
        out.push_uint((v + p.sigma as i32) as u64, p.e_bits());
    }
    out.push(z.c);
    out.push(z.d);
    out
}

pub fn decode(p: &LatticeParams, bits: &BitString) -> Result<Preimage, LatticeError> {
    if bits.len() != p.preimage_width() {
        return Err(LatticeError::Dimension);
    }
    let lq = p.log_q();
    let eb = p.e_bits();
    let s = (0..p.n).map(|i| bits.read_uint(i * lq, lq) as u32).collect();
    let base = p.n * lq;
    let e = (0..p.m)
        .map(|i| bits.read_uint(base + i * eb, eb) as i32 - p.sigma as i32)
        .collect();
    let z = Preimage {
        s,
        e,
        c: bits.get(bits.len() - 2),
        d: bits.get(bits.len() - 1),
    };
    z.check(p)?;
    Ok(z)
}

/// The hardcore bit h(s, e, c, d) = d.
pub fn hardcore(z: &Preimage) -> bool {
    z.d
}

impl PublicKey {
    fn row(&self, i: usize) -> &[u32] {
        &self.k[i * self.params.n..(i + 1) * self.params.n]
    }

    /// K′·s mod q.
    fn ks(&self, s: &[u32]) -> Vec<u32> {
        let p = &self.params;
        (0..p.m)
            .map(|i| {
                let acc = self.row(i).iter().zip(s).fold(0u64, |a, (&k, &v)| a + k as u64 * v as u64);
                (acc % p.q as u64) as u32
            })
            .collect()
    }

    /// Little-endian u32 layout: n, m, q, sigma0, sigma, K′ row-major, y0.
    pub fn to_bytes(&self) -> Vec<u8> {
        let p = &self.params;
        let mut out = Vec::with_capacity(4 * (5 + self.k.len() + self.y0.len()));
        for v in [p.n as u32, p.m as u32, p.q, p.sigma0, p.sigma] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for &v in self.k.iter().chain(&self.y0) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(b: &[u8]) -> Result<PublicKey, LatticeError> {
        let word = |i: usize| -> Result<u32, LatticeError> {
            b.get(4 * i..4 * i + 4)
                .map(|w| u32::from_le_bytes(w.try_into().unwrap()))
                .ok_or(LatticeError::Malformed)
        };
        let params = LatticeParams {
            n: word(0)? as usize,
            m: word(1)? as usize,
            q: word(2)?,
            sigma0: word(3)?,
            sigma: word(4)?,
        };
        params.validate()?;
        let total = 5 + params.m * params.n + params.m;
        if b.len() != 4 * total {
            return Err(LatticeError::Malformed);
        }
        let vals: Vec<u32> = (5..total).map(word).collect::<Result<_, _>>()?;
        if vals.iter().any(|&v| v >= params.q) {
            return Err(LatticeError::Malformed);
        }
        let (k, y0) = vals.split_at(params.m * params.n);
        Ok(PublicKey {
            params,
            k: k.to_vec(),
            y0: y0.to_vec(),
        })
    }
}

/// f_k(s, e, c, d) = K′s + e + c·y0 + d·(q/2)·u mod q, u the first unit vector.
pub fn eval_f(pk: &PublicKey, z: &Preimage) -> Result<Vec<u32>, LatticeError> {
    let p = &pk.params;
    z.check(p)?;
    let mut y = pk.ks(&z.s);
    for i in 0..p.m {
        let mut v = y[i] as i64 + z.e[i] as i64;
        if z.c {
            v += pk.y0[i] as i64;
        }
        if z.d && i == 0 {
            v += p.half_q() as i64;
        }
        y[i] = p.reduce(v);
    }
    Ok(y)
}

/// Gen: K′ = [Ā ; RᵀĀ + Gᵀ], y0 = f(s0, e0, 0, d0), hp = d0. When the
/// domain of s is small enough, keys on which the underlying injective
/// function collides are rejected and redrawn.
pub fn gen(p: &LatticeParams, coins: &mut CoinSource) -> Result<TrapdoorKeypair, LatticeError> {
    p.validate()?;
    for _ in 0..1000 {
        let kp = gen_once(p, coins);
        match injectivity_margin(&kp.public) {
            Some(margin) if margin <= 2 * p.sigma as i64 => continue,
            _ => return Ok(kp),
        }
    }
    Err(LatticeError::InvalidParams("no injective key found in 1000 draws".into()))
}

fn gen_once(p: &LatticeParams, coins: &mut CoinSource) -> TrapdoorKeypair {
    use rand::Rng;
    let (n, m, mb, lq) = (p.n, p.m, p.m_bar(), p.log_q());
    let nk = n * lq;
    let abar: Vec<u32> = (0..mb * n).map(|_| coins.gen_range(0..p.q)).collect();
    let r: Vec<i8> = (0..mb * nk).map(|_| coins.gen_range(-1i8..=1)).collect();
    let mut k = abar.clone();
    for row in 0..nk {
        let (i, j) = (row / lq, row % lq);
        for col in 0..n {
            let mut v: i64 = (0..mb).map(|t| r[t * nk + row] as i64 * abar[t * n + col] as i64).sum();
            if col == i {
                v += 1i64 << j;
            }
            k.push(p.reduce(v));
        }
    }
    let sig0 = p.sigma0 as i32;
    let s0: Vec<u32> = (0..n).map(|_| coins.gen_range(0..p.q)).collect();
    let e0: Vec<i32> = (0..m).map(|_| coins.gen_range(-sig0..=sig0)).collect();
    let d0: bool = coins.gen();
    let mut public = PublicKey {
        params: *p,
        k,
        y0: vec![0; m],
    };
    let z0 = Preimage {
        s: s0.clone(),
        e: e0.clone(),
        c: false,
        d: d0,
    };
    // e0 lies in the sigma0 box, which is inside the sigma box
    public.y0 = eval_f(&public, &z0).expect("z0 in domain");
    TrapdoorKeypair {
        public,
        trapdoor: Trapdoor { r, s0, e0, d0 },
        hp: d0,
    }
}

/// min ‖K′Δs + Δd·(q/2)u‖∞ over nonzero (Δs, Δd), or `None` when Z_q^n is
/// too large to scan. The injective part g is injective iff this exceeds 2σ.
pub fn injectivity_margin(pk: &PublicKey) -> Option<i64> {
    let p = &pk.params;
    let count = (p.q as u64).checked_pow(p.n as u32).filter(|&c| c <= 1 << 20)?;
    let mut best = i64::MAX;
    let mut ds = vec![0u32; p.n];
    for idx in 0..count {
        let mut t = idx;
        for v in ds.iter_mut() {
            *v = (t % p.q as u64) as u32;
            t /= p.q as u64;
        }
        let ks = pk.ks(&ds);
        for dd in [false, true] {
            if idx == 0 && !dd {
                continue;
            }
            let norm = ks
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let v = if dd && i == 0 { v + p.half_q() } else { v };
                    p.center(v % p.q).abs()
                })
                .max()
                .unwrap_or(0);
            best = best.min(norm);
        }
    }
    Some(best)
}

impl TrapdoorKeypair {
    /// z0 as a preimage (c = 0).
    pub fn z0(&self) -> Preimage {
        Preimage {
            s: self.trapdoor.s0.clone(),
            e: self.trapdoor.e0.clone(),
            c: false,
            d: self.trapdoor.d0,
        }
    }

    /// Both preimages of y, the c = 0 one first.
    pub fn invert(&self, y: &[u32]) -> Result<(Preimage, Preimage), LatticeError> {
        let all = self.preimages(y)?;
        match all.as_slice() {
            [a, b] if !a.c && b.c => Ok((a.clone(), b.clone())),
            [] => Err(LatticeError::NotInImage),
            other => Err(LatticeError::PreimageCount(other.len())),
        }
    }

    /// Every preimage of y within the error box, via gadget decoding of each
    /// (c, d) shift.
    pub fn preimages(&self, y: &[u32]) -> Result<Vec<Preimage>, LatticeError> {
        let pk = &self.public;
        let p = &pk.params;
        if y.len() != p.m {
            return Err(LatticeError::Dimension);
        }
        let mut out = Vec::new();
        for c in [false, true] {
            for d in [false, true] {
                let shifted: Vec<u32> = (0..p.m)
                    .map(|i| {
                        let mut v = y[i] as i64;
                        if c {
                            v -= pk.y0[i] as i64;
                        }
                        if d && i == 0 {
                            v -= p.half_q() as i64;
                        }
                        p.reduce(v)
                    })
                    .collect();
                let s = self.gadget_decode(&shifted);
                let ks = pk.ks(&s);
                let e: Vec<i64> = (0..p.m).map(|i| p.center(p.reduce(shifted[i] as i64 - ks[i] as i64))).collect();
                if e.iter().all(|v| v.unsigned_abs() <= p.sigma as u64) {
                    out.push(Preimage {
                        s,
                        e: e.into_iter().map(|v| v as i32).collect(),
                        c,
                        d,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Recovers s from v = K′s + e using the gadget rows: the bottom block
    /// minus Rᵀ·top equals Gᵀs plus a small error.
    fn gadget_decode(&self, v: &[u32]) -> Vec<u32> {
        let p = &self.public.params;
        let (n, mb, lq) = (p.n, p.m_bar(), p.log_q());
        let nk = n * lq;
        let r = &self.trapdoor.r;
        let g: Vec<i64> = (0..nk)
            .map(|row| {
                let corr: i64 = (0..mb).map(|t| r[t * nk + row] as i64 * v[t] as i64).sum();
                p.reduce(v[mb + row] as i64 - corr) as i64
            })
            .collect();
        (0..n)
            .map(|i| {
                let mut low = 0u64;
                for t in 0..lq {
                    // row j = lq−1−t holds 2^j·s_i, whose residue depends on bits 0..=t
                    let j = lq - 1 - t;
                    let rem = p.reduce(g[i * lq + j] - ((low << j) as i64));
                    if p.center(rem).abs() > p.q as i64 / 4 {
                        low |= 1 << t;
                    }
                }
                low as u32
            })
            .collect()
    }
}

/// All preimages of y by search over (s, c, d), solving for e. Needs no
/// trapdoor; feasible only while q^n is small.
pub fn search_preimages(pk: &PublicKey, y: &[u32]) -> Result<Vec<Preimage>, LatticeError> {
    let p = &pk.params;
    if y.len() != p.m {
        return Err(LatticeError::Dimension);
    }
    let count = (p.q as u64)
        .checked_pow(p.n as u32)
        .filter(|&c| c <= 1 << 20)
        .ok_or(LatticeError::SearchInfeasible)?;
    let mut out = Vec::new();
    let mut s = vec![0u32; p.n];
    for idx in 0..count {
        let mut t = idx;
        for v in s.iter_mut() {
            *v = (t % p.q as u64) as u32;
            t /= p.q as u64;
        }
        let ks = pk.ks(&s);
        for c in [false, true] {
            for d in [false, true] {
                let mut e = Vec::with_capacity(p.m);
                for i in 0..p.m {
                    let mut v = y[i] as i64 - ks[i] as i64;
                    if c {
                        v -= pk.y0[i] as i64;
                    }
                    if d && i == 0 {
                        v -= p.half_q() as i64;
                    }
                    let ev = p.center(p.reduce(v));
                    if ev.unsigned_abs() > p.sigma as u64 {
                        break;
                    }
                    e.push(ev as i32);
                }
                if e.len() == p.m {
                    out.push(Preimage { s: s.clone(), e, c, d });
                }
            }
        }
    }
    out.sort_by_key(|z| (z.c, z.d));
    Ok(out)
}
