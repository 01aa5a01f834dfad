use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{eval_f, LatticeError, LatticeParams, Preimage, PublicKey};

/// Calls `f` on every domain point, in a fixed order.
pub fn for_each_domain_point(p: &LatticeParams, mut f: impl FnMut(&Preimage)) -> Result<(), LatticeError> {
    let size = p.domain_size().filter(|&s| s <= 1 << 26).ok_or(LatticeError::SearchInfeasible)?;
    let span = 2 * p.sigma as u64 + 1;
    let mut z = Preimage::zero(p);
    for idx in 0..size {
        let mut t = idx;
        z.c = t & 1 == 1;
        t >>= 1;
        z.d = t & 1 == 1;
        t >>= 1;
        for v in z.e.iter_mut() {
            *v = (t % span) as i32 - p.sigma as i32;
            t /= span;
        }
        for v in z.s.iter_mut() {
            *v = (t % p.q as u64) as u32;
            t /= p.q as u64;
        }
        f(&z);
    }
    Ok(())
}

/// Packs an image vector into a u64 key (requires m·log2 q ≤ 64).
pub fn pack_image(p: &LatticeParams, y: &[u32]) -> Option<u64> {
    if p.m * p.log_q() > 64 {
        return None;
    }
    Some(y.iter().rev().fold(0u64, |acc, &v| (acc << p.log_q()) | v as u64))
}

pub fn unpack_image(p: &LatticeParams, mut key: u64) -> Vec<u32> {
    let mask = (1u64 << p.log_q()) - 1;
    (0..p.m)
        .map(|_| {
            let v = (key & mask) as u32;
            key >>= p.log_q();
            v
        })
        .collect()
}

/// Number of preimages of every image point, keyed by packed image.
pub fn image_census(pk: &PublicKey) -> Result<HashMap<u64, u32>, LatticeError> {
    let p = &pk.params;
    if pack_image(p, &vec![0; p.m]).is_none() {
        return Err(LatticeError::SearchInfeasible);
    }
    let mut map: HashMap<u64, u32> = HashMap::with_capacity(p.domain_size().unwrap_or(0) as usize);
    for_each_domain_point(p, |z| {
        let y = eval_f(pk, z).expect("domain point");
        *map.entry(pack_image(p, &y).unwrap()).or_default() += 1;
    })?;
    Ok(map)
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub domain_size: u64,
    pub image_size: u64,
    /// preimage count -> number of image points with that count
    pub histogram: BTreeMap<u32, u64>,
    pub non_two_fraction: f64,
}

/// Exhaustive count of how many image points have exactly two preimages.
pub fn regularity(pk: &PublicKey) -> Result<RegularityReport, LatticeError> {
    let census = image_census(pk)?;
    let mut histogram = BTreeMap::new();
    for &c in census.values() {
        *histogram.entry(c).or_insert(0u64) += 1;
    }
    let image_size = census.len() as u64;
    let two = histogram.get(&2).copied().unwrap_or(0);
    Ok(RegularityReport {
        domain_size: pk.params.domain_size().unwrap_or(0),
        image_size,
        histogram,
        non_two_fraction: (image_size - two) as f64 / image_size as f64,
    })
}
