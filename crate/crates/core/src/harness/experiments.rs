use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{for_each_two_preimage_point, tv_distance, DistributionReport, HarnessError, Law, Method};
use crate::lattice::{gen, Profile};
use crate::primitives::CoinSource;
use crate::protocols::oqfe_delta;
use crate::qsim::XLaw;
use crate::rsp::{quantum_w_law, rsp_alice_decode, rsp_bob_quantum_with, rsp_bob_shortcut, shortcut_w_law, SiblingSource};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaMode {
    Exact,
    Sampling(u64),
}

/// Exact law of δ given b over uniform (θ1, θ2, r_A), or with r_A fixed.
pub fn delta_law(b: bool, forced_mask: Option<bool>) -> Law {
    let mut law = Law::new();
    let masks: &[bool] = match forced_mask {
        Some(false) => &[false],
        Some(true) => &[true],
        None => &[false, true],
    };
    let w = 1.0 / (4.0 * masks.len() as f64);
    for _theta1 in [false, true] {
        for theta2 in [false, true] {
            for &r_a in masks {
                *law.entry(format!("{}", oqfe_delta(b, theta2, r_a).value())).or_insert(0.0) += w;
            }
        }
    }
    law
}

const DELTA_SAMPLING_DEVIATION: f64 = 0.02;

/// Law of δ under b = 0 and b = 1. With `force_mask_zero` the mask r_A is
/// pinned to 0, which shows the leak the mask prevents.
pub fn delta_uniformity_experiment(mode: DeltaMode, force_mask_zero: bool, seed: u64) -> Result<DistributionReport, HarnessError> {
    let forced = force_mask_zero.then_some(false);
    let (laws, method, max_dev) = match mode {
        DeltaMode::Exact => {
            let laws = [delta_law(false, forced), delta_law(true, forced)];
            (laws, Method::ExactEnumeration, None)
        }
        DeltaMode::Sampling(n) => {
            let mut laws = [Law::new(), Law::new()];
            for (bi, law) in laws.iter_mut().enumerate() {
                let mut coins = CoinSource::from_u64(seed, "harness.delta").derive(&bi.to_string());
                let mut counts = BTreeMap::new();
                for _ in 0..n {
                    let theta2 = coins.bit();
                    let r_a = coins.bit() && !force_mask_zero;
                    *counts.entry(oqfe_delta(bi == 1, theta2, r_a).value()).or_insert(0u64) += 1;
                }
                for v in [0u8, 2, 4, 6] {
                    law.insert(v.to_string(), *counts.get(&v).unwrap_or(&0) as f64 / n as f64);
                }
            }
            let dev = laws
                .iter()
                .flat_map(|l| l.values().map(|p| (p - 0.25).abs()))
                .fold(0.0, f64::max);
            (laws, Method::Sampling { n, confidence: 0.999 }, Some(dev))
        }
    };
    let tv = tv_distance(&laws[0], &laws[1])?;
    let mut frequencies = BTreeMap::new();
    for (bi, law) in laws.iter().enumerate() {
        for (k, v) in law {
            frequencies.insert(format!("b{bi}/delta={k}"), *v);
        }
    }
    let mut cases = BTreeMap::from([("tv_b0_b1".to_string(), tv)]);
    let (threshold, pass) = match max_dev {
        Some(d) => {
            cases.insert("max_deviation_from_quarter".into(), d);
            (DELTA_SAMPLING_DEVIATION, d < DELTA_SAMPLING_DEVIATION)
        }
        None => (0.0, tv <= 1e-12),
    };
    Ok(DistributionReport {
        experiment: if force_mask_zero { "delta-uniformity/mask-forced-zero" } else { "delta-uniformity" }.into(),
        profile: "none".into(),
        seed,
        method,
        support_size: 4,
        tv,
        threshold,
        pass,
        frequencies,
        cases,
        claim: "Bob's view of δ carries no information about b".into(),
        scope: "tests only the δ marginal over uniform (θ2, r_A); hiding θ2 given the public key is computational and not tested".into(),
    })
}

/// Exact TV between two laws of a w string whose point probabilities depend
/// only on parities against their masks.
pub fn xlaw_tv(a: &XLaw, b: &XLaw) -> f64 {
    assert_eq!(a.width, b.width, "laws over different widths");
    let mask = |l: &XLaw| (!l.is_uniform()).then(|| l.mask.clone());
    let (ma, mb) = (mask(a), mask(b));
    // relative weight of a point with the given parities, times 2^W
    let weight = |l: &XLaw, odd: bool| {
        if l.is_uniform() {
            1.0
        } else if odd {
            2.0 * (1.0 - l.p_even)
        } else {
            2.0 * l.p_even
        }
    };
    let mut tv = 0.0;
    match (ma, mb) {
        (None, None) => {}
        (Some(m), None) | (None, Some(m)) if !m.is_zero() => {
            for odd in [false, true] {
                tv += 0.5 * (weight(a, odd) - weight(b, odd)).abs();
            }
        }
        (Some(m1), Some(m2)) if m1 == m2 => {
            for odd in [false, true] {
                tv += 0.5 * (weight(a, odd) - weight(b, odd)).abs();
            }
        }
        (Some(_), Some(_)) => {
            for pa in [false, true] {
                for pb in [false, true] {
                    tv += 0.25 * (weight(a, pa) - weight(b, pb)).abs();
                }
            }
        }
        _ => {}
    }
    tv / 2.0
}

const BACKEND_EXACT_TOL: f64 = 1e-12;
const BACKEND_SAMPLING_TV: f64 = 0.03;

/// Transcript law of the quantum and the shortcut Bob. Enumerable profiles
/// compare exactly: both sample y through the same routine, so the TV is
/// the average over two-preimage y of the TV between the w laws. Larger
/// profiles sample `trials` runs of each backend with a trapdoor supplying
/// the sibling preimage and compare the law of (θ1, θ2, w_0).
pub fn backend_equivalence_experiment(profile: Profile, trials: u64, seed: u64) -> Result<DistributionReport, HarnessError> {
    let params = profile.params();
    let root = CoinSource::from_u64(seed, "harness.backend");
    if profile.enumerable() {
        let keys = trials.max(1);
        let mut cases = BTreeMap::new();
        let mut support = 0usize;
        for k in 0..keys {
            let kp = gen(&params, &mut root.derive(&format!("key.{k}")))?;
            let mut sum = 0.0;
            let (_, two) = for_each_two_preimage_point(&kp, |_, x, x2| {
                sum += xlaw_tv(&quantum_w_law(&kp.public, x, x2)?, &shortcut_w_law(&kp.public, x, x2));
                Ok(())
            })?;
            support += two as usize;
            cases.insert(format!("key{k}"), sum / two as f64);
        }
        let tv = cases.values().copied().fold(0.0, f64::max);
        return Ok(DistributionReport {
            experiment: "backend-eq".into(),
            profile: profile.name().into(),
            seed,
            method: Method::ExactEnumeration,
            support_size: support,
            tv,
            threshold: BACKEND_EXACT_TOL,
            pass: tv <= BACKEND_EXACT_TOL,
            frequencies: BTreeMap::new(),
            cases,
            claim: "y is uniform on the image and the measurement string has the same law for both backends".into(),
            scope: format!("exact enumeration of every two-preimage image point for {keys} seeded key(s)"),
        });
    }
    let kp = gen(&params, &mut root.derive("key"))?;
    let src = SiblingSource::Trapdoor(Box::new(kp.clone()));
    let feature = |quantum: bool, i: u64| -> Result<String, HarnessError> {
        let mut coins = root.derive(&format!("{}.{i}", if quantum { "quantum" } else { "shortcut" }));
        let out = if quantum {
            rsp_bob_quantum_with(&kp.public, &src, &mut coins)?
        } else {
            rsp_bob_shortcut(&kp.public, &src, &mut coins)?
        };
        let t = rsp_alice_decode(&kp, &out.y, &out.w)?;
        Ok(format!("{}{}{}", t.theta1 as u8, t.theta2 as u8, out.w.get(0) as u8))
    };
    let mut laws = [Law::new(), Law::new()];
    for (slot, quantum) in [(0, true), (1, false)] {
        let feats: Vec<String> = (0..trials).into_par_iter().map(|i| feature(quantum, i)).collect::<Result<_, _>>()?;
        for f in feats {
            *laws[slot].entry(f).or_insert(0.0) += 1.0 / trials as f64;
        }
    }
    // normalise away rounding in the running sums
    for law in laws.iter_mut() {
        let total: f64 = law.values().sum();
        law.values_mut().for_each(|v| *v /= total);
    }
    let tv = tv_distance(&laws[0], &laws[1])?;
    let mut frequencies = BTreeMap::new();
    for (name, law) in [("quantum", &laws[0]), ("shortcut", &laws[1])] {
        for (k, v) in law {
            frequencies.insert(format!("{name}/{k}"), *v);
        }
    }
    Ok(DistributionReport {
        experiment: "backend-eq".into(),
        profile: profile.name().into(),
        seed,
        method: Method::Sampling { n: trials, confidence: 0.95 },
        support_size: 8,
        tv,
        threshold: BACKEND_SAMPLING_TV,
        pass: tv < BACKEND_SAMPLING_TV,
        frequencies,
        cases: BTreeMap::from([("tv".to_string(), tv)]),
        claim: "y is uniform on the image and the measurement string has the same law for both backends".into(),
        scope: "sampled law of (θ1, θ2, w_0) under one seeded key".into(),
    })
}
