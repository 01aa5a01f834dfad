use std::collections::BTreeMap;

use serde::Serialize;

use super::HarnessError;

pub type Law = BTreeMap<String, f64>;

const SUM_TOL: f64 = 1e-9;

fn check_law(name: &str, law: &Law) -> Result<(), HarnessError> {
    if let Some((k, v)) = law.iter().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
        return Err(HarnessError::NotADistribution(format!("{name}[{k}] = {v}")));
    }
    let total: f64 = law.values().sum();
    if (total - 1.0).abs() > SUM_TOL {
        return Err(HarnessError::NotADistribution(format!("{name} sums to {total}")));
    }
    Ok(())
}

/// ½·Σ|pA − pB| over the union of supports; points missing from one law
/// have probability 0 there.
pub fn tv_distance(a: &Law, b: &Law) -> Result<f64, HarnessError> {
    check_law("a", a)?;
    check_law("b", b)?;
    let mut sum = 0.0;
    for (k, pa) in a {
        sum += (pa - b.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, pb) in b {
        if !a.contains_key(k) {
            sum += pb;
        }
    }
    Ok((sum / 2.0).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Method {
    ExactEnumeration,
    Sampling { n: u64, confidence: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct DistributionReport {
    pub experiment: String,
    pub profile: String,
    pub seed: u64,
    pub method: Method,
    pub support_size: usize,
    pub tv: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Per-point frequencies (or probabilities in exact mode).
    pub frequencies: BTreeMap<String, f64>,
    /// Per-case values behind `tv`.
    pub cases: BTreeMap<String, f64>,
    /// The asymptotic statement the desk-scale value stands in for.
    pub claim: String,
    pub scope: String,
}

impl DistributionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}
