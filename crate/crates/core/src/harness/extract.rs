use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::HarnessError;
use crate::channel::{parse, Message};
use crate::lattice::{gen, LatticeParams, Profile, PublicKey};
use crate::primitives::{verify_commitment, CoinSource, Commitment};
use crate::protocols::{
    oqfe_mal_alice, oqfe_mal_bob, run_pair, AliceStrategy, BobStrategy, OqfeAliceConfig, OqfeBobConfig, MSG_COIN, MSG_COMMIT,
    MSG_DELTA,
};
use crate::qsim::{Angle8, StateVector};
use crate::rsp::{BobBackend, MSG_KEY};
use crate::zk::{key_coins, IdealZk, KeyDerivation, KeyDerivationStatement};

/// b* = ((δ/2 − θ2) mod 4) mod 2, δ in units of π/4.
pub fn extract_b(delta: Angle8, theta2: bool) -> bool {
    (delta.value() as i64 / 2 - theta2 as i64).rem_euclid(4) % 2 == 1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extraction {
    Input(bool),
    /// The run is evidence of a cheating Alice.
    Flagged(String),
}

fn find<'a>(log: &'a [Message], ty: &'static str) -> Result<&'a Message, HarnessError> {
    log.iter().find(|m| m.msg_type == ty).ok_or(HarnessError::MissingMessage(ty))
}

/// Extractor for the malicious-Alice protocol, acting as Bob on a session
/// that reached δ: pulls (r_A, dec_f) out of the key proof, re-derives the
/// key from r_A ⊕ r_B and reads b off δ.
pub fn extract_malicious_alice(zk: &IdealZk, params: &LatticeParams, log: &[Message]) -> Result<Extraction, HarnessError> {
    let com_f: Commitment = parse(&find(log, MSG_COMMIT)?.payload)?;
    let r_b: [u8; 32] = parse(&find(log, MSG_COIN)?.payload)?;
    let key: PublicKey = parse(&find(log, MSG_KEY)?.payload)?;
    let delta: Angle8 = parse(&find(log, MSG_DELTA)?.payload)?;
    let stmt = KeyDerivationStatement {
        com_f,
        r_b,
        key: key.to_bytes(),
    };
    let Ok(w) = zk.extract(&KeyDerivation { params: *params }, &stmt) else {
        return Ok(Extraction::Flagged("no accepted key proof".into()));
    };
    if !verify_commitment(&com_f, &w.dec_f, &w.r_a) {
        return Ok(Extraction::Flagged("commitment does not open to the extracted share".into()));
    }
    let kp = gen(params, &mut key_coins(&w.r_a, &r_b))?;
    if kp.public != key {
        return Ok(Extraction::Flagged("key does not match the coin toss".into()));
    }
    if !delta.is_even() {
        return Ok(Extraction::Flagged("δ is not a multiple of π/2".into()));
    }
    Ok(Extraction::Input(extract_b(delta, kp.hp)))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheatOutcome {
    pub runs: u64,
    pub aborted: u64,
    pub flagged: u64,
    /// Extraction produced a bit that differs from Alice's input.
    pub silent_wrong: u64,
    /// The deviation went unnoticed and extraction still matched.
    pub unnoticed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtractorReport {
    pub experiment: String,
    pub profile: String,
    pub seed: u64,
    pub trials: u64,
    pub correct: u64,
    pub cheating: BTreeMap<String, CheatOutcome>,
    pub pass: bool,
    pub claim: String,
    pub scope: String,
}

impl ExtractorReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

enum RunResult {
    Aborted,
    Extracted(Extraction),
}

fn run_one(params: &LatticeParams, b: bool, strategy: AliceStrategy, seed: u64, tag: &str) -> Result<RunResult, HarnessError> {
    let root = CoinSource::from_u64(seed, "harness.extractor").derive(tag);
    let mut sid = [0u8; 16];
    sid.copy_from_slice(&root.clone().bytes32()[..16]);
    let zk = IdealZk::new(&sid);
    let (za, zb) = (zk.clone(), zk.clone());
    let acfg = OqfeAliceConfig { b, params: *params, strategy };
    let bcfg = OqfeBobConfig {
        psi_in: StateVector::plus(Angle8::ZERO),
        backend: BobBackend::Quantum,
        strategy: BobStrategy::Honest,
    };
    let p = *params;
    let (mut ca, mut cb) = (root.derive("alice"), root.derive("bob"));
    let (_, bob, log) = run_pair(
        sid,
        move |ep| oqfe_mal_alice(ep, &za, &acfg, &mut ca),
        move |ep| oqfe_mal_bob(ep, &zb, &p, &bcfg, &mut cb),
    );
    match bob {
        Err(e) if e.abort().is_some() => Ok(RunResult::Aborted),
        Err(e) => Err(e.into()),
        Ok(_) => Ok(RunResult::Extracted(extract_malicious_alice(&zk, params, &log)?)),
    }
}

/// Scripted cheating strategies the extractor experiment runs.
pub fn cheating_strategies() -> Vec<(&'static str, AliceStrategy)> {
    vec![
        ("bad-key", AliceStrategy::BadKey),
        ("inconsistent-commitment", AliceStrategy::InconsistentCommitment),
        ("odd-delta", AliceStrategy::TamperedDelta(Angle8::new(1))),
    ]
}

/// `trials` honest and biased-r_A Alices (alternating) with seeded inputs,
/// then `trials` runs of every cheating strategy.
pub fn extractor_experiment(profile: Profile, trials: u64, seed: u64) -> Result<ExtractorReport, HarnessError> {
    let params = profile.params();
    let honest: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let b = CoinSource::from_u64(seed, "harness.extractor.b").derive(&i.to_string()).bit();
            let strategy = match i % 4 {
                0 | 2 => AliceStrategy::Honest,
                1 => AliceStrategy::FixedMask(false),
                _ => AliceStrategy::FixedMask(true),
            };
            Ok(matches!(run_one(&params, b, strategy, seed, &format!("honest.{i}"))?, RunResult::Extracted(Extraction::Input(x)) if x == b))
        })
        .collect::<Result<_, HarnessError>>()?;
    let correct = honest.iter().filter(|&&c| c).count() as u64;
    let mut cheating = BTreeMap::new();
    for (name, strategy) in cheating_strategies() {
        let results: Vec<(bool, RunResult)> = (0..trials)
            .into_par_iter()
            .map(|i| {
                let b = i % 2 == 1;
                Ok((b, run_one(&params, b, strategy, seed, &format!("{name}.{i}"))?))
            })
            .collect::<Result<_, HarnessError>>()?;
        let mut o = CheatOutcome::default();
        for (b, r) in results {
            o.runs += 1;
            match r {
                RunResult::Aborted => o.aborted += 1,
                RunResult::Extracted(Extraction::Flagged(_)) => o.flagged += 1,
                RunResult::Extracted(Extraction::Input(x)) if x != b => o.silent_wrong += 1,
                RunResult::Extracted(Extraction::Input(_)) => o.unnoticed += 1,
            }
        }
        cheating.insert(name.to_string(), o);
    }
    let pass = correct == trials && cheating.values().all(|o| o.aborted + o.flagged == o.runs);
    Ok(ExtractorReport {
        experiment: "extractor".into(),
        profile: profile.name().into(),
        seed,
        trials,
        correct,
        cheating,
        pass,
        claim: "the extractor recovers a malicious Alice's effective input from the key proof and δ".into(),
        scope: "ideal zero-knowledge functionality with witness escrow; scripted deviations only".into(),
    })
}
