use super::*;
use crate::channel::Message;
use crate::lattice::{LatticeParams, Profile};
use crate::mbqc::{library, reference_law, BrickworkPattern};
use crate::primitives::CoinSource;
use crate::protocols::{q2pc_alice, q2pc_bob, run_pair, ProtocolError, Q2pcAliceConfig, Q2pcAliceOutput, Q2pcAliceStrategy, Q2pcBobConfig};
use crate::qsim::{Angle8, StateVector};
use crate::rsp::BobBackend;
use crate::zk::IdealZk;

fn tiny() -> LatticeParams {
    Profile::Tiny.params()
}

fn sid(seed: u64) -> [u8; 16] {
    let mut s = [0u8; 16];
    s[..8].copy_from_slice(&seed.to_le_bytes());
    s[15] = 0xfc;
    s
}

fn run_fullsim(
    seed: u64,
    pattern: &BrickworkPattern,
    input: &StateVector,
    strategy: FullSimBobStrategy,
) -> (Result<Q2pcAliceOutput, ProtocolError>, Result<(), ProtocolError>, Vec<Message>) {
    let zk = IdealZk::new(&sid(seed));
    let (za, zb) = (zk.clone(), zk);
    let cfg = FullSimBobConfig {
        description: StateDescription::of(input),
        params: tiny(),
        backend: BobBackend::Quantum,
        seed: [seed as u8; 32],
        strategy,
    };
    let p = pattern.clone();
    run_pair(
        sid(seed),
        move |ep| fullsim_alice(ep, &za, &p, &tiny(), &mut CoinSource::from_u64(seed, "alice")),
        move |ep| fullsim_bob(ep, &zb, &cfg, &mut CoinSource::from_u64(seed, "bob")),
    )
}

#[test]
fn description_round_trips() {
    let s = StateVector::plus(Angle8::new(3)).tensor(&StateVector::basis(1, 1).unwrap()).unwrap();
    let d = StateDescription::of(&s);
    let back = StateDescription::from_bytes(&d.to_bytes()).unwrap();
    assert_eq!(back, d);
    assert!(back.to_state().unwrap().approx_eq(&s, 1e-12));
    assert!(StateDescription::from_bytes(&[0; 15]).is_none());
}

#[test]
fn honest_fullsim_matches_inner_protocol() {
    let p = library::brick();
    let input = StateVector::plus(Angle8::ZERO).tensor(&StateVector::basis(1, 1).unwrap()).unwrap();
    let want = reference_law(&p, &input).unwrap();
    for seed in 0..3 {
        let (a, b, log) = run_fullsim(seed, &p, &input, FullSimBobStrategy::Honest);
        b.unwrap();
        let a = a.unwrap();
        assert!(want.get(&a.output).copied().unwrap_or(0.0) > 0.0);
        assert_eq!(log.first().unwrap().msg_type, MSG_FS_COMMIT);
        assert_eq!(log.last().unwrap().msg_type, MSG_FS_ZK);

        // same coins without the wrapper give the same output
        let zk = IdealZk::new(&sid(seed));
        let (za, zb) = (zk.clone(), zk);
        let acfg = Q2pcAliceConfig {
            pattern: p.clone(),
            params: tiny(),
            strategy: Q2pcAliceStrategy::Honest,
        };
        let bcfg = Q2pcBobConfig {
            input: input.clone(),
            params: tiny(),
            backend: BobBackend::Quantum,
            lie_at: None,
        };
        let (plain, _, _) = run_pair(
            sid(seed),
            move |ep| q2pc_alice(ep, &za, &acfg, &mut CoinSource::from_u64(seed, "alice")),
            move |ep| q2pc_bob(ep, &zb, &bcfg, &mut CoinSource::new([seed as u8; 32], "fs.inner")),
        );
        assert_eq!(plain.unwrap().output, a.output);
    }
}

fn assert_rejected(phase: &str, a: Result<Q2pcAliceOutput, ProtocolError>) {
    let err = a.unwrap_err();
    assert_eq!(err.abort().map(|x| x.phase.as_str()), Some(phase), "{err}");
}

#[test]
fn wrong_description_rejected() {
    let p = library::identity();
    let real = StateVector::basis(1, 0).unwrap();
    let claimed = StateDescription::of(&StateVector::basis(1, 1).unwrap());
    for seed in 0..3 {
        let (a, _, _) = run_fullsim(seed, &p, &real, FullSimBobStrategy::WrongDescription(claimed.clone()));
        assert_rejected("fs.consistency", a);
    }
}

#[test]
fn inconsistent_inner_message_rejected() {
    let p = library::brick();
    let input = StateVector::basis(2, 2).unwrap();
    let (a, _, _) = run_fullsim(4, &p, &input, FullSimBobStrategy::InconsistentInner((0, 3)));
    assert_rejected("fs.consistency", a);
}

#[test]
fn bad_opening_rejected_before_inner_run() {
    let p = library::identity();
    let input = StateVector::basis(1, 0).unwrap();
    let (a, b, log) = run_fullsim(5, &p, &input, FullSimBobStrategy::BadOpening);
    assert_rejected("fs.commit", a);
    assert!(b.is_err());
    assert!(log.iter().all(|m| !m.msg_type.starts_with("q2pc.") && !m.msg_type.starts_with("rsp.")));
}

fn toy(n: usize, w: u64) -> (ToyInstance, StateVector) {
    (ToyInstance::for_witness(n, w), StateVector::basis(n, w as usize).unwrap())
}

fn run_zkpoqk(seed: u64, inst: &ToyInstance, witness: StateVector, strategy: ProverStrategy, rounds: u32) -> (VerifierOutput, Result<ProverOutput, ProtocolError>, IdealZk) {
    let zk = IdealZk::new(&sid(seed));
    let (za, zb) = (zk.clone(), zk.clone());
    let (i1, i2) = (inst.clone(), inst.clone());
    let (v, p, _) = run_pair(
        sid(seed),
        move |ep| zkpoqk_verifier(ep, &za, &i1, rounds, &mut CoinSource::from_u64(seed, "verifier")),
        move |ep| zkpoqk_prover(ep, &zb, &i2, witness, strategy, &mut CoinSource::from_u64(seed, "prover")),
    );
    (v.unwrap(), p, zk)
}

#[test]
fn toy_extractor_recovers_witness() {
    let (inst, _) = toy(8, 0b1011_0110);
    let mut v = ToyVerifier { n: 8, seed: [7; 32] };
    let mut prover = ToyProver::new(inst.clone(), StateVector::basis(8, 0b1011_0110).unwrap());
    let mut coins = CoinSource::from_u64(1, "t");
    let (mut cs, mut rs) = (Vec::new(), Vec::new());
    for i in 0..12 {
        let c = v.challenge(i, None);
        rs.push(prover.respond(i, &c, &mut coins).unwrap());
        cs.push(c);
    }
    assert_eq!(toy_extract(&inst, &cs, &rs), Some(0b1011_0110));
    // zero rounds: the kernel search alone finds it
    assert_eq!(toy_extract(&inst, &[], &[]), Some(0b1011_0110));
    rs[3][4] ^= 1;
    assert_eq!(toy_extract(&inst, &cs, &rs), None);
}

#[test]
fn honest_zkpoqk_always_accepts() {
    let (inst, _) = toy(6, 0b101101);
    for seed in 0..1000 {
        let (_, w) = toy(6, 0b101101);
        let (v, p, zk) = run_zkpoqk(seed, &inst, w, ProverStrategy::Honest, 8);
        p.unwrap();
        assert!(v.accept && v.reject_phase.is_none(), "seed {seed}");
        assert_eq!(zkpoqk_extract(&zk, &inst, &v).unwrap(), 0b101101);
    }
}

#[test]
fn random_messages_never_accept() {
    let (inst, _) = toy(6, 0b101101);
    for seed in 0..200 {
        let (_, w) = toy(6, 0b101101);
        let (v, _, zk) = run_zkpoqk(seed, &inst, w, ProverStrategy::NoWitness, 8);
        assert!(!v.accept);
        assert_eq!(v.reject_phase.as_deref(), Some("zkpoqk.final"));
        assert!(zkpoqk_extract(&zk, &inst, &v).is_err());
    }
}

#[test]
fn wrong_key_rejected() {
    let (inst, w) = toy(5, 3);
    let (v, _, _) = run_zkpoqk(3, &inst, w, ProverStrategy::WrongKey, 6);
    assert!(!v.accept);
}

#[test]
fn no_plaintext_prover_message_on_the_wire() {
    let (inst, w) = toy(8, 0xa5);
    let zk = IdealZk::new(&sid(11));
    let (za, zb) = (zk.clone(), zk);
    let (i1, i2) = (inst.clone(), inst.clone());
    let (_, p, log) = run_pair(
        sid(11),
        move |ep| zkpoqk_verifier(ep, &za, &i1, 10, &mut CoinSource::from_u64(11, "v")),
        move |ep| zkpoqk_prover(ep, &zb, &i2, w, ProverStrategy::Honest, &mut CoinSource::from_u64(11, "p")),
    );
    let plain = p.unwrap().plaintexts;
    for m in &log {
        for pt in &plain {
            // the 32-byte digest is the distinctive part of each message
            assert!(!m.payload.windows(32).any(|win| win == &pt[5..]));
        }
    }
    let encs = log.iter().filter(|m| m.msg_type == MSG_ENC).count();
    assert_eq!(encs, 10);
}

#[test]
fn verifier_message_independence() {
    let make = || Box::new(ToyVerifier { n: 8, seed: [3; 32] }) as Box<dyn SeededVerifier>;
    assert!(check_message_independence(make, 0));
    assert!(check_message_independence(make, 16));
    let adaptive = || Box::new(AdaptiveMockVerifier { n: 8, seed: [3; 32] }) as Box<dyn SeededVerifier>;
    assert!(check_message_independence(adaptive, 1));
    assert!(!check_message_independence(adaptive, 16));
}
