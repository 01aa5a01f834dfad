use proptest::prelude::*;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::*;
use crate::lattice::{gen, Profile};
use crate::primitives::{commit, Commitment, Opening};

fn zk() -> IdealZk {
    IdealZk::new(b"test-session")
}

fn run<R: Relation>(rel: &R, x: R::Statement, x_verifier: R::Statement, w: R::Witness) -> (bool, ZkSession<'_, R>) {
    let f = zk();
    let mut p = ZkSession::prover(rel, x);
    let msgs = p.prove(&f, w).unwrap();
    let mut v = ZkSession::verifier(rel, x_verifier);
    (v.verify(&f, &msgs).unwrap(), p)
}

#[test]
fn opening_completeness_and_soundness() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let mut msg = vec![0u8; (rng.next_u32() % 64) as usize];
        rng.fill_bytes(&mut msg);
        let (com, dec) = commit(&msg, &mut rng);
        let (ok, p) = run(&CommitOpening, com, com, (dec, msg.clone()));
        assert!(ok);
        assert!(CommitOpening.holds(&com, &p.extract().unwrap()));
    }
    let (com, dec) = commit(b"m", &mut rng);
    let (ok, p) = run(&CommitOpening, com, com, (dec, b"x".to_vec()));
    assert!(!ok);
    assert_eq!(p.extract(), Err(ZkError::NotAccepted));
}

#[test]
fn key_derivation_relation() {
    let params = Profile::Tiny.params();
    let rel = KeyDerivation { params };
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let mut r_a = [0u8; 32];
    let mut r_b = [0u8; 32];
    rng.fill_bytes(&mut r_a);
    rng.fill_bytes(&mut r_b);
    let (com_f, dec_f) = commit(&r_a, &mut rng);
    let kp = gen(&params, &mut key_coins(&r_a, &r_b)).unwrap();
    let x = KeyDerivationStatement {
        com_f,
        r_b,
        key: kp.public.to_bytes(),
    };
    let w = KeyDerivationWitness { r_a, dec_f };
    let (ok, p) = run(&rel, x.clone(), x.clone(), w.clone());
    assert!(ok);
    assert_eq!(p.extract().unwrap(), w);

    // a share that does not match com_f
    let mut other = r_a;
    other[0] ^= 1;
    let bad = KeyDerivationWitness { r_a: other, dec_f };
    assert!(!run(&rel, x.clone(), x.clone(), bad).0);

    // a key from different coins
    let wrong = gen(&params, &mut key_coins(&r_b, &r_b)).unwrap();
    let xb = KeyDerivationStatement {
        key: wrong.public.to_bytes(),
        ..x.clone()
    };
    assert!(!run(&rel, xb.clone(), xb, w.clone()).0);

    // Bob's share changed after the fact
    let mut rb2 = r_b;
    rb2[31] ^= 0x80;
    let xc = KeyDerivationStatement { r_b: rb2, ..x };
    assert!(!run(&rel, xc.clone(), xc, w).0);
}

#[test]
fn tokens_bind_the_statement() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let (c1, d1) = commit(b"a", &mut rng);
    let (c2, _) = commit(b"b", &mut rng);
    let (ok, _) = run(&CommitOpening, c1, c2, (d1, b"a".to_vec()));
    assert!(!ok);
}

#[test]
fn forged_or_foreign_tokens_rejected() {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let (c, d) = commit(b"a", &mut rng);
    let f = zk();
    let mut p = ZkSession::prover(&CommitOpening, c);
    let msgs = p.prove(&f, (d, b"a".to_vec())).unwrap();
    let mut bad = msgs[0].clone();
    let last = bad.len() - 1;
    bad[last] ^= 1;
    assert!(!ZkSession::verifier(&CommitOpening, c).verify(&f, &[bad]).unwrap());
    let other = IdealZk::new(b"other-session");
    assert!(!ZkSession::verifier(&CommitOpening, c).verify(&other, &msgs).unwrap());
    assert!(ZkSession::verifier(&CommitOpening, c).verify(&f, &[vec![1, 2]]).is_err());
    assert_eq!(p.prove(&f, (d, b"a".to_vec())), Err(ZkError::AlreadyDecided));
}

#[test]
fn simulation_matches_honest_tokens() {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let (c, d) = commit(b"a", &mut rng);
    let f = zk();
    let honest = ZkSession::prover(&CommitOpening, c).prove(&f, (d, b"a".to_vec())).unwrap();
    let book = WitnessBook(vec![(d, b"a".to_vec())]);
    let sim = f.simulate(&CommitOpening, &c, &book);
    assert_eq!(honest, sim);
    assert!(ZkSession::verifier(&CommitOpening, c).verify(&f, &sim).unwrap());
    let false_stmt = Commitment([9; 32]);
    let sim = f.simulate(&CommitOpening, &false_stmt, &book);
    assert!(!ZkSession::verifier(&CommitOpening, false_stmt).verify(&f, &sim).unwrap());
}

proptest! {
    #[test]
    fn accepted_extraction_satisfies_relation(msg in proptest::collection::vec(any::<u8>(), 0..40),
                                              dec in any::<[u8; 32]>(), flip in any::<bool>()) {
        let com = crate::primitives::commit_with(&msg, &Opening(dec));
        let mut claimed = msg.clone();
        if flip { claimed.push(0); }
        let (ok, p) = run(&CommitOpening, com, com, (Opening(dec), claimed));
        prop_assert_eq!(ok, !flip);
        if ok {
            prop_assert!(CommitOpening.holds(&com, &p.extract().unwrap()));
        } else {
            prop_assert!(p.extract().is_err());
        }
    }
}
