use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::*;
use crate::primitives::CoinSource;

fn tiny_key() -> &'static TrapdoorKeypair {
    static K: OnceLock<TrapdoorKeypair> = OnceLock::new();
    K.get_or_init(|| gen(&Profile::Tiny.params(), &mut CoinSource::from_u64(11, "lattice.test")).unwrap())
}

fn small_key() -> &'static TrapdoorKeypair {
    static K: OnceLock<TrapdoorKeypair> = OnceLock::new();
    K.get_or_init(|| gen(&Profile::Small.params(), &mut CoinSource::from_u64(12, "lattice.test")).unwrap())
}

// schoolbook oracle written independently of eval_f
fn naive_f(pk: &PublicKey, z: &Preimage) -> Vec<u32> {
    let p = pk.params;
    let mut out = vec![0u32; p.m];
    for i in 0..p.m {
        let mut acc: i128 = 0;
        for j in 0..p.n {
            acc += pk.k[i * p.n + j] as i128 * z.s[j] as i128;
        }
        acc += z.e[i] as i128;
        if z.c {
            acc += pk.y0[i] as i128;
        }
        if z.d && i == 0 {
            acc += (p.q / 2) as i128;
        }
        out[i] = acc.rem_euclid(p.q as i128) as u32;
    }
    out
}

#[test]
fn gen_recomputes_y0_and_is_deterministic() {
    let p = Profile::Small.params();
    let a = gen(&p, &mut CoinSource::from_u64(5, "g")).unwrap();
    let b = gen(&p, &mut CoinSource::from_u64(5, "g")).unwrap();
    assert_eq!(a, b);
    assert_eq!(eval_f(&a.public, &a.z0()).unwrap(), a.public.y0);
    assert_eq!(a.hp, a.trapdoor.d0);
    assert!(injectivity_margin(&a.public).unwrap() > 2 * p.sigma as i64);
}

#[test]
fn hp_is_a_fair_coin() {
    let p = Profile::Tiny.params();
    let ones = (0..200)
        .filter(|&i| gen(&p, &mut CoinSource::from_u64(i, "hp")).unwrap().hp)
        .count();
    let mean = ones as f64 / 200.0;
    assert!((0.3..=0.7).contains(&mean), "mean {mean}");
}

#[test]
fn eval_examples() {
    let k = tiny_key();
    let p = k.public.params;
    assert_eq!(eval_f(&k.public, &Preimage::zero(&p)).unwrap(), vec![0; p.m]);
    let mut bad = Preimage::zero(&p);
    bad.e[0] = p.sigma as i32 + 1;
    assert!(eval_f(&k.public, &bad).is_err());
}

#[test]
fn eval_matches_schoolbook() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    for k in [tiny_key(), small_key()] {
        for _ in 0..500 {
            let z = Preimage::sample(&k.public.params, &mut rng);
            assert_eq!(eval_f(&k.public, &z).unwrap(), naive_f(&k.public, &z));
        }
    }
}

#[test]
fn trapdoor_completeness_against_search() {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    for k in [tiny_key(), small_key()] {
        for i in 0..1000 {
            let z = Preimage::sample(&k.public.params, &mut rng);
            let y = eval_f(&k.public, &z).unwrap();
            let found = k.preimages(&y).unwrap();
            assert!(found.contains(&z));
            if i % 10 == 0 {
                assert_eq!(found, search_preimages(&k.public, &y).unwrap());
            }
            match k.invert(&y) {
                Ok((a, b)) => {
                    assert_eq!(found.len(), 2);
                    assert!(!a.c && b.c);
                    assert_eq!(eval_f(&k.public, &a).unwrap(), y);
                    assert_eq!(eval_f(&k.public, &b).unwrap(), y);
                    // the pair differs by z0: s and e shift, c flips, d flips by d0
                    assert_eq!(a.d ^ b.d, k.trapdoor.d0);
                }
                Err(LatticeError::PreimageCount(1)) => assert_eq!(found.len(), 1),
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn uniform_targets_are_mostly_outside_the_image() {
    let k = tiny_key();
    let p = k.public.params;
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let mut outside = 0;
    for _ in 0..2000 {
        let y: Vec<u32> = (0..p.m).map(|_| rand::Rng::gen_range(&mut rng, 0..p.q)).collect();
        let found = k.preimages(&y).unwrap();
        if found.is_empty() {
            outside += 1;
            assert!(matches!(k.invert(&y), Err(LatticeError::NotInImage)));
        }
    }
    assert!(outside > 1900, "{outside}");
}

// The non-2-regular fraction has a closed form: a c=0 point has a c=1
// sibling iff e − e0 stays in the box, which happens with probability
// A = Π (2σ+1−|e0_i|)/(2σ+1); the image then has 2D − AD points of which
// 2D − 2AD have one preimage.
#[test]
fn regularity_census_matches_closed_form() {
    let k = tiny_key();
    let p = k.public.params;
    let rep = regularity(&k.public).unwrap();
    let span = 2.0 * p.sigma as f64 + 1.0;
    let a: f64 = k.trapdoor.e0.iter().map(|e| (span - e.abs() as f64) / span).product();
    let want = (2.0 - 2.0 * a) / (2.0 - a);
    assert!((rep.non_two_fraction - want).abs() < 1e-12, "{} vs {want}", rep.non_two_fraction);
    assert!(rep.histogram.keys().all(|&c| c == 1 || c == 2));
    let total: u64 = rep.histogram.iter().map(|(c, n)| *c as u64 * n).sum();
    assert_eq!(total, rep.domain_size);
}

#[test]
fn hardcore_xor_is_hp_on_every_pair() {
    let k = tiny_key();
    let census = image_census(&k.public).unwrap();
    let p = k.public.params;
    let mut pairs = 0;
    for (key, &count) in census.iter().take(20_000) {
        if count == 2 {
            let (a, b) = k.invert(&unpack_image(&p, *key)).unwrap();
            assert_eq!(hardcore(&a) ^ hardcore(&b), k.hp);
            pairs += 1;
        }
    }
    assert!(pairs > 0);
}

#[test]
fn key_bytes_round_trip() {
    let k = small_key();
    let b = k.public.to_bytes();
    assert_eq!(PublicKey::from_bytes(&b).unwrap(), k.public);
    assert!(PublicKey::from_bytes(&b[..b.len() - 1]).is_err());
}

fn arb_tiny_preimage() -> impl Strategy<Value = Preimage> {
    let p = Profile::Tiny.params();
    let sig = p.sigma as i32;
    (
        proptest::collection::vec(0..p.q, p.n),
        proptest::collection::vec(-sig..=sig, p.m),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(s, e, c, d)| Preimage { s, e, c, d })
}

proptest! {
    #[test]
    fn homomorphic_shift(z in arb_tiny_preimage()) {
        let k = tiny_key();
        let p = k.public.params;
        let mut z0 = z.clone();
        z0.c = false;
        let mut z1 = z.clone();
        z1.c = true;
        let y0 = eval_f(&k.public, &z0).unwrap();
        let y1 = eval_f(&k.public, &z1).unwrap();
        for i in 0..p.m {
            prop_assert_eq!((y0[i] + k.public.y0[i]) % p.q, y1[i]);
        }
    }

    #[test]
    fn encoding_round_trip(z in arb_tiny_preimage()) {
        let p = Profile::Tiny.params();
        let bits = encode(&p, &z);
        prop_assert_eq!(bits.len(), p.preimage_width());
        prop_assert_eq!(bits.get(bits.len() - 1), hardcore(&z));
        prop_assert_eq!(decode(&p, &bits).unwrap(), z);
    }

    #[test]
    fn inverted_pairs_have_hp_xor(z in arb_tiny_preimage()) {
        let k = tiny_key();
        let y = eval_f(&k.public, &z).unwrap();
        if let Ok((a, b)) = k.invert(&y) {
            prop_assert_eq!(hardcore(&a) ^ hardcore(&b), k.hp);
        }
    }
}
