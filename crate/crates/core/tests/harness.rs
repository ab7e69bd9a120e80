use bridgelab_core::bridges::{bridge_public_view, halfkey_bridges};
use bridgelab_core::harness::adversary::reassemble_secret;
use bridgelab_core::harness::*;
use bridgelab_core::homomorphic::{HomSchemeRef, TrivialFhe};
use bridgelab_core::registry::Registry;
use bridgelab_core::rng::stream;
use bridgelab_core::{Error, SecurityParameter, Value};

fn reg() -> Registry {
    Registry::default()
}

#[test]
fn halfwidth_formula() {
    // sqrt(ln(200) / 20000)
    let expected = (200f64.ln() / 20_000.0).sqrt();
    assert!((hoeffding_halfwidth(10_000, 0.01) - expected).abs() < 1e-12);
    assert!((expected - 0.016276).abs() < 1e-6);
}

#[test]
fn random_guessing_stays_inside_the_interval() {
    let scheme = reg().scheme("lwe-toy").unwrap();
    let adv = random_guess();
    let inside = (0..100u64)
        .filter(|&seed| run_indcpa(&scheme, adv.as_ref(), 1_000, seed).unwrap().consistent_with_zero_advantage())
        .count();
    // At δ = 0.01 about one run in a hundred may fall outside.
    assert!(inside >= 97, "{inside}");
}

#[test]
fn fixtures_with_full_advantage() {
    let reg = reg();
    let scheme = reg.scheme("lwe-toy").unwrap();
    let r = run_indcpa(&scheme, omniscient(&scheme).as_ref(), 1_000, 0).unwrap();
    assert_eq!(r.advantage, 1.0);
    assert!(r.flags.contains(&"white_box".to_string()));
    let t = HomSchemeRef::new(TrivialFhe).scheme();
    let r = run_indcpa(&t, plaintext_reader().as_ref(), 1_000, 0).unwrap();
    assert_eq!(r.advantage, 1.0);
    assert!(r.flags.is_empty());
    let r = run_indcpa(&scheme, plaintext_reader().as_ref(), 10_000, 0).unwrap();
    assert!(r.consistent_with_zero_advantage(), "{}", r.advantage);
}

#[test]
fn half_keys_are_safe_alone_and_fatal_together() {
    let reg = reg();
    let base = reg.scheme("lwe-toy").unwrap();
    let attacker = halfkey_attacker(&base, Frontend::Augmented);
    for id in ["halfkey-f", "halfkey-g"] {
        let b = reg.bridge(id, None).unwrap();
        let r = run_bridge_indcpa(&b, attacker.as_ref(), 1_000, 0).unwrap();
        assert_eq!(r.abstentions, 1_000, "{id}");
        assert_eq!(r.advantage, 0.0);
        assert!(r.consistent_with_zero_advantage());
    }
    let composed = reg.bridge("halfkey-composed", None).unwrap();
    let r = run_bridge_indcpa(&composed, attacker.as_ref(), 1_000, 0).unwrap();
    assert_eq!(r.advantage, 1.0);
    assert_eq!(r.wins, 1_000);
}

#[test]
fn reassembled_key_is_the_real_key() {
    let base = reg().scheme("lwe-toy").unwrap();
    let (f, g) = halfkey_bridges(&base).unwrap();
    let composed = bridgelab_core::bridges::compose(&f, &g).unwrap();
    let view = bridge_public_view(&composed);
    for i in 0..100 {
        let keys = view.keygen(SecurityParameter::default(), &mut stream(3, i)).unwrap();
        assert_eq!(reassemble_secret(&base, &keys.pk).unwrap(), keys.sk);
    }
    let keys = bridge_public_view(&f).keygen(SecurityParameter::default(), &mut stream(3, 0)).unwrap();
    assert!(matches!(reassemble_secret(&base, &keys.pk), Err(Error::MissingKeyHalf)));
}

#[test]
fn graph_and_augmented_games_agree() {
    let reg = reg();
    let base = reg.scheme("lwe-toy").unwrap();
    let composed = reg.bridge("halfkey-composed", None).unwrap();
    let graph = run_graph_indcpa_trace(&composed, halfkey_attacker(&base, Frontend::Graph).as_ref(), 500, 4).unwrap();
    let view = bridge_public_view(&composed);
    let aug = run_indcpa_trace(&view, halfkey_attacker(&base, Frontend::Augmented).as_ref(), 500, 4).unwrap();
    assert_eq!(graph, aug);
    assert!(graph.iter().all(|o| *o == Outcome::Win));
}

#[test]
fn distinguisher_games() {
    let reg = reg();
    let same =
        run_distinguisher(&Sampler::uniform_bits(8), &Sampler::uniform_bits(8), &first_bit(), 10_000, 0).unwrap();
    assert!(same.advantage <= same.ci, "{}", same.advantage);
    assert_eq!(same.flags, vec![HEURISTIC_ONLY.to_string()]);

    // A uniform first bit is 1 half the time; the zero string never.
    let r = run_distinguisher(&Sampler::uniform_bits(8), &Sampler::zero_bits(8), &first_bit(), 10_000, 0).unwrap();
    assert!((r.advantage - 0.5).abs() <= 2.0 * r.ci, "{}", r.advantage);

    let (real, zero) = (reg.sampler("gentry-real").unwrap(), reg.sampler("gentry-zero").unwrap());
    let r = run_distinguisher(&real, &zero, &byte_parity(), 1_000, 1).unwrap();
    assert!(r.advantage <= 0.05, "{}", r.advantage);

    let short = Sampler::new("one-bit", |_| Ok(Value::bits([false])));
    let err = run_distinguisher(&Sampler::uniform_bits(8), &short, &first_bit(), 10, 0).unwrap_err();
    assert!(matches!(err, Error::ShapeMismatch(_)));
}

#[test]
fn reports_are_deterministic_in_the_seed() {
    let scheme = reg().scheme("lwe-toy").unwrap();
    let a = run_indcpa(&scheme, random_guess().as_ref(), 500, 42).unwrap().to_json();
    let b = run_indcpa(&scheme, random_guess().as_ref(), 500, 42).unwrap().to_json();
    let c = run_indcpa(&scheme, random_guess().as_ref(), 500, 43).unwrap().to_json();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn identical_messages_are_rejected() {
    struct Lazy;
    impl Adversary for Lazy {
        fn name(&self) -> String {
            "lazy".into()
        }
        fn choose(&self, view: &View<'_>, _: &mut dyn rand::RngCore) -> bridgelab_core::Result<Choice> {
            let m = view.plaintexts.element(0)?;
            Ok(Choice { m0: m.clone(), m1: m, state: Value::empty() })
        }
        fn guess(
            &self,
            _: &View<'_>,
            _: &Value,
            _: &Value,
            _: &mut dyn rand::RngCore,
        ) -> bridgelab_core::Result<Guess> {
            Ok(Guess::Abstain)
        }
    }
    let scheme = reg().scheme("lwe-toy").unwrap();
    assert!(matches!(run_indcpa(&scheme, &Lazy, 10, 0), Err(Error::InvalidMessagePair(_))));
}
