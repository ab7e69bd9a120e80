use bridgelab_core::bridges::*;
use bridgelab_core::circuits::{BooleanCircuit, Gate};
use bridgelab_core::fche::*;
use bridgelab_core::gentry::*;
use bridgelab_core::homomorphic::gsw::{gsw_noise, GswCiphertext};
use bridgelab_core::homomorphic::{EvaluableClass, GswParams, GswScheme, HomSchemeRef, TrivialFhe};
use bridgelab_core::registry::Registry;
use bridgelab_core::rng::stream;
use bridgelab_core::{Error, SchemeRef, SecurityParameter, Value};

fn reg() -> Registry {
    Registry::default()
}

fn trivial() -> HomSchemeRef {
    HomSchemeRef::new(TrivialFhe)
}

fn small_lwe() -> SchemeRef {
    reg().scheme("lwe-n1q4").unwrap()
}

fn gsw_fche_params() -> GswParams {
    reg().presets().get("gsw-fche").unwrap().gsw_params().unwrap()
}

fn bits_of(x: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| (x >> i) & 1 == 1).collect()
}

/// out_i = x_i ⊕ x_{i+1 mod 4}: depth 1, four wires in and out.
fn rotate_xor() -> BooleanCircuit {
    let gates = (0..4).map(|i| Gate::Xor(i, (i + 1) % 4)).collect();
    BooleanCircuit::new(4, gates, vec![4, 5, 6, 7]).unwrap()
}

#[test]
fn recryption_into_trivial_is_complete_everywhere() {
    for variant in [RecryptVariant::Folded, RecryptVariant::EncryptedBits] {
        let b = gentry_bridge(&small_lwe(), &trivial(), KeyMode::Independent, variant).unwrap();
        assert_eq!(b.completeness(), CompletenessStatus::Claimed);
        let r = check_complete(&b, CheckMode::Exhaustive, DEFAULT_EXHAUSTIVE_BUDGET, 0).unwrap();
        assert!(r.complete, "{variant:?}: {:?}", r.witness);
        assert_eq!(r.checked, 64);
        assert!(r.keys_exhaustive);
    }
}

#[test]
fn shared_keys_need_the_same_scheme_and_flag_circularity() {
    let err = gentry_bridge(&small_lwe(), &trivial(), KeyMode::Shared, RecryptVariant::Folded).unwrap_err();
    assert!(matches!(err, Error::WrongKeyMode(_)));
    let err = gentry_bridge(&small_lwe(), &trivial(), KeyMode::Derived, RecryptVariant::Folded).unwrap_err();
    assert!(matches!(err, Error::WrongKeyMode(_)));

    // Degenerate inner scheme: no key bits, decryption is the identity.
    let t = trivial();
    let b = gentry_bridge(&t.scheme(), &t, KeyMode::Shared, RecryptVariant::Folded).unwrap();
    assert!(b.has_flag(CIRCULAR_SECURITY_ASSUMED));
    let mut rng = stream(4, 0);
    let bundle = b.keygen(SecurityParameter::default(), &mut rng).unwrap();
    for bit in [false, true] {
        let out = b.convert_value(&bundle.bk, &bundle.pk2, &Value::bit(bit), &mut rng).unwrap();
        assert_eq!(out, Value::bit(bit));
    }
    let r = check_complete(&b, CheckMode::Exhaustive, DEFAULT_EXHAUSTIVE_BUDGET, 0).unwrap();
    assert!(r.complete);
    assert_eq!(r.checked, 2);
}

#[test]
fn folded_and_encrypted_bit_variants_agree() {
    let inner = small_lwe();
    let folded = gentry_bridge(&inner, &trivial(), KeyMode::Independent, RecryptVariant::Folded).unwrap();
    let full = gentry_bridge(&inner, &trivial(), KeyMode::Independent, RecryptVariant::EncryptedBits).unwrap();
    let mut rng = stream(5, 0);
    for _ in 0..20 {
        let bundle = folded.keygen(SecurityParameter::default(), &mut rng).unwrap();
        for c in inner.ciphertext_space().iter().unwrap() {
            let a = folded.convert_value(&bundle.bk, &bundle.pk2, &c, &mut rng).unwrap();
            let b = full.convert_value(&bundle.bk, &bundle.pk2, &c, &mut rng).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, inner.decrypt_value(&bundle.sk1, &c).unwrap());
        }
    }
}

#[test]
fn recryption_into_gsw() {
    let outer = reg().hom_scheme("gsw-demo").unwrap();
    let b = gentry_bridge(&small_lwe(), &outer, KeyMode::Independent, RecryptVariant::Folded).unwrap();
    let r = check_complete(&b, CheckMode::Sampled, 200, 0).unwrap();
    assert!(r.complete, "{:?}", r.witness);
    assert_eq!(r.checked, 200);
    // The 6-wire decryption circuit is deeper than the depth-4 budget.
    let err = gentry_bridge(&small_lwe(), &outer, KeyMode::Independent, RecryptVariant::EncryptedBits).unwrap_err();
    assert!(matches!(err, Error::CircuitOutOfClass { .. }), "{err:?}");
}

#[test]
fn composing_before_a_complete_bridge_keeps_correctness() {
    let reg = reg();
    let b = reg.bridge("gentry-composed", None).unwrap();
    assert_eq!(b.correctness(), CorrectnessStatus::ImpliedByCompleteness);
    let r = check_bridge_correct(&b, 2_000, 0).unwrap();
    assert_eq!(r.failures, 0);
    for id in ["identity", "halfkey-f", "halfkey-g"] {
        let f = reg.bridge(id, Some("lwe-n1q4")).unwrap();
        let t = gentry_bridge(f.target(), &trivial(), KeyMode::Independent, RecryptVariant::Folded).unwrap();
        let composed = compose(&f, &t).unwrap();
        assert_eq!(check_bridge_correct(&composed, 2_000, 1).unwrap().failures, 0, "{id}");
    }
}

#[test]
fn circuit_bridge_on_gsw() {
    let h = reg().hom_scheme("gsw-demo").unwrap();
    let b = circuit_bridge(&h, "and", &BooleanCircuit::and()).unwrap();
    assert_eq!(check_bridge_correct(&b, 1_000, 0).unwrap().failures, 0);
    let deep = BooleanCircuit::from_text(
        "inputs 2\ng1 = AND x0 x1\ng2 = AND g1 x1\ng3 = AND g2 x1\ng4 = AND g3 x1\ng5 = AND g4 x1\noutputs g5\n",
    )
    .unwrap();
    assert!(matches!(circuit_bridge(&h, "deep", &deep), Err(Error::CircuitOutOfClass { .. })));
}

#[test]
fn stacked_stages_overflow_the_noise_budget() {
    let h = reg().hom_scheme("gsw-demo").unwrap();
    let chain = alternating_xor_chain(4);
    for x in 0..4u64 {
        let b = bits_of(x, 2);
        assert_eq!(chain.eval(&b).unwrap(), vec![b[1]]);
    }
    assert_eq!(chain.depth(), 4);
    let r = noise_overflow_search(&h, 4, 1_000, 0).unwrap();
    assert!(r.search.found);
    assert_eq!(r.stages, 2);
    assert_eq!(r.total_depth, 8);
    assert!(r.correctness_unverified);
}

#[test]
fn zero_substituted_key_has_the_same_shape() {
    let b = reg().bridge("gentry-composed", None).unwrap();
    let sampler = zero_substituted_bridge_key(&b).unwrap();
    assert_eq!(sampler.key_bits(), 2);
    let outer = reg().hom_scheme("gsw-demo").unwrap();
    let mut rng = stream(6, 0);
    let real = sampler.real(&mut rng).unwrap();
    let prefix = sampler.prefix(&mut rng).unwrap();
    let (zero, keys) = sampler.zero_fiber(prefix.clone(), &mut rng).unwrap();
    assert_eq!(real.bk_g.len(), 2);
    assert_eq!(zero.bk_g.len(), 2);
    assert_eq!(real.to_value().shape(), zero.to_value().shape());
    for c in &zero.bk_g {
        assert_eq!(outer.decrypt_value(&keys.sk, c).unwrap(), Value::bit(false));
    }
    // The prefix is kept; only the outer key and its encryptions vary.
    let (again, _) = sampler.zero_fiber(prefix.clone(), &mut rng).unwrap();
    assert_eq!((&again.pk1, &again.pk2, &again.bk_f), (&prefix.0, &prefix.1, &prefix.2));
    assert_ne!(again.bk_g, zero.bk_g);

    let t = trivial();
    let shared = gentry_bridge(&t.scheme(), &t, KeyMode::Shared, RecryptVariant::Folded).unwrap();
    assert!(matches!(zero_substituted_bridge_key(&shared), Err(Error::WrongKeyMode(_))));
    assert!(zero_substituted_bridge_key(&reg().bridge("identity", None).unwrap()).is_err());
}

#[test]
fn transform_reduces_the_class_and_keeps_encryption() {
    let base = reg().hom_scheme("gsw-fche").unwrap();
    let h = fche_transform(&base);
    assert_eq!(base.evaluable_class(), EvaluableClass::DepthAtMost(6));
    assert_eq!(h.evaluable_class(), EvaluableClass::DepthAtMost(3));
    assert_eq!(fche_transform(&trivial()).evaluable_class(), EvaluableClass::All);

    let keys = h.keygen(SecurityParameter::default(), &mut stream(7, 0)).unwrap();
    let [_, key_cts] = keys.pk.evk.as_tuple(2).unwrap() else { unreachable!() };
    let key_bits = h.secret_to_bits(&keys.sk).unwrap();
    let key_cts = key_cts.as_list().unwrap();
    assert_eq!(key_cts.len(), key_bits.len());
    for (c, &bit) in key_cts.iter().zip(&key_bits) {
        assert_eq!(base.decrypt_value(&keys.sk, c).unwrap(), Value::bit(bit));
    }
    for bit in [false, true] {
        let a = h.encrypt_value(&keys.pk, &Value::bit(bit), &mut stream(8, bit as u64)).unwrap();
        let b = base.encrypt_value(&keys.pk, &Value::bit(bit), &mut stream(8, bit as u64)).unwrap();
        assert_eq!(a, b);
        assert_eq!(h.decrypt_value(&keys.sk, &a).unwrap(), base.decrypt_value(&keys.sk, &a).unwrap());
    }
}

#[test]
fn composable_evaluation_on_every_small_circuit() {
    let h = fche_transform(&trivial());
    let mut circuits = small_circuits(1, 2);
    circuits.extend(small_circuits(2, 2));
    let r = check_fche_exhaustive(&h, &circuits, 0).unwrap();
    assert!(r.holds);
    assert!(r.exhaustive);
    let tuples: u64 = circuits.iter().map(|c| 1u64 << c.arity()).sum();
    assert_eq!(r.checked, tuples);
}

#[test]
fn composable_evaluation_on_gsw_with_arbitrary_inputs() {
    let params = gsw_fche_params();
    let base = HomSchemeRef::new(GswScheme::new(params));
    let h = fche_transform(&base);
    let r = check_fche(&h, |rng| bridgelab_core::circuits::random_circuit(2, 3, 1, rng), 500, 0).unwrap();
    assert!(r.holds, "{:?}", r.witness);
    assert_eq!(r.checked, 500);

    // The raw scheme breaks under repeated squaring.
    let w = raw_squaring_witness(&base, 10, 20, 0).unwrap().expect("squaring overflows the budget");
    assert_ne!(w.expected, w.decrypted);
}

#[test]
fn recryption_resets_noise() {
    let params = gsw_fche_params();
    let base = HomSchemeRef::new(GswScheme::new(params));
    let h = fche_transform(&base);
    let mut rng = stream(9, 0);
    let keys = h.keygen(SecurityParameter::default(), &mut rng).unwrap();
    let s = keys.sk.value().as_ints().unwrap();
    let bound = params.worst_case_noise(3).unwrap() as u64;
    for _ in 0..20 {
        // Ciphertexts far outside any noise bound.
        let garbage = h.ciphertext_space().sample(&mut rng);
        let mu = h.decrypt_value(&keys.sk, &garbage).unwrap().as_int().unwrap();
        let out = h.eval_values(&keys.pk.evk, &BooleanCircuit::identity(1), &[garbage], &mut rng).unwrap();
        let out = GswCiphertext::from_value(&params, &out[0]).unwrap();
        assert!(gsw_noise(&params, &s, &out, mu).unwrap() <= bound);
    }
}

#[test]
fn eval_of_eval_matches_the_composed_circuit() {
    let h = fche_transform(&trivial());
    let keys = h.keygen(SecurityParameter::default(), &mut stream(10, 0)).unwrap();
    let dup = BooleanCircuit::new(1, vec![], vec![0, 0]).unwrap();
    for m in [false, true] {
        let c = Value::bit(m);
        let out = fche_compose_eval(&h, &keys.pk, &dup, &BooleanCircuit::and(), &[c], &mut stream(10, 1)).unwrap();
        assert_eq!(out, vec![Value::bit(m)]);
    }
    let step = rotate_xor();
    for x in 0..16u64 {
        let mut plain = bits_of(x, 4);
        let mut cts: Vec<Value> = plain.iter().map(|&b| Value::bit(b)).collect();
        for _ in 0..10 {
            plain = step.eval(&plain).unwrap();
            cts = h.eval_values(&keys.pk.evk, &step, &cts, &mut stream(11, x)).unwrap();
        }
        let got: Vec<bool> = cts.iter().map(|c| h.decrypt_value(&keys.sk, c).unwrap().as_bit().unwrap()).collect();
        assert_eq!(got, plain);
    }
}

#[test]
fn bootstrapping_after_evaluation_is_not_composable() {
    let params = gsw_fche_params();
    let h = bootstrap_after_eval(&HomSchemeRef::new(GswScheme::new(params)));
    let mut rng = stream(12, 0);
    let keys = h.keygen(SecurityParameter::default(), &mut rng).unwrap();
    let step = rotate_xor();
    // Chains from fresh encryptions stay correct.
    for x in 0..16u64 {
        let mut plain = bits_of(x, 4);
        let mut cts = plain
            .iter()
            .map(|&b| h.encrypt_value(&keys.pk, &Value::bit(b), &mut rng))
            .collect::<Result<Vec<_>, _>>()
            .unwrap();
        for _ in 0..5 {
            plain = step.eval(&plain).unwrap();
            cts = h.eval_values(&keys.pk.evk, &step, &cts, &mut rng).unwrap();
        }
        let got: Vec<bool> = cts.iter().map(|c| h.decrypt_value(&keys.sk, c).unwrap().as_bit().unwrap()).collect();
        assert_eq!(got, plain, "input {x}");
    }
    // Arbitrary ciphertexts go through the raw evaluation first.
    let (index, w) = search_fche_witness(&h, &BooleanCircuit::and(), 100, 0).unwrap().expect("witness");
    assert!(index < 100);
    assert_ne!(w.expected, w.decrypted);
    // The transform has no such witness on the same candidates.
    let fixed = fche_transform(&HomSchemeRef::new(GswScheme::new(gsw_fche_params())));
    assert!(search_fche_witness(&fixed, &BooleanCircuit::and(), 100, 0).unwrap().is_none());
}
