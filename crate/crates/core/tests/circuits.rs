use bridgelab_core::bridges::Iota;
use bridgelab_core::circuits::*;
use bridgelab_core::rng::stream;
use bridgelab_core::schemes::{LweParams, LweScheme};
use bridgelab_core::SchemeRef;
use proptest::prelude::*;

fn bits_of(x: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| (x >> i) & 1 == 1).collect()
}

fn arb_circuit(max_arity: usize, max_gates: usize) -> impl Strategy<Value = BooleanCircuit> {
    (1..=max_arity, 0..=max_gates, 1usize..=3, any::<u64>())
        .prop_map(|(arity, gates, outs, seed)| random_circuit(arity, gates, outs, &mut stream(seed, 0)))
}

#[test]
fn gate_examples() {
    assert_eq!(BooleanCircuit::xor().eval(&[true, true]).unwrap(), vec![false]);
    let c = BooleanCircuit::new(2, vec![Gate::Xor(0, 1), Gate::And(2, 0)], vec![3]).unwrap();
    assert_eq!(c.eval(&[true, false]).unwrap(), vec![true]);
    assert!(c.eval(&[true]).is_err());
    let adder = BooleanCircuit::full_adder();
    for x in 0..8u64 {
        let out = adder.eval(&bits_of(x, 3)).unwrap();
        let sum = (x & 1) + ((x >> 1) & 1) + ((x >> 2) & 1);
        assert_eq!(out[0] as u64 + 2 * out[1] as u64, sum);
    }
}

#[test]
fn lifted_gates_in_a_power_of_two_ring() {
    let ring = ModRing::new(1 << 40).unwrap();
    assert_eq!(oplus(&ring, &1, &1), 0);
    assert_eq!(oplus(&ring, &1, &0), 1);
    assert!(two_element_field_equations(&ring).iter().all(|e| e.holds));
    assert_eq!(two_element_field_equations(&ring).len(), 8);
}

#[test]
fn arithmetization_matches_boolean_evaluation_on_full_truth_tables() {
    let ring = ModRing::new(1 << 40).unwrap();
    let mut rng = stream(77, 0);
    for i in 0..100 {
        let arity = 1 + i % 10;
        let c = random_circuit(arity, 8, 2, &mut rng);
        let rc = arithmetize(&c);
        assert_eq!(rc.nodes().len(), c.wire_count());
        for x in 0..1u64 << arity {
            let bits = bits_of(x, arity);
            let lifted: Vec<u128> = bits.iter().map(|&b| ring.embed(b)).collect();
            assert_eq!(rc.decide(&ring, &lifted).unwrap(), c.eval(&bits).unwrap());
        }
    }
}

#[test]
fn decryption_circuit_of_the_smallest_lwe() {
    let scheme = SchemeRef::new(LweScheme::new(LweParams::new(1, 4, 0).unwrap()));
    let iota = Iota::identity(&scheme.plaintext_space()).unwrap();
    let circuit = compile_decryption_circuit(&scheme, &iota).unwrap();
    assert_eq!(circuit.arity(), 6);
    let keys = scheme.secret_keys().unwrap();
    assert_eq!(keys.len(), 4);
    let mut agreed = 0;
    for sk in &keys {
        let kbits = scheme.secret_to_bits(sk).unwrap();
        for c in scheme.ciphertext_space().iter().unwrap() {
            let mut input = kbits.clone();
            input.extend(scheme.ciphertext_to_bits(&c).unwrap());
            let want = scheme.decrypt_value(sk, &c).unwrap().as_bit().unwrap();
            assert_eq!(circuit.eval(&input).unwrap(), vec![want]);
            let folded = circuit.partial_apply(&scheme.ciphertext_to_bits(&c).unwrap()).unwrap();
            assert_eq!(folded.eval(&kbits).unwrap(), vec![want]);
            let direct = decryption_function_circuit(&scheme, &iota, &c).unwrap();
            assert_eq!(direct.eval(&kbits).unwrap(), vec![want]);
            agreed += 1;
        }
    }
    assert_eq!(agreed, 64);
    // Frozen: the Shannon synthesis over 6 wires stays within 2·6 − 1.
    assert!(circuit.depth() <= recryption_depth_bound(6));
    assert_eq!(recryption_depth_bound(2), 3);
}

#[test]
fn partial_apply_on_random_lwe_ciphertexts() {
    let scheme = SchemeRef::new(LweScheme::new(LweParams::new(1, 8, 0).unwrap()));
    let iota = Iota::identity(&scheme.plaintext_space()).unwrap();
    let circuit = compile_decryption_circuit(&scheme, &iota).unwrap();
    let mut rng = stream(3, 0);
    for _ in 0..50 {
        let c = scheme.sample_ciphertext(&mut rng).into_value();
        let folded = circuit.partial_apply(&scheme.ciphertext_to_bits(&c).unwrap()).unwrap();
        for sk in scheme.secret_keys().unwrap() {
            let want = scheme.decrypt_value(&sk, &c).unwrap().as_bit().unwrap();
            assert_eq!(folded.eval(&scheme.secret_to_bits(&sk).unwrap()).unwrap(), vec![want]);
        }
    }
}

#[test]
fn key_independent_decryption_ignores_key_wires() {
    // A one-bit scheme whose decryption is the identity on the ciphertext
    // bit: the circuit must not depend on the key wires.
    let scheme = SchemeRef::new(bridgelab_core::homomorphic::TrivialFhe);
    let iota = Iota::identity(&scheme.plaintext_space()).unwrap();
    let circuit = compile_decryption_circuit(&scheme, &iota).unwrap();
    let e = scheme.key_bits();
    for x in 0..1u64 << circuit.arity() {
        let mut bits = bits_of(x, circuit.arity());
        let out = circuit.eval(&bits).unwrap();
        for b in bits.iter_mut().take(e) {
            *b = !*b;
        }
        assert_eq!(circuit.eval(&bits).unwrap(), out);
        assert_eq!(out, vec![bits[e]]);
    }
}

#[test]
fn text_and_json_formats() {
    let text = "inputs 2\n# comment\nt = OR x0 x1\nu = NOT t\noutputs u t\n";
    let c = BooleanCircuit::from_text(text).unwrap();
    for x in 0..4u64 {
        let b = bits_of(x, 2);
        let or = b[0] | b[1];
        assert_eq!(c.eval(&b).unwrap(), vec![!or, or]);
    }
    assert!(BooleanCircuit::from_text("inputs 1\ng1 = AND x0 x9\noutputs g1").is_err());
    assert!(BooleanCircuit::new(1, vec![Gate::And(0, 1)], vec![1]).is_err());
    assert!(BooleanCircuit::new(1, vec![], vec![]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip(c in arb_circuit(6, 20)) {
        prop_assert_eq!(BooleanCircuit::from_text(&c.to_text()).unwrap(), c.clone());
        prop_assert_eq!(BooleanCircuit::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn arithmetization_agrees_with_eval(c in arb_circuit(10, 12), modulus_bits in 2u32..=64) {
        let ring = ModRing::new(1u128 << modulus_bits).unwrap();
        let rc = arithmetize(&c);
        let table = c.truth_table().unwrap();
        for x in 0..1u64 << c.arity() {
            let bits = bits_of(x, c.arity());
            let lifted: Vec<u128> = bits.iter().map(|&b| ring.embed(b)).collect();
            let got = rc.decide(&ring, &lifted).unwrap();
            let want: Vec<bool> = table.iter().map(|t| (t[(x / 64) as usize] >> (x % 64)) & 1 == 1).collect();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn synthesis_is_exact_and_within_depth_bound(c in arb_circuit(9, 25)) {
        let table = c.truth_table().unwrap();
        let s = synthesize(c.arity(), &table).unwrap();
        prop_assert_eq!(s.truth_table().unwrap(), table);
        prop_assert!(s.depth() <= recryption_depth_bound(c.arity()));
    }

    #[test]
    fn constant_folding_keeps_semantics(c in arb_circuit(10, 20), fixed in 0usize..=4, x in any::<u64>()) {
        let fixed = fixed.min(c.arity());
        let suffix = bits_of(x, fixed);
        let folded = c.partial_apply(&suffix).unwrap();
        let rest = c.arity() - fixed;
        prop_assert_eq!(folded.arity(), rest);
        for y in 0..1u64 << rest {
            let mut full = bits_of(y, rest);
            full.extend(&suffix);
            prop_assert_eq!(folded.eval(&bits_of(y, rest)).unwrap(), c.eval(&full).unwrap());
        }
    }

    #[test]
    fn composition_is_function_composition(a in arb_circuit(4, 10), x in any::<u64>(), seed in any::<u64>()) {
        let b = random_circuit(a.num_outputs(), 6, 2, &mut stream(seed, 1));
        let ab = a.then(&b).unwrap();
        let bits = bits_of(x, a.arity());
        prop_assert_eq!(ab.eval(&bits).unwrap(), b.eval(&a.eval(&bits).unwrap()).unwrap());
    }
}

#[test]
fn fixing_every_input_gives_a_constant_circuit() {
    let c = BooleanCircuit::full_adder();
    let folded = c.partial_apply(&[true, false, true]).unwrap();
    assert_eq!(folded.arity(), 0);
    assert_eq!(folded.eval(&[]).unwrap(), c.eval(&[true, false, true]).unwrap());
    assert!(c.partial_apply(&[true; 4]).is_err());
}
