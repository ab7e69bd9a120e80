//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line with
//! its runtime; the test fails if any criterion does.

use std::process::Command;
use std::time::{Duration, Instant};

use bridgelab_core::bridges::*;
use bridgelab_core::circuits::{
    arithmetize, random_circuit, two_element_field_equations, BooleanCircuit, Gate, ModRing,
};
use bridgelab_core::fche::*;
use bridgelab_core::gentry::{gentry_bridge, RecryptVariant};
use bridgelab_core::harness::{
    byte_parity, halfkey_attacker, random_guess, run_bridge_indcpa, run_distinguisher, run_indcpa, Frontend,
};
use bridgelab_core::homomorphic::{EvaluableClass, HomSchemeRef, TrivialFhe};
use bridgelab_core::params::Preset;
use bridgelab_core::registry::Registry;
use bridgelab_core::rng::stream;
use bridgelab_core::{SecurityParameter, Value};

type Outcome = Result<(), String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn lib<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn trivial() -> HomSchemeRef {
    HomSchemeRef::new(TrivialFhe)
}

fn bits_of(x: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| (x >> i) & 1 == 1).collect()
}

fn correctness(reg: &Registry) -> Outcome {
    let mut ids = vec!["lwe-additive".to_string(), "modswitch".into(), "gm-identity".into()];
    ids.extend(["xor", "and", "full-adder", "identity"].map(|c| format!("circuit:trivial:{c}")));
    let additive = lib(reg.presets().get("lwe-additive"))?;
    ensure(matches!(additive, Preset::Lwe { q: 32, noise_bound: 1, .. }), || format!("{additive:?}"))?;
    for id in ids {
        let b = lib(reg.bridge(&id, None))?;
        let r = lib(check_bridge_correct(&b, 10_000, 0))?;
        ensure(r.trials == 10_000 && r.failures == 0, || format!("{id}: {} failures", r.failures))?;
    }
    Ok(())
}

fn completeness(reg: &Registry) -> Outcome {
    let switch = lib(reg.bridge("modswitch", None))?;
    ensure(switch.source().ciphertext_space().size() == Some(36), || "modswitch source is not Z6²".into())?;
    let r = lib(check_complete(&switch, CheckMode::Exhaustive, DEFAULT_EXHAUSTIVE_BUDGET, 0))?;
    ensure(r.complete && r.keys_exhaustive && r.checked == 6 * 36, || format!("modswitch: {r:?}"))?;

    let inner = lib(reg.scheme("lwe-n1q4"))?;
    for variant in [RecryptVariant::Folded, RecryptVariant::EncryptedBits] {
        let b = lib(gentry_bridge(&inner, &trivial(), KeyMode::Independent, variant))?;
        let r = lib(check_complete(&b, CheckMode::Exhaustive, DEFAULT_EXHAUSTIVE_BUDGET, 0))?;
        ensure(r.complete && r.checked == 64, || format!("{}: {r:?}", b.name()))?;
    }

    let additive = lib(reg.bridge("lwe-additive", Some("lwe-toy")))?;
    let pinned = lib(Value::from_json("[[[0,0],3],[[0,0],3]]"))?;
    let zero_key = lib(additive.source().secret_keys().ok_or("keys"))?[0].clone();
    ensure(zero_key.value() == &Value::ints([0, 0]), || "first key is not (0,0)".into())?;
    let w = lib(violates_completeness(&additive, &zero_key, &pinned, 0))?;
    let w = w.ok_or("pinned pair converts correctly")?;
    // Phase 3 + 3 = 6 ≥ 16/4 rounds to 1; each part decrypts to 0.
    ensure(w.expected == Value::bit(false) && w.decrypted == Value::bit(true), || format!("{w:?}"))?;
    let r = lib(check_complete(&additive, CheckMode::Exhaustive, DEFAULT_EXHAUSTIVE_BUDGET, 0))?;
    ensure(!r.complete, || "additive bridge reported complete".into())
}

fn composition(reg: &Registry) -> Outcome {
    let first = lib(modswitch_bridge(1, 6, 18, 0))?;
    let second = lib(modswitch_bridge(1, 18, 54, 0))?;
    let (f, g) = lib(halfkey_bridges(&lib(reg.scheme("lwe-n1q4"))?))?;
    let t =
        lib(gentry_bridge(&lib(reg.scheme("lwe-n1q4"))?, &trivial(), KeyMode::Independent, RecryptVariant::Folded))?;
    let id = lib(identity_bridge(&lib(reg.scheme("lwe-n1q4"))?))?;
    let pairs = [(first, second), (f.clone(), g.clone()), (id, t)];
    for (a, b) in &pairs {
        for part in [a, b] {
            let r = lib(check_complete(part, CheckMode::Exhaustive, DEFAULT_EXHAUSTIVE_BUDGET, 0))?;
            ensure(r.complete, || format!("{} is not complete", part.name()))?;
        }
        let ab = lib(compose(a, b))?;
        let r = lib(check_complete(&ab, CheckMode::Exhaustive, DEFAULT_EXHAUSTIVE_BUDGET, 0))?;
        ensure(r.complete && r.keys_exhaustive, || format!("{}: {r:?}", ab.name()))?;
    }

    // Anything followed by a complete bridge is correct.
    let mut any_then_complete = vec![lib(reg.bridge("gentry-composed", None))?];
    for first in [f, g] {
        let into_trivial =
            lib(gentry_bridge(first.target(), &trivial(), KeyMode::Independent, RecryptVariant::Folded))?;
        any_then_complete.push(lib(compose(&first, &into_trivial))?);
    }
    for b in &any_then_complete {
        ensure(b.correctness() == CorrectnessStatus::ImpliedByCompleteness, || b.name().to_string())?;
        let r = lib(check_bridge_correct(b, 10_000, 0))?;
        ensure(r.failures == 0, || format!("{}: {} failures", b.name(), r.failures))?;
    }

    let double = lib(reg.bridge("double-additive", None))?;
    let r = lib(search_correctness_counterexample(&double, 1_000_000, 0))?;
    ensure(r.found && r.candidate_index.is_some_and(|i| i < 1_000_000), || format!("{r:?}"))
}

fn halfkey_attack(reg: &Registry) -> Outcome {
    let small = lib(reg.scheme("lwe-n1q4"))?;
    let (f, g) = lib(halfkey_bridges(&small))?;
    for b in [&f, &g] {
        let r = lib(check_bridge_correct(b, 10_000, 0))?;
        ensure(r.failures == 0, || format!("{} incorrect", b.name()))?;
        let r = lib(check_complete(b, CheckMode::Exhaustive, DEFAULT_EXHAUSTIVE_BUDGET, 0))?;
        ensure(r.complete && r.keys_exhaustive, || format!("{} incomplete", b.name()))?;
    }
    for preset in ["lwe-toy", "lwe-n1q4"] {
        let base = lib(reg.scheme(preset))?;
        let (f, g) = lib(halfkey_bridges(&base))?;
        let attacker = halfkey_attacker(&base, Frontend::Augmented);
        for b in [&f, &g] {
            let r = lib(check_bridge_correct(b, 10_000, 1))?;
            ensure(r.failures == 0, || format!("{preset} {} incorrect", b.name()))?;
            let game = lib(run_bridge_indcpa(b, attacker.as_ref(), 1_000, 0))?;
            ensure(game.abstentions == 1_000 && game.advantage <= game.ci && game.ci <= 0.052, || {
                format!("{preset} {}: {game:?}", b.name())
            })?;
        }
        let composed = lib(compose(&f, &g))?;
        let game = lib(run_bridge_indcpa(&composed, attacker.as_ref(), 1_000, 0))?;
        ensure(game.advantage == 1.0, || format!("{preset} composed: {}", game.advantage))?;
    }
    Ok(())
}

fn fche(reg: &Registry) -> Outcome {
    let transformed = fche_transform(&trivial());
    let mut circuits = small_circuits(1, 3);
    circuits.extend(small_circuits(2, 3));
    let r = lib(check_fche_exhaustive(&transformed, &circuits, 0))?;
    let tuples: u64 = circuits.iter().map(|c| 1u64 << c.arity()).sum();
    ensure(r.holds && r.checked == tuples, || format!("trivial: {:?}", r.witness))?;

    let preset = lib(reg.presets().get("gsw-fche"))?;
    let params = lib(preset.gsw_params())?;
    ensure(params.certifies(params.depth_budget), || "gsw-fche noise budget not certified".into())?;
    let base = lib(reg.hom_scheme("gsw-fche"))?;
    let h = fche_transform(&base);
    ensure(h.evaluable_class() == EvaluableClass::DepthAtMost(3), || format!("{:?}", h.evaluable_class()))?;
    let r = lib(check_fche(&h, |rng| random_circuit(2, 3, 1, rng), 500, 0))?;
    ensure(r.holds && r.checked == 500, || format!("gsw: {:?}", r.witness))?;
    let w = lib(raw_squaring_witness(&base, 16, 32, 0))?;
    ensure(w.is_some_and(|w| w.expected != w.decrypted), || "raw GSW passed".into())
}

fn bootstrap(reg: &Registry) -> Outcome {
    let h = bootstrap_after_eval(&lib(reg.hom_scheme("gsw-fche"))?);
    let gates = (0..4).map(|i| Gate::Xor(i, (i + 1) % 4)).collect();
    let step = lib(BooleanCircuit::new(4, gates, vec![4, 5, 6, 7]))?;
    let mut rng = stream(3, 0);
    let keys = lib(h.keygen(SecurityParameter::default(), &mut rng))?;
    for x in 0..16u64 {
        let mut plain = bits_of(x, 4);
        let mut cts = Vec::new();
        for &b in &plain {
            cts.push(lib(h.encrypt_value(&keys.pk, &Value::bit(b), &mut rng))?);
        }
        for _ in 0..5 {
            // Oracle: rotate-and-xor on plain bits.
            plain = (0..4).map(|i| plain[i] ^ plain[(i + 1) % 4]).collect();
            cts = lib(h.eval_values(&keys.pk.evk, &step, &cts, &mut rng))?;
        }
        for (c, &want) in cts.iter().zip(&plain) {
            let got = lib(lib(h.decrypt_value(&keys.sk, c))?.as_bit())?;
            ensure(got == want, || format!("fresh chain from {x:04b} decrypts wrongly"))?;
        }
    }
    let found = lib(search_fche_witness(&h, &BooleanCircuit::and(), 1_000, 0))?;
    ensure(found.is_some_and(|(_, w)| w.expected != w.decrypted), || "no witness on arbitrary inputs".into())
}

/// Lifted evaluation with the formulas written out directly.
fn lifted_oracle(c: &BooleanCircuit, inputs: &[u128], modulus: u128) -> Vec<u128> {
    let mut wires: Vec<u128> = inputs.to_vec();
    for g in c.gates() {
        let v = match *g {
            Gate::Const(b) => b as u128,
            Gate::And(a, b) => wires[a] * wires[b] % modulus,
            Gate::Xor(a, b) => {
                let s = (wires[a] + wires[b]) % modulus;
                (2 * s + modulus * modulus - s * s % modulus) % modulus
            }
        };
        wires.push(v);
    }
    c.outputs().iter().map(|&o| wires[o]).collect()
}

fn arithmetization(_: &Registry) -> Outcome {
    let modulus = 1u128 << 40;
    let ring = lib(ModRing::new(modulus))?;
    ensure(two_element_field_equations(&ring).iter().all(|e| e.holds), || "field equations fail".into())?;
    let mut rng = stream(17, 0);
    for i in 0..100 {
        let arity = 1 + i % 10;
        let c = random_circuit(arity, 12, 2, &mut rng);
        let rc = arithmetize(&c);
        for x in 0..1u64 << arity {
            let bits = bits_of(x, arity);
            let lifted: Vec<u128> = bits.iter().map(|&b| b as u128).collect();
            let want = lib(c.eval(&bits))?;
            let oracle: Vec<bool> = lifted_oracle(&c, &lifted, modulus).iter().map(|&v| v == 1).collect();
            let got = lib(rc.decide(&ring, &lifted))?;
            ensure(got == want && oracle == want, || format!("circuit {i} on {x:b}"))?;
        }
    }
    Ok(())
}

fn cli(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_bridgelab"))
        .args(args)
        .env_remove("BRIDGELAB_SEED")
        .output()
        .expect("binary runs");
    (out.status.code(), out.stdout)
}

const SUBCOMMANDS: &[&[&str]] = &[
    &["check", "correct", "identity", "--trials", "2000"],
    &["check", "complete", "modswitch", "--mode", "exhaustive"],
    &["check", "complete", "lwe-additive", "--preset", "lwe-toy", "--mode", "sampled", "--budget", "500"],
    &["demo", "halfkey-attack", "--trials", "300"],
    &["demo", "gentry-complete", "--inner", "lwe-n1q4", "--outer", "trivial"],
    &["demo", "fche", "--trials", "50"],
    &["demo", "bootstrap-not-fche", "--candidates", "20"],
    &["experiment", "indcpa", "--scheme", "lwe-toy", "--adversary", "random-guess", "--trials", "300"],
    &["experiment", "bridge-indcpa", "--bridge", "halfkey-composed", "--adversary", "reassembly", "--trials", "300"],
    &["experiment", "distinguish", "--a", "gentry-real", "--b", "gentry-zero", "--d", "byte-parity", "--trials", "300"],
    &["list"],
    &["params"],
];

fn harness_statistics(reg: &Registry) -> Outcome {
    let scheme = lib(reg.scheme("lwe-toy"))?;
    let adv = random_guess();
    let mut inside = 0;
    for seed in 0..100 {
        inside += lib(run_indcpa(&scheme, adv.as_ref(), 1_000, seed))?.consistent_with_zero_advantage() as u32;
    }
    ensure(inside >= 97, || format!("only {inside}/100 runs inside the interval"))?;
    for args in SUBCOMMANDS {
        let mut full = args.to_vec();
        full.extend(["--seed", "11"]);
        let (code_a, a) = cli(&full);
        let (code_b, b) = cli(&full);
        ensure(code_a == code_b && a == b && !a.is_empty(), || format!("`{}` is not deterministic", args.join(" ")))?;
        let expected = if args.starts_with(&["check", "complete", "lwe-additive"]) { 1 } else { 0 };
        ensure(code_a == Some(expected), || format!("`{}` exited {code_a:?}", args.join(" ")))?;
    }
    Ok(())
}

#[test]
fn acceptance() {
    let reg = Registry::default();
    type Criterion = fn(&Registry) -> Outcome;
    let criteria: [(&str, Criterion, Duration); 8] = [
        ("1 bridge correctness", correctness, Duration::from_secs(10)),
        ("2 completeness", completeness, Duration::from_secs(5)),
        ("3 composition", composition, Duration::from_secs(60)),
        ("4 half-key attack", halfkey_attack, Duration::from_secs(10)),
        ("5 composable evaluation", fche, Duration::from_secs(300)),
        ("6 bootstrap after eval", bootstrap, Duration::from_secs(60)),
        ("7 arithmetization", arithmetization, Duration::from_secs(10)),
        ("8 harness statistics", harness_statistics, Duration::from_secs(120)),
    ];
    let mut failed = Vec::new();
    println!();
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run(&reg);
        let took = start.elapsed();
        let outcome = outcome.and_then(|()| ensure(took <= limit, || format!("took {took:.2?}, limit {limit:?}")));
        match &outcome {
            Ok(()) => println!("PASS  criterion {name} ({took:.2?})"),
            Err(why) => {
                println!("FAIL  criterion {name} ({took:.2?}): {why}");
                failed.push(name);
            }
        }
    }

    // Not a criterion: one fixed distinguisher says nothing about all of them.
    let (real, zero) = (reg.sampler("gentry-real").unwrap(), reg.sampler("gentry-zero").unwrap());
    let r = run_distinguisher(&real, &zero, &byte_parity(), 1_000, 1).unwrap();
    println!(
        "INFO  byte-parity on real vs zero recryption keys: advantage {:.4} (ci {:.4}, heuristic only)",
        r.advantage, r.ci
    );

    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
