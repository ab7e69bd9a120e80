//! Fully composable homomorphic encryption: evaluation that first
//! recrypts every input through its own key bits, so that decrypting an
//! evaluation equals evaluating on decryptions for every ciphertext, fresh
//! or not.

use rand::RngCore;
use serde::Serialize;

use crate::bridges::Iota;
use crate::circuits::{decryption_function_circuit, recryption_depth_bound, BooleanCircuit, CircuitBuilder, Gate};
use crate::error::{malformed, Error, Result};
use crate::exec::Execution;
use crate::homomorphic::{EvaluableClass, HomSchemeRef, Homomorphic};
use crate::rng;
use crate::scheme::{KeyPair, PublicKey, Scheme, SchemeRef, SecretKey, SecurityParameter};
use crate::value::{Space, Value};

fn reduced_class(base: &HomSchemeRef) -> EvaluableClass {
    match base.evaluable_class() {
        EvaluableClass::All => EvaluableClass::All,
        EvaluableClass::DepthAtMost(d) => {
            EvaluableClass::DepthAtMost(d.saturating_sub(recryption_depth_bound(base.key_bits())))
        }
    }
}

/// Key generation shared by the transform and the bootstrap wrapper:
/// `evk′ = [evk, encryptions of the secret-key bits]`.
fn keygen_with_key_bits(base: &HomSchemeRef, lambda: SecurityParameter, rng: &mut dyn RngCore) -> Result<KeyPair> {
    let keys = base.keygen(lambda, rng)?;
    let pk = extend_public(base, &keys.sk, keys.pk, rng)?;
    Ok(KeyPair { sk: keys.sk, pk })
}

fn extend_public(base: &HomSchemeRef, sk: &SecretKey, pk: PublicKey, rng: &mut dyn RngCore) -> Result<PublicKey> {
    let bits = base.secret_to_bits(sk)?;
    let cts = bits.into_iter().map(|b| base.encrypt_value(&pk, &Value::bit(b), rng)).collect::<Result<Vec<_>>>()?;
    let evk = Value::List(vec![pk.evk.clone(), Value::List(cts)]);
    Ok(pk.with_evk(evk))
}

fn split_evk(evk: &Value) -> Result<(&Value, &[Value])> {
    let [inner, bits] = evk.as_tuple(2)? else { unreachable!() };
    Ok((inner, bits.as_list()?))
}

/// `C ∘ (Dec(·, c₁), …, Dec(·, c_l))` as a circuit on the key bits.
pub fn recryption_circuit(base: &SchemeRef, circuit: &BooleanCircuit, inputs: &[Value]) -> Result<BooleanCircuit> {
    if inputs.len() != circuit.arity() {
        return Err(Error::ArityMismatch { expected: circuit.arity(), found: inputs.len() });
    }
    let space = base.plaintext_space();
    let iota = Iota::identity(&space)?;
    if inputs.is_empty() {
        let mut b = CircuitBuilder::new(base.key_bits());
        let outs = b.replay(circuit, Vec::new());
        return Ok(b.finish(&outs));
    }
    let decs = inputs.iter().map(|c| decryption_function_circuit(base, &iota, c)).collect::<Result<Vec<_>>>()?;
    circuit.compose(&decs)
}

/// The transformed scheme. Encryption and decryption are those of the base
/// scheme; key generation adds encryptions of the key bits to the
/// evaluation key, and evaluation runs on those through the recryption
/// circuit.
pub struct FcheScheme {
    base: HomSchemeRef,
}

pub fn fche_transform(base: &HomSchemeRef) -> HomSchemeRef {
    HomSchemeRef::new(FcheScheme { base: base.clone() })
}

impl Scheme for FcheScheme {
    fn name(&self) -> String {
        format!("fche({})", self.base.name())
    }

    fn ciphertext_tag(&self) -> String {
        self.base.ciphertext_tag()
    }

    fn plaintext_space(&self) -> Space {
        self.base.plaintext_space()
    }

    fn ciphertext_space(&self) -> Space {
        self.base.ciphertext_space()
    }

    fn keygen(&self, lambda: SecurityParameter, rng: &mut dyn RngCore) -> Result<KeyPair> {
        keygen_with_key_bits(&self.base, lambda, rng)
    }

    fn encrypt_value(&self, pk: &PublicKey, m: &Value, rng: &mut dyn RngCore) -> Result<Value> {
        self.base.encrypt_value(pk, m, rng)
    }

    fn decrypt_value(&self, sk: &SecretKey, c: &Value) -> Result<Value> {
        self.base.decrypt_value(sk, c)
    }

    fn key_bits(&self) -> usize {
        self.base.key_bits()
    }

    fn secret_to_bits(&self, sk: &SecretKey) -> Result<Vec<bool>> {
        self.base.secret_to_bits(sk)
    }

    fn secret_from_bits(&self, bits: &[bool]) -> Result<SecretKey> {
        self.base.secret_from_bits(bits)
    }

    fn public_from_secret(&self, sk: &SecretKey, rng: &mut dyn RngCore) -> Result<PublicKey> {
        let pk = self.base.public_from_secret(sk, rng)?;
        extend_public(&self.base, sk, pk, rng)
    }

    fn secret_keys(&self) -> Option<Vec<SecretKey>> {
        self.base.secret_keys()
    }

    fn ciphertext_bits(&self) -> Option<usize> {
        self.base.ciphertext_bits()
    }

    fn ciphertext_to_bits(&self, c: &Value) -> Result<Vec<bool>> {
        self.base.ciphertext_to_bits(c)
    }

    fn ciphertext_from_bits(&self, bits: &[bool]) -> Result<Value> {
        self.base.ciphertext_from_bits(bits)
    }
}

impl Homomorphic for FcheScheme {
    fn evaluable_class(&self) -> EvaluableClass {
        reduced_class(&self.base)
    }

    fn eval_values(
        &self,
        evk: &Value,
        circuit: &BooleanCircuit,
        inputs: &[Value],
        rng: &mut dyn RngCore,
    ) -> Result<Vec<Value>> {
        self.check_class(circuit)?;
        let (inner, key_cts) = split_evk(evk)?;
        let composed = recryption_circuit(&self.base.scheme(), circuit, inputs)?;
        self.base.eval_values(inner, &composed, key_cts, rng)
    }

    fn compact_bound(&self) -> Option<u64> {
        self.base.compact_bound()
    }

    fn serialized_bits(&self, c: &Value) -> u64 {
        self.base.serialized_bits(c)
    }
}

/// Evaluation followed by recryption of each output:
/// `Bootstrap(Eval(evk, C, c₁, …, c_r))`. Chains of evaluations starting
/// from fresh encryptions stay correct, but inputs of unknown provenance
/// go through the plain evaluation first.
pub struct BootstrapAfterEval {
    base: HomSchemeRef,
}

pub fn bootstrap_after_eval(base: &HomSchemeRef) -> HomSchemeRef {
    HomSchemeRef::new(BootstrapAfterEval { base: base.clone() })
}

impl Scheme for BootstrapAfterEval {
    fn name(&self) -> String {
        format!("bootstrap∘eval({})", self.base.name())
    }

    fn ciphertext_tag(&self) -> String {
        self.base.ciphertext_tag()
    }

    fn plaintext_space(&self) -> Space {
        self.base.plaintext_space()
    }

    fn ciphertext_space(&self) -> Space {
        self.base.ciphertext_space()
    }

    fn keygen(&self, lambda: SecurityParameter, rng: &mut dyn RngCore) -> Result<KeyPair> {
        keygen_with_key_bits(&self.base, lambda, rng)
    }

    fn encrypt_value(&self, pk: &PublicKey, m: &Value, rng: &mut dyn RngCore) -> Result<Value> {
        self.base.encrypt_value(pk, m, rng)
    }

    fn decrypt_value(&self, sk: &SecretKey, c: &Value) -> Result<Value> {
        self.base.decrypt_value(sk, c)
    }

    fn key_bits(&self) -> usize {
        self.base.key_bits()
    }

    fn secret_to_bits(&self, sk: &SecretKey) -> Result<Vec<bool>> {
        self.base.secret_to_bits(sk)
    }

    fn secret_from_bits(&self, bits: &[bool]) -> Result<SecretKey> {
        self.base.secret_from_bits(bits)
    }

    fn public_from_secret(&self, sk: &SecretKey, rng: &mut dyn RngCore) -> Result<PublicKey> {
        let pk = self.base.public_from_secret(sk, rng)?;
        extend_public(&self.base, sk, pk, rng)
    }

    fn secret_keys(&self) -> Option<Vec<SecretKey>> {
        self.base.secret_keys()
    }
}

impl Homomorphic for BootstrapAfterEval {
    fn evaluable_class(&self) -> EvaluableClass {
        reduced_class(&self.base)
    }

    fn eval_values(
        &self,
        evk: &Value,
        circuit: &BooleanCircuit,
        inputs: &[Value],
        rng: &mut dyn RngCore,
    ) -> Result<Vec<Value>> {
        self.check_class(circuit)?;
        let (inner, key_cts) = split_evk(evk)?;
        let raw = self.base.eval_values(inner, circuit, inputs, rng)?;
        let identity = BooleanCircuit::identity(1);
        let base = self.base.scheme();
        raw.iter()
            .map(|c| {
                let recrypt = recryption_circuit(&base, &identity, std::slice::from_ref(c))?;
                let mut out = self.base.eval_values(inner, &recrypt, key_cts, rng)?;
                out.pop().ok_or_else(|| malformed("recryption produced no output"))
            })
            .collect()
    }

    fn compact_bound(&self) -> Option<u64> {
        self.base.compact_bound()
    }

    fn serialized_bits(&self, c: &Value) -> u64 {
        self.base.serialized_bits(c)
    }
}

/// `eval(C₂, eval(C₁, inputs))`.
pub fn fche_compose_eval(
    s: &HomSchemeRef,
    pk: &PublicKey,
    first: &BooleanCircuit,
    second: &BooleanCircuit,
    inputs: &[Value],
    rng: &mut dyn RngCore,
) -> Result<Vec<Value>> {
    if first.num_outputs() != second.arity() {
        return Err(Error::ArityMismatch { expected: second.arity(), found: first.num_outputs() });
    }
    let mid = s.eval_values(&pk.evk, first, inputs, rng)?;
    s.eval_values(&pk.evk, second, &mid, rng)
}

/// Circuit and ciphertexts on which decrypting the evaluation differs from
/// evaluating the decryptions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FcheWitness {
    pub circuit: String,
    pub secret_key: Value,
    pub inputs: Vec<Value>,
    pub decrypted_inputs: Vec<bool>,
    pub expected: Vec<bool>,
    pub decrypted: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FcheReport {
    pub scheme: String,
    pub exhaustive: bool,
    pub checked: u64,
    pub holds: bool,
    pub witness: Option<FcheWitness>,
    pub seed: u64,
}

fn check_instance(
    s: &HomSchemeRef,
    keys: &KeyPair,
    circuit: &BooleanCircuit,
    inputs: Vec<Value>,
    rng: &mut dyn RngCore,
) -> Result<Option<FcheWitness>> {
    let decrypted_inputs = inputs.iter().map(|c| s.decrypt_value(&keys.sk, c)?.as_bit()).collect::<Result<Vec<_>>>()?;
    let expected = circuit.eval(&decrypted_inputs)?;
    let outs = s.eval_values(&keys.pk.evk, circuit, &inputs, rng)?;
    let decrypted = outs.iter().map(|c| s.decrypt_value(&keys.sk, c)?.as_bit()).collect::<Result<Vec<_>>>()?;
    Ok((decrypted != expected).then(|| FcheWitness {
        circuit: circuit.to_text(),
        secret_key: keys.sk.value().clone(),
        inputs,
        decrypted_inputs,
        expected,
        decrypted,
    }))
}

/// Samples `trials` (key, circuit, input tuple) instances with inputs drawn
/// uniformly from the whole ciphertext space, and checks
/// `Dec(Eval(C, c⃗)) = C(Dec(c⃗))` on each.
pub fn check_fche<F>(s: &HomSchemeRef, circuits: F, trials: u64, seed: u64) -> Result<FcheReport>
where
    F: Fn(&mut dyn RngCore) -> BooleanCircuit + Sync + Send,
{
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let space = s.ciphertext_space();
    let hit = Execution::default().find_first(trials as usize, |i| {
        let mut rng = rng::stream(seed, i as u64);
        let outcome = s.keygen(SecurityParameter::default(), &mut rng).and_then(|keys| {
            let circuit = circuits(&mut rng);
            let inputs = (0..circuit.arity()).map(|_| space.sample(&mut rng)).collect();
            check_instance(s, &keys, &circuit, inputs, &mut rng)
        });
        outcome.transpose()
    });
    let (checked, witness) = match hit {
        Some((i, w)) => (i as u64 + 1, Some(w?)),
        None => (trials, None),
    };
    Ok(FcheReport { scheme: s.name(), exhaustive: false, checked, holds: witness.is_none(), witness, seed })
}

/// Every listed key, every given circuit and every tuple of ciphertexts
/// from an enumerable ciphertext space.
pub fn check_fche_exhaustive(s: &HomSchemeRef, circuits: &[BooleanCircuit], seed: u64) -> Result<FcheReport> {
    let space = s.ciphertext_space();
    let size = space.size().ok_or_else(|| Error::NonEnumerableSpace(space.name().to_string()))?;
    let secrets = s.secret_keys().ok_or_else(|| Error::NonEnumerableSpace(format!("key space of {}", s.name())))?;
    let key_seed = rng::subseed(seed, 1);
    let keys = Execution::default().try_map(secrets.len(), |i| {
        let mut rng = rng::stream(key_seed, i as u64);
        let pk = s.public_from_secret(&secrets[i], &mut rng)?;
        Ok::<_, Error>(KeyPair { sk: secrets[i].clone(), pk })
    })?;
    let mut instances: Vec<(usize, usize, u64)> = Vec::new();
    for k in 0..keys.len() {
        for (ci, c) in circuits.iter().enumerate() {
            let tuples = size
                .checked_pow(c.arity() as u32)
                .ok_or_else(|| Error::NonEnumerableSpace(space.name().to_string()))?;
            instances.extend((0..tuples).map(|t| (k, ci, t)));
        }
    }
    let eval_seed = rng::subseed(seed, 2);
    let hit = Execution::default().find_first(instances.len(), |i| {
        let (k, ci, mut t) = instances[i];
        let circuit = &circuits[ci];
        let mut inputs = vec![Value::empty(); circuit.arity()];
        for slot in inputs.iter_mut().rev() {
            match space.element(t % size) {
                Ok(v) => *slot = v,
                Err(e) => return Some(Err(e)),
            }
            t /= size;
        }
        let mut rng = rng::stream(eval_seed, i as u64);
        check_instance(s, &keys[k], circuit, inputs, &mut rng).transpose()
    });
    let (checked, witness) = match hit {
        Some((i, w)) => (i as u64 + 1, Some(w?)),
        None => (instances.len() as u64, None),
    };
    Ok(FcheReport { scheme: s.name(), exhaustive: true, checked, holds: witness.is_none(), witness, seed })
}

/// Every circuit with up to `max_gates` gates on `arity` inputs, one
/// output per wire, gate operands in non-decreasing order.
pub fn small_circuits(arity: usize, max_gates: usize) -> Vec<BooleanCircuit> {
    let mut out = Vec::new();
    let mut gates = Vec::new();
    enumerate_gates(arity, max_gates, &mut gates, &mut out);
    out
}

fn enumerate_gates(arity: usize, budget: usize, gates: &mut Vec<Gate>, out: &mut Vec<BooleanCircuit>) {
    let wires = arity + gates.len();
    for w in 0..wires {
        if let Ok(c) = BooleanCircuit::new(arity, gates.clone(), vec![w]) {
            out.push(c);
        }
    }
    if budget == 0 {
        return;
    }
    let mut options = vec![Gate::Const(false), Gate::Const(true)];
    for a in 0..wires {
        for b in a..wires {
            options.push(Gate::Xor(a, b));
            options.push(Gate::And(a, b));
        }
    }
    for g in options {
        gates.push(g);
        enumerate_gates(arity, budget - 1, gates, out);
        gates.pop();
    }
}

/// A fresh encryption of 1 multiplied by itself until its noise breaks
/// decryption of the square, found by scanning seeds. The witness circuit
/// is a single AND gate fed the same ciphertext twice.
pub fn raw_squaring_witness(
    h: &HomSchemeRef,
    max_squarings: usize,
    seeds: u64,
    seed: u64,
) -> Result<Option<FcheWitness>> {
    let square = BooleanCircuit::new(1, vec![Gate::And(0, 0)], vec![1])?;
    for i in 0..seeds {
        let mut rng = rng::stream(seed, i);
        let keys = h.keygen(SecurityParameter::default(), &mut rng)?;
        let mut c = h.encrypt_value(&keys.pk, &Value::bit(true), &mut rng)?;
        for _ in 0..max_squarings {
            if let Some(w) = check_instance(h, &keys, &square, vec![c.clone()], &mut rng)? {
                return Ok(Some(w));
            }
            c = h.eval_values(&keys.pk.evk, &square, &[c], &mut rng)?.remove(0);
        }
    }
    Ok(None)
}

/// Inputs drawn uniformly from the ciphertext space, searched for a case
/// where `Dec(Eval(C, c⃗)) ≠ C(Dec(c⃗))`.
pub fn search_fche_witness(
    s: &HomSchemeRef,
    circuit: &BooleanCircuit,
    candidates: u64,
    seed: u64,
) -> Result<Option<(u64, FcheWitness)>> {
    let space = s.ciphertext_space();
    let hit = Execution::default().find_first(candidates as usize, |i| {
        let mut rng = rng::stream(seed, i as u64);
        let outcome = s.keygen(SecurityParameter::default(), &mut rng).and_then(|keys| {
            let inputs = (0..circuit.arity()).map(|_| space.sample(&mut rng)).collect();
            check_instance(s, &keys, circuit, inputs, &mut rng)
        });
        outcome.transpose()
    });
    match hit {
        Some((i, w)) => Ok(Some((i as u64, w?))),
        None => Ok(None),
    }
}
