//! Recryption bridges: evaluate the source decryption homomorphically under
//! a second scheme, with the source key encrypted bitwise as the bridge key.
//! Also circuit bridges, which run one homomorphic evaluation per
//! conversion.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::RngCore;
use serde::Serialize;

use crate::bridges::{
    compose, concat_bridges, search_correctness_counterexample, Bridge, BridgeAlgorithm, BridgeKey,
    CounterexampleReport, GentryMeta, Iota, KeyMode, CIRCULAR_SECURITY_ASSUMED,
};
use crate::circuits::{
    compile_decryption_circuit, decryption_function_circuit, recryption_depth_bound, BooleanCircuit,
};
use crate::error::{Error, Result};
use crate::homomorphic::{EvaluableClass, HomSchemeRef};
use crate::scheme::{fiber_power, KeyPair, PublicKey, SchemeRef, SecurityParameter};
use crate::value::Value;

/// How the source ciphertext enters the homomorphic evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecryptVariant {
    /// Ciphertext bits are folded into the circuit, which then depends on
    /// the key bits only.
    Folded,
    /// Ciphertext bits are encrypted under the target key and fed to the
    /// full decryption circuit alongside the key bits.
    EncryptedBits,
}

impl RecryptVariant {
    fn label(self) -> &'static str {
        match self {
            RecryptVariant::Folded => "folded",
            RecryptVariant::EncryptedBits => "encrypted-bits",
        }
    }
}

struct Recrypt {
    inner: SchemeRef,
    outer: HomSchemeRef,
    iota: Iota,
    mode: KeyMode,
    variant: RecryptVariant,
    full: Option<BooleanCircuit>,
    folded: Mutex<HashMap<Value, Arc<BooleanCircuit>>>,
}

impl Recrypt {
    fn folded_circuit(&self, c: &Value) -> Result<Arc<BooleanCircuit>> {
        if let Some(circuit) = self.folded.lock().expect("cache lock").get(c) {
            return Ok(circuit.clone());
        }
        let circuit = Arc::new(decryption_function_circuit(&self.inner, &self.iota, c)?);
        self.folded.lock().expect("cache lock").insert(c.clone(), circuit.clone());
        Ok(circuit)
    }

    fn encrypt_key_bits(&self, source: &KeyPair, under: &PublicKey, rng: &mut dyn RngCore) -> Result<Value> {
        let bits = self.inner.secret_to_bits(&source.sk)?;
        let cts = bits
            .into_iter()
            .map(|b| self.outer.encrypt_value(under, &Value::bit(b), rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(Value::List(cts))
    }
}

impl BridgeAlgorithm for Recrypt {
    fn derive(
        &self,
        source: &KeyPair,
        lambda: SecurityParameter,
        rng: &mut dyn RngCore,
    ) -> Result<(KeyPair, BridgeKey)> {
        let target = match self.mode {
            KeyMode::Independent => self.outer.keygen(lambda, rng)?,
            KeyMode::Shared => source.clone(),
            KeyMode::Derived => return Err(Error::WrongKeyMode("recryption keys are independent or shared".into())),
        };
        let bk = self.encrypt_key_bits(source, &target.pk, rng)?;
        Ok((target, BridgeKey::Data(bk)))
    }

    fn convert(&self, bk: &BridgeKey, target_pk: &PublicKey, c: &Value, rng: &mut dyn RngCore) -> Result<Value> {
        let key_cts = bk.data()?.as_list()?.to_vec();
        let out = match self.variant {
            RecryptVariant::Folded => {
                let circuit = self.folded_circuit(c)?;
                self.outer.eval_values(&target_pk.evk, &circuit, &key_cts, rng)?
            }
            RecryptVariant::EncryptedBits => {
                let circuit = self.full.as_ref().ok_or_else(|| {
                    Error::NonEnumerableSpace(format!("{} has no compiled decryption circuit", self.inner.name()))
                })?;
                let mut inputs = key_cts;
                for bit in self.inner.ciphertext_to_bits(c)? {
                    inputs.push(self.outer.encrypt_value(target_pk, &Value::bit(bit), rng)?);
                }
                self.outer.eval_values(&target_pk.evk, circuit, &inputs, rng)?
            }
        };
        out.into_iter().next().ok_or_else(|| Error::Malformed("decryption circuit has no output".into()))
    }

    fn bundle_signature(&self) -> String {
        format!("recrypt:{}:{}:{}", self.mode, self.inner.name(), self.outer.name())
    }
}

/// Recryption bridge from `inner` to `outer` with ι the identity on bits.
///
/// With [`KeyMode::Shared`] the two schemes must coincide and the bridge
/// key encrypts the secret key under itself; such bridges carry the
/// `circular_security_assumed` flag.
pub fn gentry_bridge(
    inner: &SchemeRef,
    outer: &HomSchemeRef,
    mode: KeyMode,
    variant: RecryptVariant,
) -> Result<Bridge> {
    let target = outer.scheme();
    if mode == KeyMode::Derived {
        return Err(Error::WrongKeyMode("recryption keys are independent or shared".into()));
    }
    if mode == KeyMode::Shared && !inner.same_as(&target) {
        return Err(Error::WrongKeyMode(format!("{} and {} have different keys", inner.name(), target.name())));
    }
    let iota = Iota::from_fn("id", &inner.plaintext_space(), &target.plaintext_space(), |m| Ok(m.clone()))?;
    let full = compile_decryption_circuit(inner, &iota).ok();
    match variant {
        RecryptVariant::EncryptedBits => {
            let circuit = full.as_ref().ok_or_else(|| {
                Error::NonEnumerableSpace(format!("{} has no compiled decryption circuit", inner.name()))
            })?;
            outer.check_class(circuit)?;
        }
        RecryptVariant::Folded => {
            let depth = recryption_depth_bound(inner.key_bits());
            if let EvaluableClass::DepthAtMost(d) = outer.evaluable_class() {
                if depth > d {
                    return Err(Error::CircuitOutOfClass(format!(
                        "key-only decryption circuits of depth up to {depth} exceed depth {d} of {}",
                        outer.name()
                    )));
                }
            }
        }
    }
    let meta = GentryMeta {
        outer: outer.clone(),
        inner_key_bits: inner.key_bits(),
        variant: variant.label(),
        max_circuit_depth: match variant {
            RecryptVariant::Folded => Some(recryption_depth_bound(inner.key_bits())),
            RecryptVariant::EncryptedBits => full.as_ref().map(BooleanCircuit::depth),
        },
    };
    let alg = Arc::new(Recrypt {
        inner: inner.clone(),
        outer: outer.clone(),
        iota: iota.clone(),
        mode,
        variant,
        full,
        folded: Mutex::new(HashMap::new()),
    });
    let name = format!("gentry[{}->{},{mode},{}]", inner.name(), outer.name(), variant.label());
    let mut b = Bridge::new(name, inner.clone(), target, iota, alg, mode)?
        .with_completeness(crate::bridges::CompletenessStatus::Claimed)
        .with_gentry(meta);
    if mode == KeyMode::Shared {
        b = b.with_flag(CIRCULAR_SECURITY_ASSUMED);
    }
    Ok(b)
}

struct EvalCircuit {
    h: HomSchemeRef,
    circuit: BooleanCircuit,
}

impl BridgeAlgorithm for EvalCircuit {
    fn derive(&self, source: &KeyPair, _: SecurityParameter, _: &mut dyn RngCore) -> Result<(KeyPair, BridgeKey)> {
        Ok((source.clone(), BridgeKey::Data(source.pk.evk.clone())))
    }

    fn convert(&self, bk: &BridgeKey, _: &PublicKey, c: &Value, rng: &mut dyn RngCore) -> Result<Value> {
        let inputs = c.as_tuple(self.circuit.arity())?;
        let mut out = self.h.eval_values(bk.data()?, &self.circuit, inputs, rng)?;
        Ok(if out.len() == 1 { out.remove(0) } else { Value::List(out) })
    }

    fn bundle_signature(&self) -> String {
        format!("shared:{}", self.h.name())
    }
}

/// Bridge from the r-th fiber power of `h` to `h` (or to its s-th fiber
/// power for s outputs) converting by homomorphic evaluation of `circuit`,
/// with the evaluation key as bridge key.
pub fn circuit_bridge(h: &HomSchemeRef, label: &str, circuit: &BooleanCircuit) -> Result<Bridge> {
    h.check_class(circuit)?;
    if circuit.arity() == 0 || circuit.num_outputs() == 0 {
        return Err(Error::InvalidParameter("circuit bridges need inputs and outputs".into()));
    }
    let base = h.scheme();
    let source = fiber_power(&base, circuit.arity())?;
    let target = if circuit.num_outputs() == 1 { base.clone() } else { fiber_power(&base, circuit.num_outputs())? };
    let plain = circuit.clone();
    let iota = Iota::from_fn(label, &source.plaintext_space(), &target.plaintext_space(), move |m| {
        let out = plain.eval(&m.as_bits()?)?;
        Ok(if out.len() == 1 { Value::bit(out[0]) } else { Value::bits(out) })
    })?;
    let alg = Arc::new(EvalCircuit { h: h.clone(), circuit: circuit.clone() });
    Bridge::new(format!("circuit[{label}]"), source, target, iota, alg, KeyMode::Shared)
}

/// Public material of a composite whose second bridge is a recryption
/// bridge: `(pk₁, pk₂, bk_f, pk_H, bk_g)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecryptKeyView {
    pub pk1: Value,
    pub pk2: Value,
    pub bk_f: Value,
    pub pk_h: Value,
    pub bk_g: Vec<Value>,
}

impl RecryptKeyView {
    pub fn to_value(&self) -> Value {
        Value::List(vec![
            self.pk1.clone(),
            self.pk2.clone(),
            self.bk_f.clone(),
            self.pk_h.clone(),
            Value::List(self.bk_g.clone()),
        ])
    }
}

/// Samplers for the real bridge-key distribution of `g ∘ f` and for the
/// variant where every entry of `bk_g` is replaced by a fresh encryption of
/// 0 under an independently generated outer key.
#[derive(Clone)]
pub struct RecryptKeySampler {
    f: Option<Bridge>,
    g: Bridge,
    outer: HomSchemeRef,
    key_bits: usize,
}

fn split_recrypt(composed: &Bridge) -> Result<(Option<Bridge>, Bridge)> {
    match composed.parts() {
        Some((f, g)) if g.gentry_meta().is_some() => Ok((Some(f.clone()), g.clone())),
        None if composed.gentry_meta().is_some() => Ok((None, composed.clone())),
        _ => Err(Error::InvalidParameter(format!("{} does not end in a recryption bridge", composed.name()))),
    }
}

/// Sampler pair for distinguishing the real recryption key from zero
/// encryptions. Requires independent keys for the recryption bridge.
pub fn zero_substituted_bridge_key(composed: &Bridge) -> Result<RecryptKeySampler> {
    let (f, g) = split_recrypt(composed)?;
    if g.key_mode() != KeyMode::Independent {
        return Err(Error::WrongKeyMode(format!("{} does not use independent keys", g.name())));
    }
    let meta = g.gentry_meta().expect("checked above");
    Ok(RecryptKeySampler { outer: meta.outer.clone(), key_bits: meta.inner_key_bits, f, g })
}

impl RecryptKeySampler {
    /// `(pk₁, pk₂, bk_f)` from the first bridge (or the source keys alone).
    pub fn prefix(&self, rng: &mut dyn RngCore) -> Result<(Value, Value, Value)> {
        let lambda = SecurityParameter::default();
        match &self.f {
            Some(f) => {
                let keys = f.keygen(lambda, rng)?;
                Ok((keys.pk1.to_value(), keys.pk2.to_value(), keys.bk.to_value()))
            }
            None => {
                let keys = self.g.source().keygen(lambda, rng)?;
                Ok((keys.pk.to_value(), keys.pk.to_value(), Value::empty()))
            }
        }
    }

    /// Real distribution: full key generation of the composite.
    pub fn real(&self, rng: &mut dyn RngCore) -> Result<RecryptKeyView> {
        let lambda = SecurityParameter::default();
        match &self.f {
            Some(f) => {
                let first = f.keygen(lambda, rng)?;
                let second = self.g.keygen_from_source(first.target(), lambda, rng)?;
                Ok(RecryptKeyView {
                    pk1: first.pk1.to_value(),
                    pk2: first.pk2.to_value(),
                    bk_f: first.bk.to_value(),
                    pk_h: second.pk2.to_value(),
                    bk_g: second.bk.data()?.as_list()?.to_vec(),
                })
            }
            None => {
                let keys = self.g.keygen(lambda, rng)?;
                Ok(RecryptKeyView {
                    pk1: keys.pk1.to_value(),
                    pk2: keys.pk1.to_value(),
                    bk_f: Value::empty(),
                    pk_h: keys.pk2.to_value(),
                    bk_g: keys.bk.data()?.as_list()?.to_vec(),
                })
            }
        }
    }

    /// Fiber of the substituted distribution over a fixed prefix: fresh
    /// outer keys and `e` encryptions of 0.
    pub fn zero_fiber(
        &self,
        prefix: (Value, Value, Value),
        rng: &mut dyn RngCore,
    ) -> Result<(RecryptKeyView, KeyPair)> {
        let keys = self.outer.keygen(SecurityParameter::default(), rng)?;
        let bk_g = (0..self.key_bits)
            .map(|_| self.outer.encrypt_value(&keys.pk, &Value::bit(false), rng))
            .collect::<Result<Vec<_>>>()?;
        let (pk1, pk2, bk_f) = prefix;
        Ok((RecryptKeyView { pk1, pk2, bk_f, pk_h: keys.pk.to_value(), bk_g }, keys))
    }

    pub fn zero(&self, rng: &mut dyn RngCore) -> Result<RecryptKeyView> {
        let prefix = self.prefix(rng)?;
        Ok(self.zero_fiber(prefix, rng)?.0)
    }

    pub fn key_bits(&self) -> usize {
        self.key_bits
    }
}

/// Outcome of stacking circuit-bridge stages on a leveled scheme until a
/// fresh-encryption conversion decrypts wrongly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverflowReport {
    pub scheme: String,
    pub depth_budget: usize,
    pub stage_depth: usize,
    pub stages: usize,
    pub total_depth: usize,
    pub correctness_unverified: bool,
    pub search: CounterexampleReport,
}

/// XOR chain of the given depth on two inputs that evaluates to the first
/// input (depth is odd) or to the second (depth is even).
pub fn alternating_xor_chain(depth: usize) -> BooleanCircuit {
    let mut gates = Vec::with_capacity(depth);
    let mut prev = 1;
    for i in 0..depth {
        let other = if i % 2 == 0 { 0 } else { 1 };
        gates.push(crate::circuits::Gate::Xor(prev, other));
        prev = 2 + i;
    }
    let out = if depth == 0 { 0 } else { prev };
    BooleanCircuit::new(2, gates, vec![out]).expect("well-formed chain")
}

/// Each stage is `[chain, chain]` (pairs to pairs) and the last stage a
/// single chain (pairs to one ciphertext), every chain at the full depth
/// budget. Stages are added until the search over `candidates` fresh
/// encryptions finds a wrong decryption, or `max_stages` is reached.
pub fn noise_overflow_search(
    h: &HomSchemeRef,
    max_stages: usize,
    candidates: u64,
    seed: u64,
) -> Result<OverflowReport> {
    let depth = match h.evaluable_class() {
        EvaluableClass::DepthAtMost(d) => d,
        EvaluableClass::All => return Err(Error::InvalidParameter(format!("{} has no depth budget", h.name()))),
    };
    let chain = alternating_xor_chain(depth);
    let single = circuit_bridge(h, "xor-chain", &chain)?;
    let pair = concat_bridges(&[single.clone(), single.clone()])?;
    let mut last = None;
    for stages in 1..=max_stages.max(1) {
        let mut b = single.clone();
        for _ in 1..stages {
            b = compose(&pair, &b)?;
        }
        let search = search_correctness_counterexample(&b, candidates, seed)?;
        let found = search.found;
        let report = OverflowReport {
            scheme: h.name(),
            depth_budget: depth,
            stage_depth: depth,
            stages,
            total_depth: depth * stages,
            correctness_unverified: b.correctness_unverified(),
            search,
        };
        if found {
            return Ok(report);
        }
        last = Some(report);
    }
    Ok(last.expect("at least one stage"))
}
