//! Bridges between schemes: keys, composition, concatenation, and the
//! correctness and completeness checks.

pub mod graph;
pub mod iota;
pub mod library;

use std::fmt;
use std::sync::Arc;

use rand::RngCore;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::homomorphic::HomSchemeRef;
use crate::rng;
use crate::scheme::{
    fiber_power, Ciphertext, CorrectnessReport, KeyPair, Message, PublicKey, SchemeRef, SecretKey, SecurityParameter,
    KEYGEN_BATCH,
};
use crate::value::{Space, Value};

pub use graph::{bridge_public_view, graph_scheme, graph_secret_parts};
pub use iota::Iota;
pub use library::{
    double_additive_bridge, gm_identity_bridge, halfkey_bridges, identity_bridge, lwe_additive_bridge,
    lwe_additive_bridge_on, modswitch_bridge, sabotaged_lwe_bridge, AppendedScheme,
};

/// Bridge key. A composite key is the triple `(bk_f, pk₂, bk_g)`.
#[derive(Clone, Debug, PartialEq)]
pub enum BridgeKey {
    Data(Value),
    Composite { f: Box<BridgeKey>, pk2: PublicKey, g: Box<BridgeKey> },
}

impl BridgeKey {
    pub fn empty() -> Self {
        BridgeKey::Data(Value::empty())
    }

    pub fn data(&self) -> Result<&Value> {
        match self {
            BridgeKey::Data(v) => Ok(v),
            BridgeKey::Composite { .. } => Err(Error::Malformed("expected a plain bridge key".into())),
        }
    }

    pub fn parts(&self) -> Option<(&BridgeKey, &PublicKey, &BridgeKey)> {
        match self {
            BridgeKey::Composite { f, pk2, g } => Some((f, pk2, g)),
            BridgeKey::Data(_) => None,
        }
    }

    /// Published form: the data itself, or `[bk_f, pk₂, bk_g]`.
    pub fn to_value(&self) -> Value {
        match self {
            BridgeKey::Data(v) => v.clone(),
            BridgeKey::Composite { f, pk2, g } => Value::List(vec![f.to_value(), pk2.to_value(), g.to_value()]),
        }
    }
}

impl Serialize for BridgeKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_value().serialize(s)
    }
}

/// How the target secret key arises from the source one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeyMode {
    /// Target keys generated without looking at the source key.
    Independent,
    /// Target key computed from the source key.
    Derived,
    /// Source and target use the same key pair.
    Shared,
}

impl fmt::Display for KeyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KeyMode::Independent => "independent",
            KeyMode::Derived => "derived",
            KeyMode::Shared => "shared",
        })
    }
}

/// Which key-generation stage produced each entry of a [`KeyBundle`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub sk1: String,
    pub pk1: String,
    pub sk2: String,
    pub pk2: String,
    pub bk: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KeyBundle {
    pub sk1: SecretKey,
    pub pk1: PublicKey,
    pub sk2: SecretKey,
    pub pk2: PublicKey,
    pub bk: BridgeKey,
    pub provenance: Provenance,
}

impl KeyBundle {
    pub fn source(&self) -> KeyPair {
        KeyPair { sk: self.sk1.clone(), pk: self.pk1.clone() }
    }

    pub fn target(&self) -> KeyPair {
        KeyPair { sk: self.sk2.clone(), pk: self.pk2.clone() }
    }
}

/// The key-generation and conversion procedures of a bridge.
pub trait BridgeAlgorithm: Send + Sync {
    /// Stages two and three of bridge key generation: target keys from the
    /// source key pair (per the key mode), then the bridge key from all four.
    fn derive(
        &self,
        source: &KeyPair,
        lambda: SecurityParameter,
        rng: &mut dyn RngCore,
    ) -> Result<(KeyPair, BridgeKey)>;

    /// Public conversion of a source ciphertext. The target public key is
    /// passed along for conversions that encrypt under it.
    fn convert(&self, bk: &BridgeKey, target_pk: &PublicKey, c: &Value, rng: &mut dyn RngCore) -> Result<Value>;

    /// Bridges with equal signatures produce interchangeable key bundles.
    fn bundle_signature(&self) -> String;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrectnessStatus {
    /// Built directly by a constructor that is correct by construction.
    Asserted,
    /// A composite whose bridge property has not been checked.
    Unverified,
    /// A correctness run passed.
    Verified,
    /// Composite whose second bridge is complete.
    ImpliedByCompleteness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompletenessStatus {
    Unknown,
    Claimed,
    Verified,
    Refuted,
}

impl CompletenessStatus {
    fn holds(self) -> bool {
        matches!(self, CompletenessStatus::Claimed | CompletenessStatus::Verified)
    }
}

/// Metadata of recryption bridges built by homomorphic evaluation of the
/// source decryption.
#[derive(Clone, Debug)]
pub struct GentryMeta {
    pub outer: HomSchemeRef,
    pub inner_key_bits: usize,
    pub variant: &'static str,
    /// Depth bound of the circuits evaluated per conversion.
    pub max_circuit_depth: Option<usize>,
}

#[derive(Clone)]
pub struct Bridge {
    name: String,
    source: SchemeRef,
    target: SchemeRef,
    iota: Iota,
    alg: Arc<dyn BridgeAlgorithm>,
    key_mode: KeyMode,
    correctness: CorrectnessStatus,
    completeness: CompletenessStatus,
    flags: Vec<String>,
    parts: Option<Arc<(Bridge, Bridge)>>,
    gentry: Option<GentryMeta>,
}

impl fmt::Debug for Bridge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bridge({}: {} -> {})", self.name, self.source.name(), self.target.name())
    }
}

pub const CIRCULAR_SECURITY_ASSUMED: &str = "circular_security_assumed";
pub const CORRECTNESS_UNVERIFIED: &str = "correctness_unverified";

impl Bridge {
    pub fn new(
        name: impl Into<String>,
        source: SchemeRef,
        target: SchemeRef,
        iota: Iota,
        alg: Arc<dyn BridgeAlgorithm>,
        key_mode: KeyMode,
    ) -> Result<Bridge> {
        let (m1, m2) = (source.plaintext_space(), target.plaintext_space());
        if iota.domain().name() != m1.name() || iota.codomain().name() != m2.name() {
            return Err(Error::TagMismatch {
                expected: format!("{} -> {}", m1.name(), m2.name()),
                found: format!("{} -> {}", iota.domain().name(), iota.codomain().name()),
            });
        }
        Ok(Bridge {
            name: name.into(),
            source,
            target,
            iota,
            alg,
            key_mode,
            correctness: CorrectnessStatus::Asserted,
            completeness: CompletenessStatus::Unknown,
            flags: Vec::new(),
            parts: None,
            gentry: None,
        })
    }

    pub fn with_completeness(mut self, status: CompletenessStatus) -> Self {
        self.completeness = status;
        self
    }

    pub fn with_flag(mut self, flag: &str) -> Self {
        if !self.flags.iter().any(|f| f == flag) {
            self.flags.push(flag.to_string());
        }
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub(crate) fn with_gentry(mut self, meta: GentryMeta) -> Self {
        self.gentry = Some(meta);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &SchemeRef {
        &self.source
    }

    pub fn target(&self) -> &SchemeRef {
        &self.target
    }

    pub fn iota(&self) -> &Iota {
        &self.iota
    }

    pub fn key_mode(&self) -> KeyMode {
        self.key_mode
    }

    pub fn correctness(&self) -> CorrectnessStatus {
        self.correctness
    }

    pub fn completeness(&self) -> CompletenessStatus {
        self.completeness
    }

    pub fn correctness_unverified(&self) -> bool {
        self.correctness == CorrectnessStatus::Unverified
    }

    /// Report flags, including `correctness_unverified` while it applies.
    pub fn flags(&self) -> Vec<String> {
        let mut flags = self.flags.clone();
        if self.correctness_unverified() {
            flags.push(CORRECTNESS_UNVERIFIED.to_string());
        }
        flags
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags().iter().any(|f| f == flag)
    }

    /// `(f, g)` of a composite `g ∘ f`.
    pub fn parts(&self) -> Option<(&Bridge, &Bridge)> {
        self.parts.as_deref().map(|(f, g)| (f, g))
    }

    pub fn gentry_meta(&self) -> Option<&GentryMeta> {
        self.gentry.as_ref()
    }

    pub fn algorithm(&self) -> &Arc<dyn BridgeAlgorithm> {
        &self.alg
    }

    /// Records a passing correctness run.
    pub fn mark_verified(&mut self, report: &CorrectnessReport) {
        if report.passed() {
            self.correctness = CorrectnessStatus::Verified;
        }
    }

    /// Records an exhaustive completeness result.
    pub fn mark_completeness(&mut self, report: &CompletenessReport) {
        if !report.complete {
            self.completeness = CompletenessStatus::Refuted;
        } else if report.mode == CheckMode::Exhaustive && report.keys_exhaustive {
            self.completeness = CompletenessStatus::Verified;
        }
    }

    /// Full three-stage key generation.
    pub fn keygen(&self, lambda: SecurityParameter, rng: &mut dyn RngCore) -> Result<KeyBundle> {
        let source = self.source.keygen(lambda, rng)?;
        self.keygen_from_source(source, lambda, rng)
    }

    /// Stages two and three from given source keys.
    pub fn keygen_from_source(
        &self,
        source: KeyPair,
        lambda: SecurityParameter,
        rng: &mut dyn RngCore,
    ) -> Result<KeyBundle> {
        let (target, bk) = self.alg.derive(&source, lambda, rng)?;
        Ok(KeyBundle {
            provenance: Provenance {
                sk1: format!("stage 1: keygen of {}", self.source.name()),
                pk1: format!("stage 1: keygen of {}", self.source.name()),
                sk2: format!("stage 2 ({}): {}", self.key_mode, self.name),
                pk2: format!("stage 2 ({}): {}", self.key_mode, self.name),
                bk: format!("stage 3: {}", self.name),
            },
            sk1: source.sk,
            pk1: source.pk,
            sk2: target.sk,
            pk2: target.pk,
            bk,
        })
    }

    pub fn convert_value(&self, bk: &BridgeKey, pk2: &PublicKey, c: &Value, rng: &mut dyn RngCore) -> Result<Value> {
        self.alg.convert(bk, pk2, c, rng)
    }

    pub fn convert(&self, bundle: &KeyBundle, c: &Ciphertext, rng: &mut dyn RngCore) -> Result<Ciphertext> {
        self.source.check_ciphertext(c)?;
        let out = self.alg.convert(&bundle.bk, &bundle.pk2, c.value(), rng)?;
        Ok(Ciphertext::new(self.target.ciphertext_tag(), out))
    }
}

struct Composite {
    f: Bridge,
    g: Bridge,
}

impl BridgeAlgorithm for Composite {
    fn derive(
        &self,
        source: &KeyPair,
        lambda: SecurityParameter,
        rng: &mut dyn RngCore,
    ) -> Result<(KeyPair, BridgeKey)> {
        let (mid, bk_f) = self.f.alg.derive(source, lambda, rng)?;
        let (target, bk_g) = self.g.alg.derive(&mid, lambda, rng)?;
        Ok((target, BridgeKey::Composite { f: Box::new(bk_f), pk2: mid.pk, g: Box::new(bk_g) }))
    }

    fn convert(&self, bk: &BridgeKey, target_pk: &PublicKey, c: &Value, rng: &mut dyn RngCore) -> Result<Value> {
        let (bk_f, pk2, bk_g) =
            bk.parts().ok_or_else(|| Error::Malformed("composite bridge needs a composite key".into()))?;
        let mid = self.f.alg.convert(bk_f, pk2, c, rng)?;
        self.g.alg.convert(bk_g, target_pk, &mid, rng)
    }

    fn bundle_signature(&self) -> String {
        format!("composite({};{})", self.f.alg.bundle_signature(), self.g.alg.bundle_signature())
    }
}

/// `g ∘ f`: keys from f's full key generation followed by stages two and
/// three of g seeded with f's target keys; bridge key `(bk_f, pk₂, bk_g)`.
/// The result is flagged `correctness_unverified` unless g is complete.
pub fn compose(f: &Bridge, g: &Bridge) -> Result<Bridge> {
    if !f.target.same_as(&g.source) {
        return Err(Error::SchemeMismatch { left: f.target.name(), right: g.source.name() });
    }
    let iota = f.iota.then(&g.iota)?;
    let key_mode = match (f.key_mode, g.key_mode) {
        (KeyMode::Shared, KeyMode::Shared) => KeyMode::Shared,
        (KeyMode::Independent, _) | (_, KeyMode::Independent) => KeyMode::Independent,
        _ => KeyMode::Derived,
    };
    let alg = Arc::new(Composite { f: f.clone(), g: g.clone() });
    let mut b = Bridge::new(format!("{}∘{}", g.name, f.name), f.source.clone(), g.target.clone(), iota, alg, key_mode)?;
    b.correctness =
        if g.completeness.holds() { CorrectnessStatus::ImpliedByCompleteness } else { CorrectnessStatus::Unverified };
    if f.completeness.holds() && g.completeness.holds() {
        b.completeness = CompletenessStatus::Claimed;
    }
    for flag in f.flags.iter().chain(&g.flags) {
        b = b.with_flag(flag);
    }
    b.parts = Some(Arc::new((f.clone(), g.clone())));
    Ok(b)
}

struct Concat {
    parts: Vec<Bridge>,
}

impl BridgeAlgorithm for Concat {
    fn derive(
        &self,
        source: &KeyPair,
        lambda: SecurityParameter,
        rng: &mut dyn RngCore,
    ) -> Result<(KeyPair, BridgeKey)> {
        self.parts[0].alg.derive(source, lambda, rng)
    }

    fn convert(&self, bk: &BridgeKey, target_pk: &PublicKey, c: &Value, rng: &mut dyn RngCore) -> Result<Value> {
        let outs = self.parts.iter().map(|b| b.alg.convert(bk, target_pk, c, rng)).collect::<Result<Vec<_>>>()?;
        Ok(Value::List(outs))
    }

    fn bundle_signature(&self) -> String {
        self.parts[0].alg.bundle_signature()
    }
}

/// `(B₁, …, B_s)` applied to the same source ciphertext, landing in the
/// s-th fiber power of the common target.
pub fn concat_bridges(bridges: &[Bridge]) -> Result<Bridge> {
    let first = bridges.first().ok_or_else(|| Error::InvalidParameter("nothing to concatenate".into()))?;
    for b in &bridges[1..] {
        if !b.source.same_as(&first.source) || !b.target.same_as(&first.target) {
            return Err(Error::KeyBundleMismatch(format!("{} and {} connect different schemes", first.name, b.name)));
        }
        if b.alg.bundle_signature() != first.alg.bundle_signature() {
            return Err(Error::KeyBundleMismatch(format!("{} and {} generate keys differently", first.name, b.name)));
        }
    }
    let s = bridges.len();
    let target = fiber_power(&first.target, s)?;
    let parts: Vec<Iota> = bridges.iter().map(|b| b.iota.clone()).collect();
    let iota = Iota::tuple("tuple", &parts, &target.plaintext_space())?;
    let names: Vec<&str> = bridges.iter().map(|b| b.name.as_str()).collect();
    let alg = Arc::new(Concat { parts: bridges.to_vec() });
    let mut b = Bridge::new(format!("[{}]", names.join(",")), first.source.clone(), target, iota, alg, first.key_mode)?;
    if bridges.iter().all(|b| b.completeness.holds()) {
        b.completeness = CompletenessStatus::Claimed;
    }
    if bridges.iter().any(|b| b.correctness == CorrectnessStatus::Unverified) {
        b.correctness = CorrectnessStatus::Unverified;
    }
    for flag in bridges.iter().flat_map(|b| b.flags.iter()) {
        b = b.with_flag(flag);
    }
    Ok(b)
}

/// Fresh-encryption correctness: fraction of trials where the converted
/// ciphertext does not decrypt to ι of the message.
pub fn check_bridge_correct(b: &Bridge, trials: u64, seed: u64) -> Result<CorrectnessReport> {
    check_bridge_correct_with(b, trials, seed, Execution::default())
}

pub fn check_bridge_correct_with(b: &Bridge, trials: u64, seed: u64, exec: Execution) -> Result<CorrectnessReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let batches = trials.div_ceil(KEYGEN_BATCH);
    let failures = exec.try_map(batches as usize, |batch| -> Result<u64> {
        let mut rng = rng::stream(seed, batch as u64);
        let keys = b.keygen(SecurityParameter::default(), &mut rng)?;
        let count = KEYGEN_BATCH.min(trials - batch as u64 * KEYGEN_BATCH);
        let mut failures = 0;
        for _ in 0..count {
            if fresh_trial(b, &keys, &mut rng)?.is_some() {
                failures += 1;
            }
        }
        Ok(failures)
    })?;
    Ok(CorrectnessReport::new(b.name.clone(), trials, failures.iter().sum(), seed))
}

/// A fresh encryption whose conversion decrypted wrongly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConversionFailure {
    pub message: Value,
    pub ciphertext: Value,
    pub converted: Value,
    pub expected: Value,
    pub decrypted: Value,
}

fn fresh_trial(b: &Bridge, keys: &KeyBundle, rng: &mut dyn RngCore) -> Result<Option<ConversionFailure>> {
    let m = b.source.sample_message(rng);
    let c1 = b.source.encrypt(&keys.pk1, &m, rng)?;
    let c2 = b.convert(keys, &c1, rng)?;
    let got = b.target.decrypt(&keys.sk2, &c2)?;
    let want = b.iota.apply(&m)?;
    Ok((got != want).then(|| ConversionFailure {
        message: m.into_value(),
        ciphertext: c1.into_value(),
        converted: c2.into_value(),
        expected: want.into_value(),
        decrypted: got.into_value(),
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub bridge: String,
    pub candidates: u64,
    pub searched: u64,
    pub found: bool,
    pub candidate_index: Option<u64>,
    pub failure: Option<ConversionFailure>,
    pub seed: u64,
}

/// Searches fresh (key, message, encryption) candidates for a conversion
/// that decrypts wrongly. Candidate `i` uses stream `i` of `seed`.
pub fn search_correctness_counterexample(b: &Bridge, candidates: u64, seed: u64) -> Result<CounterexampleReport> {
    let exec = Execution::default();
    const CHUNK: u64 = 4096;
    let mut searched = 0;
    while searched < candidates {
        let len = CHUNK.min(candidates - searched);
        let hit = exec.find_first(len as usize, |i| {
            let idx = searched + i as u64;
            let mut rng = rng::stream(seed, idx);
            let outcome =
                b.keygen(SecurityParameter::default(), &mut rng).and_then(|keys| fresh_trial(b, &keys, &mut rng));
            match outcome {
                Ok(None) => None,
                Ok(Some(f)) => Some(Ok((idx, f))),
                Err(e) => Some(Err(e)),
            }
        });
        if let Some((_, found)) = hit {
            let (idx, failure) = found?;
            return Ok(CounterexampleReport {
                bridge: b.name.clone(),
                candidates,
                searched: idx + 1,
                found: true,
                candidate_index: Some(idx),
                failure: Some(failure),
                seed,
            });
        }
        searched += len;
    }
    Ok(CounterexampleReport {
        bridge: b.name.clone(),
        candidates,
        searched,
        found: false,
        candidate_index: None,
        failure: None,
        seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMode {
    Exhaustive,
    Sampled,
}

/// A ciphertext on which conversion and decryption disagree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletenessWitness {
    pub secret_key: Value,
    pub ciphertext: Value,
    pub expected: Value,
    pub decrypted: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub bridge: String,
    pub mode: CheckMode,
    pub checked: u64,
    pub complete: bool,
    pub witness: Option<CompletenessWitness>,
    pub keys: u64,
    pub keys_exhaustive: bool,
    pub seed: u64,
}

/// Default cap on (key, ciphertext) pairs in exhaustive mode.
pub const DEFAULT_EXHAUSTIVE_BUDGET: u64 = 1 << 20;

/// Checks `Dec₂(sk₂, convert(bk, c)) = ι(Dec₁(sk₁, c))` on every ciphertext
/// (exhaustive) or on `budget` uniform ciphertexts with fresh keys each
/// (sampled).
///
/// Exhaustive mode walks keys in enumeration order and, for each key, the
/// ciphertext space lexicographically; the first failure in that order is
/// the witness. When all keys times all ciphertexts exceed `budget`, only
/// the leading keys are covered and `keys_exhaustive` is false.
pub fn check_complete(b: &Bridge, mode: CheckMode, budget: u64, seed: u64) -> Result<CompletenessReport> {
    check_complete_with(b, mode, budget, seed, Execution::default())
}

pub fn check_complete_with(
    b: &Bridge,
    mode: CheckMode,
    budget: u64,
    seed: u64,
    exec: Execution,
) -> Result<CompletenessReport> {
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    match mode {
        CheckMode::Exhaustive => exhaustive(b, budget, seed, exec),
        CheckMode::Sampled => sampled(b, budget, seed, exec),
    }
}

fn check_one(b: &Bridge, bundle: &KeyBundle, c1: Value, rng: &mut dyn RngCore) -> Result<Option<CompletenessWitness>> {
    let c = b.source.ciphertext(c1)?;
    let expected = b.iota.apply(&b.source.decrypt(&bundle.sk1, &c)?)?;
    let converted = b.convert(bundle, &c, rng)?;
    let got = b.target.decrypt(&bundle.sk2, &converted)?;
    Ok((got != expected).then(|| CompletenessWitness {
        secret_key: bundle.sk1.value().clone(),
        ciphertext: c.into_value(),
        expected: expected.into_value(),
        decrypted: got.into_value(),
    }))
}

fn exhaustive(b: &Bridge, budget: u64, seed: u64, exec: Execution) -> Result<CompletenessReport> {
    let space: Space = b.source.ciphertext_space();
    let size = space.size().ok_or_else(|| Error::NonEnumerableSpace(space.name().to_string()))?;
    let lambda = SecurityParameter::default();
    let key_rng_seed = rng::subseed(seed, 1);
    let (sources, keys_exhaustive): (Vec<KeyPair>, bool) = match b.source.secret_keys() {
        Some(all) => {
            let fit = (budget / size).max(1) as usize;
            let exhaustive = all.len() <= fit;
            let chosen: Vec<SecretKey> = all.into_iter().take(fit).collect();
            let pairs = exec.try_map(chosen.len(), |i| {
                let mut rng = rng::stream(key_rng_seed, i as u64);
                let pk = b.source.public_from_secret(&chosen[i], &mut rng)?;
                Ok::<_, Error>(KeyPair { sk: chosen[i].clone(), pk })
            })?;
            (pairs, exhaustive)
        }
        None => {
            let count = (budget / size).max(1) as usize;
            let pairs = exec.try_map(count, |i| {
                let mut rng = rng::stream(key_rng_seed, i as u64);
                b.source.keygen(lambda, &mut rng)
            })?;
            (pairs, false)
        }
    };
    let bundle_seed = rng::subseed(seed, 2);
    let bundles = exec.try_map(sources.len(), |i| {
        let mut rng = rng::stream(bundle_seed, i as u64);
        b.keygen_from_source(sources[i].clone(), lambda, &mut rng)
    })?;
    let convert_seed = rng::subseed(seed, 3);
    let total = bundles.len() as u64 * size;
    let hit = exec.find_first(total as usize, |flat| {
        let flat = flat as u64;
        let bundle = &bundles[(flat / size) as usize];
        let mut rng = rng::stream(convert_seed, flat);
        let c1 = match space.element(flat % size) {
            Ok(c) => c,
            Err(e) => return Some(Err(e)),
        };
        check_one(b, bundle, c1, &mut rng).transpose()
    });
    let (checked, witness) = match hit {
        Some((idx, w)) => (idx as u64 + 1, Some(w?)),
        None => (total, None),
    };
    Ok(CompletenessReport {
        bridge: b.name.clone(),
        mode: CheckMode::Exhaustive,
        checked,
        complete: witness.is_none(),
        witness,
        keys: bundles.len() as u64,
        keys_exhaustive,
        seed,
    })
}

fn sampled(b: &Bridge, budget: u64, seed: u64, exec: Execution) -> Result<CompletenessReport> {
    let space = b.source.ciphertext_space();
    let hit = exec.find_first(budget as usize, |i| {
        let mut rng = rng::stream(seed, i as u64);
        let outcome = b.keygen(SecurityParameter::default(), &mut rng).and_then(|bundle| {
            let c1 = space.sample(&mut rng);
            check_one(b, &bundle, c1, &mut rng)
        });
        outcome.transpose()
    });
    let (checked, witness) = match hit {
        Some((idx, w)) => (idx as u64 + 1, Some(w?)),
        None => (budget, None),
    };
    Ok(CompletenessReport {
        bridge: b.name.clone(),
        mode: CheckMode::Sampled,
        checked,
        complete: witness.is_none(),
        witness,
        keys: checked,
        keys_exhaustive: false,
        seed,
    })
}

/// Whether the given key and ciphertext violate the completeness equation.
pub fn violates_completeness(
    b: &Bridge,
    sk1: &SecretKey,
    c1: &Value,
    seed: u64,
) -> Result<Option<CompletenessWitness>> {
    let mut rng = rng::stream(seed, 0);
    let pk1 = b.source.public_from_secret(sk1, &mut rng)?;
    let bundle = b.keygen_from_source(KeyPair { sk: sk1.clone(), pk: pk1 }, SecurityParameter::default(), &mut rng)?;
    check_one(b, &bundle, c1.clone(), &mut rng)
}

/// Expected and actual decryption of one conversion, for demonstrations.
pub fn convert_and_decrypt(
    b: &Bridge,
    bundle: &KeyBundle,
    m: &Message,
    rng: &mut dyn RngCore,
) -> Result<(Message, Message)> {
    let c1 = b.source.encrypt(&bundle.pk1, m, rng)?;
    let c2 = b.convert(bundle, &c1, rng)?;
    Ok((b.iota.apply(m)?, b.target.decrypt(&bundle.sk2, &c2)?))
}
