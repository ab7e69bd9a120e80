//! The public-key encryption contract and the generic constructions that
//! apply to any scheme: fiber powers and auxiliary-information augmentation.

use std::any::Any;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use rand::RngCore;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{malformed, Error, Result};
use crate::exec::Execution;
use crate::rng;
use crate::value::{Space, Value};

/// Security parameter λ. The toy schemes ignore it beyond validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SecurityParameter(u32);

impl SecurityParameter {
    pub fn new(lambda: u32) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::InvalidParameter("lambda must be at least 1".into()));
        }
        Ok(SecurityParameter(lambda))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl Default for SecurityParameter {
    fn default() -> Self {
        SecurityParameter(1)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SecretKey {
    value: Value,
}

impl SecretKey {
    pub fn new(value: Value) -> Self {
        SecretKey { value }
    }

    pub fn value(&self) -> &Value {
        &self.value
    }
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SecretKey({})", self.value)
    }
}

/// Public key: a published value, an evaluation key slot and auxiliary
/// public values. Symmetric schemes keep their secret behind an opaque
/// handle that only the scheme's own encryption routine reads; it never
/// appears in serialized output.
#[derive(Clone)]
pub struct PublicKey {
    pub value: Value,
    pub evk: Value,
    pub aux: Vec<Value>,
    handle: Option<Arc<dyn Any + Send + Sync>>,
}

impl PublicKey {
    pub fn new(value: Value) -> Self {
        PublicKey { value, evk: Value::empty(), aux: Vec::new(), handle: None }
    }

    /// Encryption oracle for a symmetric scheme.
    pub fn sealed(sk: SecretKey) -> Self {
        PublicKey::new(Value::empty()).with_handle(sk)
    }

    pub fn with_evk(mut self, evk: Value) -> Self {
        self.evk = evk;
        self
    }

    pub(crate) fn with_handle<T: Any + Send + Sync>(mut self, handle: T) -> Self {
        self.handle = Some(Arc::new(handle));
        self
    }

    pub(crate) fn handle<T: Any>(&self) -> Option<&T> {
        self.handle.as_deref().and_then(|h| h.downcast_ref())
    }

    pub(crate) fn oracle_secret(&self) -> Result<&SecretKey> {
        self.handle::<SecretKey>().ok_or_else(|| malformed("public key carries no encryption oracle"))
    }

    /// Canonical tree form `[value, evk, [aux…]]`.
    pub fn to_value(&self) -> Value {
        Value::List(vec![self.value.clone(), self.evk.clone(), Value::List(self.aux.clone())])
    }
}

impl PartialEq for PublicKey {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.evk == other.evk && self.aux == other.aux
    }
}

impl fmt::Debug for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PublicKey")
            .field("value", &self.value)
            .field("evk", &self.evk)
            .field("aux", &self.aux)
            .field("oracle", &self.handle.is_some())
            .finish()
    }
}

impl Serialize for PublicKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PublicKey", 3)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("evk", &self.evk)?;
        st.serialize_field("aux", &self.aux)?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KeyPair {
    pub sk: SecretKey,
    pub pk: PublicKey,
}

/// A plaintext tagged with the name of the space it lives in.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Message {
    tag: String,
    value: Value,
}

impl Message {
    pub fn new(tag: impl Into<String>, value: Value) -> Self {
        Message { tag: tag.into(), value }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn value(&self) -> &Value {
        &self.value
    }

    pub fn into_value(self) -> Value {
        self.value
    }
}

impl fmt::Debug for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.tag, self.value)
    }
}

/// A ciphertext tagged with its scheme's ciphertext tag.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Ciphertext {
    tag: String,
    value: Value,
}

impl Ciphertext {
    pub fn new(tag: impl Into<String>, value: Value) -> Self {
        Ciphertext { tag: tag.into(), value }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn value(&self) -> &Value {
        &self.value
    }

    pub fn into_value(self) -> Value {
        self.value
    }
}

impl fmt::Debug for Ciphertext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.tag, self.value)
    }
}

/// A public-key encryption scheme over untyped values. Implementations may
/// assume their inputs are members of the declared spaces; [`SchemeRef`]
/// checks tags and membership before delegating.
pub trait Scheme: Send + Sync {
    fn name(&self) -> String;

    fn ciphertext_tag(&self) -> String {
        self.name()
    }

    fn plaintext_space(&self) -> Space;

    fn ciphertext_space(&self) -> Space;

    fn keygen(&self, lambda: SecurityParameter, rng: &mut dyn RngCore) -> Result<KeyPair>;

    fn encrypt_value(&self, pk: &PublicKey, m: &Value, rng: &mut dyn RngCore) -> Result<Value>;

    fn decrypt_value(&self, sk: &SecretKey, c: &Value) -> Result<Value>;

    fn aux_public(&self) -> Vec<Value> {
        Vec::new()
    }

    /// Length `e` of the canonical secret-key bit string.
    fn key_bits(&self) -> usize;

    fn secret_to_bits(&self, sk: &SecretKey) -> Result<Vec<bool>>;

    fn secret_from_bits(&self, bits: &[bool]) -> Result<SecretKey>;

    /// Public key matching a given secret key (what keygen would publish).
    fn public_from_secret(&self, sk: &SecretKey, rng: &mut dyn RngCore) -> Result<PublicKey>;

    /// Every secret key, when the key space is small enough to list.
    fn secret_keys(&self) -> Option<Vec<SecretKey>> {
        None
    }

    /// Width of the fixed-width ciphertext bit encoding, if there is one.
    fn ciphertext_bits(&self) -> Option<usize> {
        None
    }

    fn ciphertext_to_bits(&self, _c: &Value) -> Result<Vec<bool>> {
        Err(Error::NonEnumerableSpace(self.ciphertext_space().name().to_string()))
    }

    /// Inverse of `ciphertext_to_bits`; errors on strings that encode no
    /// ciphertext.
    fn ciphertext_from_bits(&self, _bits: &[bool]) -> Result<Value> {
        Err(Error::NonEnumerableSpace(self.ciphertext_space().name().to_string()))
    }
}

/// Shared handle to a scheme with tag-checked entry points.
#[derive(Clone)]
pub struct SchemeRef(Arc<dyn Scheme>);

impl fmt::Debug for SchemeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scheme({})", self.0.name())
    }
}

impl Deref for SchemeRef {
    type Target = dyn Scheme;

    fn deref(&self) -> &Self::Target {
        &*self.0
    }
}

impl SchemeRef {
    pub fn new<S: Scheme + 'static>(scheme: S) -> Self {
        SchemeRef(Arc::new(scheme))
    }

    pub fn from_arc(scheme: Arc<dyn Scheme>) -> Self {
        SchemeRef(scheme)
    }

    pub fn same_as(&self, other: &SchemeRef) -> bool {
        self.name() == other.name()
    }

    pub fn message(&self, value: Value) -> Result<Message> {
        let space = self.plaintext_space();
        space.require(&value)?;
        Ok(Message::new(space.name(), value))
    }

    pub fn ciphertext(&self, value: Value) -> Result<Ciphertext> {
        self.ciphertext_space().require(&value)?;
        Ok(Ciphertext::new(self.ciphertext_tag(), value))
    }

    pub fn check_message(&self, m: &Message) -> Result<()> {
        let space = self.plaintext_space();
        if m.tag() != space.name() {
            return Err(Error::TagMismatch { expected: space.name().into(), found: m.tag().into() });
        }
        space.require(m.value())
    }

    pub fn check_ciphertext(&self, c: &Ciphertext) -> Result<()> {
        let tag = self.ciphertext_tag();
        if c.tag() != tag {
            return Err(Error::TagMismatch { expected: tag, found: c.tag().into() });
        }
        self.ciphertext_space().require(c.value())
    }

    pub fn keygen(&self, lambda: SecurityParameter, rng: &mut dyn RngCore) -> Result<KeyPair> {
        self.0.keygen(lambda, rng)
    }

    pub fn encrypt(&self, pk: &PublicKey, m: &Message, rng: &mut dyn RngCore) -> Result<Ciphertext> {
        self.check_message(m)?;
        let c = self.encrypt_value(pk, m.value(), rng)?;
        Ok(Ciphertext::new(self.ciphertext_tag(), c))
    }

    pub fn decrypt(&self, sk: &SecretKey, c: &Ciphertext) -> Result<Message> {
        self.check_ciphertext(c)?;
        let m = self.decrypt_value(sk, c.value())?;
        Ok(Message::new(self.plaintext_space().name(), m))
    }

    pub fn sample_message(&self, rng: &mut dyn RngCore) -> Message {
        let space = self.plaintext_space();
        Message::new(space.name(), space.sample(rng))
    }

    pub fn sample_ciphertext(&self, rng: &mut dyn RngCore) -> Ciphertext {
        Ciphertext::new(self.ciphertext_tag(), self.ciphertext_space().sample(rng))
    }
}

/// Outcome of a Monte Carlo correctness run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrectnessReport {
    pub subject: String,
    pub trials: u64,
    pub failures: u64,
    pub failure_rate: f64,
    pub seed: u64,
}

impl CorrectnessReport {
    pub fn new(subject: String, trials: u64, failures: u64, seed: u64) -> Self {
        CorrectnessReport { subject, trials, failures, failure_rate: failures as f64 / trials as f64, seed }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Trials sharing one keygen in correctness runs.
pub const KEYGEN_BATCH: u64 = 100;

/// Fraction of uniformly chosen messages that fail to decrypt back.
pub fn check_correctness(
    scheme: &SchemeRef,
    lambda: SecurityParameter,
    trials: u64,
    seed: u64,
) -> Result<CorrectnessReport> {
    check_correctness_with(scheme, lambda, trials, seed, Execution::default())
}

pub fn check_correctness_with(
    scheme: &SchemeRef,
    lambda: SecurityParameter,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<CorrectnessReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if scheme.plaintext_space().is_empty() {
        return Err(Error::EmptyPlaintextSpace(scheme.name()));
    }
    let batches = trials.div_ceil(KEYGEN_BATCH);
    let per_batch = exec.try_map(batches as usize, |b| -> Result<u64> {
        let mut rng = rng::stream(seed, b as u64);
        let keys = scheme.keygen(lambda, &mut rng)?;
        let count = KEYGEN_BATCH.min(trials - b as u64 * KEYGEN_BATCH);
        let mut failures = 0;
        for _ in 0..count {
            let m = scheme.sample_message(&mut rng);
            let c = scheme.encrypt(&keys.pk, &m, &mut rng)?;
            if scheme.decrypt(&keys.sk, &c)? != m {
                failures += 1;
            }
        }
        Ok(failures)
    })?;
    Ok(CorrectnessReport::new(scheme.name(), trials, per_batch.iter().sum(), seed))
}

/// k-tuples of plaintexts and ciphertexts under one key pair.
pub struct FiberPower {
    base: SchemeRef,
    k: usize,
}

pub fn fiber_power(scheme: &SchemeRef, k: usize) -> Result<SchemeRef> {
    if k == 0 {
        return Err(Error::InvalidParameter("fiber power needs k >= 1".into()));
    }
    Ok(SchemeRef::new(FiberPower { base: scheme.clone(), k }))
}

impl FiberPower {
    fn parts<'a>(&self, v: &'a Value) -> Result<&'a [Value]> {
        v.as_tuple(self.k)
    }
}

impl Scheme for FiberPower {
    fn name(&self) -> String {
        format!("{}^({})", self.base.name(), self.k)
    }

    fn ciphertext_tag(&self) -> String {
        format!("{}^({})", self.base.ciphertext_tag(), self.k)
    }

    fn plaintext_space(&self) -> Space {
        let m = self.base.plaintext_space();
        Space::power(format!("{}^{}", m.name(), self.k), &m, self.k)
    }

    fn ciphertext_space(&self) -> Space {
        let c = self.base.ciphertext_space();
        Space::power(format!("{}^{}", c.name(), self.k), &c, self.k)
    }

    fn keygen(&self, lambda: SecurityParameter, rng: &mut dyn RngCore) -> Result<KeyPair> {
        self.base.keygen(lambda, rng)
    }

    fn encrypt_value(&self, pk: &PublicKey, m: &Value, rng: &mut dyn RngCore) -> Result<Value> {
        let parts = self.parts(m)?;
        let cs = parts.iter().map(|mi| self.base.encrypt_value(pk, mi, rng)).collect::<Result<Vec<_>>>()?;
        Ok(Value::List(cs))
    }

    fn decrypt_value(&self, sk: &SecretKey, c: &Value) -> Result<Value> {
        let parts = self.parts(c)?;
        let ms = parts.iter().map(|ci| self.base.decrypt_value(sk, ci)).collect::<Result<Vec<_>>>()?;
        Ok(Value::List(ms))
    }

    fn aux_public(&self) -> Vec<Value> {
        self.base.aux_public()
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
        self.base.public_from_secret(sk, rng)
    }

    fn secret_keys(&self) -> Option<Vec<SecretKey>> {
        self.base.secret_keys()
    }

    fn ciphertext_bits(&self) -> Option<usize> {
        self.base.ciphertext_bits().map(|w| w * self.k)
    }

    fn ciphertext_to_bits(&self, c: &Value) -> Result<Vec<bool>> {
        let mut bits = Vec::new();
        for ci in self.parts(c)? {
            bits.extend(self.base.ciphertext_to_bits(ci)?);
        }
        Ok(bits)
    }

    fn ciphertext_from_bits(&self, bits: &[bool]) -> Result<Value> {
        let w = self
            .base
            .ciphertext_bits()
            .ok_or_else(|| Error::NonEnumerableSpace(self.base.ciphertext_space().name().to_string()))?;
        if bits.len() != w * self.k {
            return Err(malformed("ciphertext bit string has the wrong length"));
        }
        let parts = bits
            .chunks(w.max(1))
            .take(self.k)
            .map(|chunk| self.base.ciphertext_from_bits(chunk))
            .collect::<Result<Vec<_>>>()?;
        Ok(Value::List(parts))
    }
}

/// The same scheme with extra public values appended to every public key.
pub struct Augmented {
    base: SchemeRef,
    aux: Vec<Value>,
}

pub fn augment(scheme: &SchemeRef, aux: Vec<Value>) -> SchemeRef {
    SchemeRef::new(Augmented { base: scheme.clone(), aux })
}

impl Scheme for Augmented {
    fn name(&self) -> String {
        if self.aux.is_empty() {
            self.base.name()
        } else {
            let aux: Vec<String> = self.aux.iter().map(Value::to_string).collect();
            format!("{}[{}]", self.base.name(), aux.join(";"))
        }
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
        let mut keys = self.base.keygen(lambda, rng)?;
        keys.pk.aux.extend(self.aux.iter().cloned());
        Ok(keys)
    }

    fn encrypt_value(&self, pk: &PublicKey, m: &Value, rng: &mut dyn RngCore) -> Result<Value> {
        self.base.encrypt_value(pk, m, rng)
    }

    fn decrypt_value(&self, sk: &SecretKey, c: &Value) -> Result<Value> {
        self.base.decrypt_value(sk, c)
    }

    fn aux_public(&self) -> Vec<Value> {
        let mut aux = self.base.aux_public();
        aux.extend(self.aux.iter().cloned());
        aux
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
        let mut pk = self.base.public_from_secret(sk, rng)?;
        pk.aux.extend(self.aux.iter().cloned());
        Ok(pk)
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
