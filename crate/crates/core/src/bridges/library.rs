use std::sync::Arc;

use rand::{Rng, RngCore};

use super::{compose, concat_bridges, Bridge, BridgeAlgorithm, BridgeKey, CompletenessStatus, Iota, KeyMode};
use crate::error::{malformed, Error, Result};
use crate::scheme::{fiber_power, KeyPair, PublicKey, Scheme, SchemeRef, SecretKey, SecurityParameter};
use crate::schemes::{GmParams, GmScheme, LweCiphertext, LweParams, LweScheme};
use crate::value::{Space, Value};

/// Same key pair on both sides, empty bridge key, ciphertexts passed through.
struct Passthrough {
    scheme: String,
}

impl BridgeAlgorithm for Passthrough {
    fn derive(&self, source: &KeyPair, _: SecurityParameter, _: &mut dyn RngCore) -> Result<(KeyPair, BridgeKey)> {
        Ok((source.clone(), BridgeKey::empty()))
    }

    fn convert(&self, _: &BridgeKey, _: &PublicKey, c: &Value, _: &mut dyn RngCore) -> Result<Value> {
        Ok(c.clone())
    }

    fn bundle_signature(&self) -> String {
        format!("shared:{}", self.scheme)
    }
}

pub fn identity_bridge(scheme: &SchemeRef) -> Result<Bridge> {
    let iota = Iota::identity(&scheme.plaintext_space())?;
    let alg = Arc::new(Passthrough { scheme: scheme.name() });
    Ok(Bridge::new(format!("id[{}]", scheme.name()), scheme.clone(), scheme.clone(), iota, alg, KeyMode::Shared)?
        .with_completeness(CompletenessStatus::Claimed))
}

/// Identity bridge on Goldwasser–Micali.
pub fn gm_identity_bridge(params: GmParams) -> Result<Bridge> {
    identity_bridge(&SchemeRef::new(GmScheme::new(params)))
}

/// Adds two ciphertexts under the same key: `(a₁+a₂, b₁+b₂) mod q`.
struct AddCiphertexts {
    params: LweParams,
    scheme: String,
}

fn add_lwe(params: &LweParams, x: &LweCiphertext, y: &LweCiphertext) -> LweCiphertext {
    let q = params.q;
    LweCiphertext { a: x.a.iter().zip(&y.a).map(|(u, v)| (u + v) % q).collect(), b: (x.b + y.b) % q }
}

impl BridgeAlgorithm for AddCiphertexts {
    fn derive(&self, source: &KeyPair, _: SecurityParameter, _: &mut dyn RngCore) -> Result<(KeyPair, BridgeKey)> {
        Ok((source.clone(), BridgeKey::empty()))
    }

    fn convert(&self, _: &BridgeKey, _: &PublicKey, c: &Value, _: &mut dyn RngCore) -> Result<Value> {
        let [x, y] = c.as_tuple(2)? else { unreachable!() };
        let x = LweCiphertext::from_value(&self.params, x)?;
        let y = LweCiphertext::from_value(&self.params, y)?;
        Ok(add_lwe(&self.params, &x, &y).to_value())
    }

    fn bundle_signature(&self) -> String {
        format!("shared:{}", self.scheme)
    }
}

fn xor_iota(domain: &Space, codomain: &Space) -> Result<Iota> {
    Iota::from_fn("xor", domain, codomain, |m| {
        let bits = m.as_bits()?;
        Ok(Value::bit(bits.iter().fold(false, |acc, &b| acc ^ b)))
    })
}

/// From pairs of LWE ciphertexts to one LWE ciphertext of the XOR, by adding
/// them. Noise adds up, so conversions of arbitrary ciphertexts can fail.
pub fn lwe_additive_bridge(params: LweParams) -> Result<Bridge> {
    lwe_additive_bridge_on(LweScheme::new(params))
}

/// Additive bridge over either decryption rule.
pub fn lwe_additive_bridge_on(scheme: LweScheme) -> Result<Bridge> {
    let params = *scheme.params();
    let base = SchemeRef::new(scheme);
    let pairs = fiber_power(&base, 2)?;
    let iota = xor_iota(&pairs.plaintext_space(), &base.plaintext_space())?;
    let alg = Arc::new(AddCiphertexts { params, scheme: base.name() });
    Bridge::new("additive", pairs, base, iota, alg, KeyMode::Shared)
}

/// `concat(additive, additive)` followed by `additive`: both components hold
/// the same sum, so the plaintext map is constantly 0 while the noise doubles.
pub fn double_additive_bridge(params: LweParams) -> Result<Bridge> {
    let add = lwe_additive_bridge(params)?;
    let twice = concat_bridges(&[add.clone(), add.clone()])?;
    Ok(compose(&twice, &add)?.with_name("double-additive"))
}

/// Scales both parts of a ciphertext by `Q/q`; the secret key is reused
/// as a vector over `Z_Q`.
struct ModSwitch {
    source: LweParams,
    target: LweParams,
}

impl BridgeAlgorithm for ModSwitch {
    fn derive(&self, source: &KeyPair, _: SecurityParameter, _: &mut dyn RngCore) -> Result<(KeyPair, BridgeKey)> {
        let s = source.sk.value().as_ints()?;
        if s.len() != self.source.n || s.iter().any(|&x| x >= self.source.q) {
            return Err(malformed("source key is not a vector in Z_q^n"));
        }
        let sk = SecretKey::new(Value::ints(s));
        Ok((KeyPair { pk: PublicKey::sealed(sk.clone()), sk }, BridgeKey::empty()))
    }

    fn convert(&self, _: &BridgeKey, _: &PublicKey, c: &Value, _: &mut dyn RngCore) -> Result<Value> {
        let c = LweCiphertext::from_value(&self.source, c)?;
        let factor = self.target.q / self.source.q;
        Ok(LweCiphertext { a: c.a.iter().map(|x| x * factor).collect(), b: c.b * factor }.to_value())
    }

    fn bundle_signature(&self) -> String {
        format!("modswitch:{}->{}", self.source.q, self.target.q)
    }
}

/// Modulus switching between threshold-decryption LWE schemes with
/// `q ≡ Q ≡ 2 (mod 4)` and `q | Q`. The centered phase scales exactly by
/// `Q/q`, so decryption agrees on every ciphertext.
pub fn modswitch_bridge(n: usize, q: u64, big_q: u64, noise_bound: u64) -> Result<Bridge> {
    if q == 0 || !big_q.is_multiple_of(q) {
        return Err(Error::DivisibilityViolation { q, big_q });
    }
    let source_params = LweParams::new_unchecked(n, q, noise_bound)?;
    let target_params = LweParams::new_unchecked(n, big_q, noise_bound)?;
    let source = SchemeRef::new(LweScheme::threshold(source_params)?);
    let target = SchemeRef::new(LweScheme::threshold(target_params)?);
    let iota = Iota::identity(&source.plaintext_space())?;
    let alg = Arc::new(ModSwitch { source: source_params, target: target_params });
    Ok(Bridge::new(format!("modswitch({q}->{big_q})"), source, target, iota, alg, KeyMode::Derived)?
        .with_completeness(CompletenessStatus::Claimed))
}

/// Identity bridge on rounding LWE that, with probability 1/2, adds `q/2`
/// to `b` and so flips the plaintext.
struct Sabotage {
    params: LweParams,
    scheme: String,
}

impl BridgeAlgorithm for Sabotage {
    fn derive(&self, source: &KeyPair, _: SecurityParameter, _: &mut dyn RngCore) -> Result<(KeyPair, BridgeKey)> {
        Ok((source.clone(), BridgeKey::empty()))
    }

    fn convert(&self, _: &BridgeKey, _: &PublicKey, c: &Value, rng: &mut dyn RngCore) -> Result<Value> {
        let mut c = LweCiphertext::from_value(&self.params, c)?;
        if rng.gen::<bool>() {
            c.b = (c.b + self.params.q / 2) % self.params.q;
        }
        Ok(c.to_value())
    }

    fn bundle_signature(&self) -> String {
        format!("shared:{}", self.scheme)
    }
}

pub fn sabotaged_lwe_bridge(params: LweParams) -> Result<Bridge> {
    let scheme = SchemeRef::new(LweScheme::new(params));
    let iota = Iota::identity(&scheme.plaintext_space())?;
    let alg = Arc::new(Sabotage { params, scheme: scheme.name() });
    Bridge::new("sabotaged", scheme.clone(), scheme, iota, alg, KeyMode::Shared)
}

/// An inner scheme with `extra` additional bits appended to each
/// ciphertext. The extra bits are random on encryption and ignored on
/// decryption.
pub struct AppendedScheme {
    inner: SchemeRef,
    extra: usize,
}

impl AppendedScheme {
    pub fn over(inner: &SchemeRef, extra: usize) -> SchemeRef {
        SchemeRef::new(AppendedScheme { inner: inner.clone(), extra })
    }

    fn split<'a>(&self, c: &'a Value) -> Result<(&'a Value, Vec<bool>)> {
        let [inner, tail] = c.as_tuple(2)? else { unreachable!() };
        let tail = tail.as_bits()?;
        if tail.len() != self.extra {
            return Err(malformed(format!("expected {} appended bits", self.extra)));
        }
        Ok((inner, tail))
    }
}

impl Scheme for AppendedScheme {
    fn name(&self) -> String {
        format!("{}+{}b", self.inner.name(), self.extra)
    }

    fn plaintext_space(&self) -> Space {
        self.inner.plaintext_space()
    }

    fn ciphertext_space(&self) -> Space {
        let inner = self.inner.ciphertext_space();
        let tail = Space::power(format!("Z2^{}", self.extra), &Space::range("Z2", 2), self.extra);
        Space::product(format!("{}x{}", inner.name(), tail.name()), vec![inner, tail])
    }

    fn keygen(&self, lambda: SecurityParameter, rng: &mut dyn RngCore) -> Result<KeyPair> {
        self.inner.keygen(lambda, rng)
    }

    fn encrypt_value(&self, pk: &PublicKey, m: &Value, rng: &mut dyn RngCore) -> Result<Value> {
        let c = self.inner.encrypt_value(pk, m, rng)?;
        let tail = Value::bits((0..self.extra).map(|_| rng.gen::<bool>()));
        Ok(Value::List(vec![c, tail]))
    }

    fn decrypt_value(&self, sk: &SecretKey, c: &Value) -> Result<Value> {
        let (inner, _) = self.split(c)?;
        self.inner.decrypt_value(sk, inner)
    }

    fn aux_public(&self) -> Vec<Value> {
        self.inner.aux_public()
    }

    fn key_bits(&self) -> usize {
        self.inner.key_bits()
    }

    fn secret_to_bits(&self, sk: &SecretKey) -> Result<Vec<bool>> {
        self.inner.secret_to_bits(sk)
    }

    fn secret_from_bits(&self, bits: &[bool]) -> Result<SecretKey> {
        self.inner.secret_from_bits(bits)
    }

    fn public_from_secret(&self, sk: &SecretKey, rng: &mut dyn RngCore) -> Result<PublicKey> {
        self.inner.public_from_secret(sk, rng)
    }

    fn secret_keys(&self) -> Option<Vec<SecretKey>> {
        self.inner.secret_keys()
    }

    fn ciphertext_bits(&self) -> Option<usize> {
        Some(self.inner.ciphertext_bits()? + self.extra)
    }

    fn ciphertext_to_bits(&self, c: &Value) -> Result<Vec<bool>> {
        let (inner, tail) = self.split(c)?;
        let mut bits = self.inner.ciphertext_to_bits(inner)?;
        bits.extend(tail);
        Ok(bits)
    }

    fn ciphertext_from_bits(&self, bits: &[bool]) -> Result<Value> {
        let split = bits.len().checked_sub(self.extra).ok_or_else(|| malformed("bit string too short"))?;
        let inner = self.inner.ciphertext_from_bits(&bits[..split])?;
        Ok(Value::List(vec![inner, Value::bits(bits[split..].iter().copied())]))
    }
}

/// Appends one half of the source secret key (the bridge key) to the
/// ciphertext.
struct AppendKeyHalf {
    base: SchemeRef,
    second_half: bool,
}

impl BridgeAlgorithm for AppendKeyHalf {
    fn derive(&self, source: &KeyPair, _: SecurityParameter, _: &mut dyn RngCore) -> Result<(KeyPair, BridgeKey)> {
        let bits = self.base.secret_to_bits(&source.sk)?;
        let half = bits.len() / 2;
        let chosen = if self.second_half { &bits[half..] } else { &bits[..half] };
        Ok((source.clone(), BridgeKey::Data(Value::bits(chosen.iter().copied()))))
    }

    fn convert(&self, bk: &BridgeKey, _: &PublicKey, c: &Value, _: &mut dyn RngCore) -> Result<Value> {
        Ok(Value::List(vec![c.clone(), bk.data()?.clone()]))
    }

    fn bundle_signature(&self) -> String {
        format!("halfkey{}:{}", u8::from(self.second_half), self.base.name())
    }
}

/// Two complete bridges `E → E₂ → E₃` that each publish one half of the
/// secret key. Each is harmless alone; their composition publishes both.
pub fn halfkey_bridges(base: &SchemeRef) -> Result<(Bridge, Bridge)> {
    let e = base.key_bits();
    if e % 2 == 1 {
        return Err(Error::OddKeyLength(e));
    }
    let half = e / 2;
    let e2 = AppendedScheme::over(base, half);
    let e3 = AppendedScheme::over(&e2, half);
    let iota = Iota::identity(&base.plaintext_space())?;
    let f = Bridge::new(
        "halfkey-f",
        base.clone(),
        e2.clone(),
        iota.clone(),
        Arc::new(AppendKeyHalf { base: base.clone(), second_half: false }),
        KeyMode::Shared,
    )?
    .with_completeness(CompletenessStatus::Claimed);
    let g = Bridge::new(
        "halfkey-g",
        e2.clone(),
        e3,
        iota,
        Arc::new(AppendKeyHalf { base: base.clone(), second_half: true }),
        KeyMode::Shared,
    )?
    .with_completeness(CompletenessStatus::Claimed);
    Ok((f, g))
}
