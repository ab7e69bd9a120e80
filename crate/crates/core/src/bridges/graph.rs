use rand::RngCore;

use super::{Bridge, BridgeKey};
use crate::error::{malformed, Error, Result};
use crate::scheme::{KeyPair, PublicKey, Scheme, SchemeRef, SecretKey, SecurityParameter};
use crate::value::{Space, Value};

/// Public half of a graph-scheme key, kept structured alongside the flat
/// published value.
pub(crate) struct GraphPublic {
    pk1: PublicKey,
    pk2: PublicKey,
    bk: BridgeKey,
}

/// Encrypts `m` as `(Enc₁(m), convert(Enc₁(m)))` under the keys of a bridge.
struct GraphScheme {
    bridge: Bridge,
    shared_randomness: bool,
}

/// The graph scheme of a bridge. By default the two components use
/// independent encryption randomness; with `shared_randomness` the second
/// component converts the very ciphertext placed in the first.
pub fn graph_scheme(bridge: &Bridge, shared_randomness: bool) -> SchemeRef {
    SchemeRef::new(GraphScheme { bridge: bridge.clone(), shared_randomness })
}

/// `(sk₁, sk₂)` from a graph-scheme secret key.
pub fn graph_secret_parts(sk: &SecretKey) -> Result<(SecretKey, SecretKey)> {
    let [a, b] = sk.value().as_tuple(2)? else { unreachable!() };
    Ok((SecretKey::new(a.clone()), SecretKey::new(b.clone())))
}

impl Scheme for GraphScheme {
    fn name(&self) -> String {
        let suffix = if self.shared_randomness { ",shared" } else { "" };
        format!("graph({}{suffix})", self.bridge.name())
    }

    fn plaintext_space(&self) -> Space {
        self.bridge.source().plaintext_space()
    }

    fn ciphertext_space(&self) -> Space {
        let c1 = self.bridge.source().ciphertext_space();
        let c2 = self.bridge.target().ciphertext_space();
        Space::product(format!("{}x{}", c1.name(), c2.name()), vec![c1, c2])
    }

    fn keygen(&self, lambda: SecurityParameter, rng: &mut dyn RngCore) -> Result<KeyPair> {
        let keys = self.bridge.keygen(lambda, rng)?;
        let sk = SecretKey::new(Value::List(vec![keys.sk1.value().clone(), keys.sk2.value().clone()]));
        let published = Value::List(vec![keys.pk1.to_value(), keys.pk2.to_value(), keys.bk.to_value()]);
        let pk = PublicKey::new(published).with_handle(GraphPublic { pk1: keys.pk1, pk2: keys.pk2, bk: keys.bk });
        Ok(KeyPair { sk, pk })
    }

    fn encrypt_value(&self, pk: &PublicKey, m: &Value, rng: &mut dyn RngCore) -> Result<Value> {
        let keys = pk.handle::<GraphPublic>().ok_or_else(|| malformed("not a graph-scheme public key"))?;
        let source = self.bridge.source();
        let first = source.encrypt_value(&keys.pk1, m, rng)?;
        let fed = if self.shared_randomness { first.clone() } else { source.encrypt_value(&keys.pk1, m, rng)? };
        let second = self.bridge.convert_value(&keys.bk, &keys.pk2, &fed, rng)?;
        Ok(Value::List(vec![first, second]))
    }

    fn decrypt_value(&self, sk: &SecretKey, c: &Value) -> Result<Value> {
        let (sk1, _) = graph_secret_parts(sk)?;
        let [first, _] = c.as_tuple(2)? else { unreachable!() };
        self.bridge.source().decrypt_value(&sk1, first)
    }

    fn key_bits(&self) -> usize {
        self.bridge.source().key_bits() + self.bridge.target().key_bits()
    }

    fn secret_to_bits(&self, sk: &SecretKey) -> Result<Vec<bool>> {
        let (sk1, sk2) = graph_secret_parts(sk)?;
        let mut bits = self.bridge.source().secret_to_bits(&sk1)?;
        bits.extend(self.bridge.target().secret_to_bits(&sk2)?);
        Ok(bits)
    }

    fn secret_from_bits(&self, bits: &[bool]) -> Result<SecretKey> {
        let split = self.bridge.source().key_bits();
        if bits.len() != self.key_bits() {
            return Err(malformed("bit string has the wrong length"));
        }
        let sk1 = self.bridge.source().secret_from_bits(&bits[..split])?;
        let sk2 = self.bridge.target().secret_from_bits(&bits[split..])?;
        Ok(SecretKey::new(Value::List(vec![sk1.value().clone(), sk2.value().clone()])))
    }

    fn public_from_secret(&self, _sk: &SecretKey, _rng: &mut dyn RngCore) -> Result<PublicKey> {
        Err(Error::InvalidParameter("graph-scheme public keys come only from bridge key generation".into()))
    }
}

/// The source scheme whose public key also carries `pk₂` and the bridge key,
/// which is what an adversary attacking the bridge gets to see.
struct BridgeView {
    bridge: Bridge,
}

pub fn bridge_public_view(bridge: &Bridge) -> SchemeRef {
    SchemeRef::new(BridgeView { bridge: bridge.clone() })
}

impl Scheme for BridgeView {
    fn name(&self) -> String {
        format!("{}+keys({})", self.bridge.source().name(), self.bridge.name())
    }

    fn ciphertext_tag(&self) -> String {
        self.bridge.source().ciphertext_tag()
    }

    fn plaintext_space(&self) -> Space {
        self.bridge.source().plaintext_space()
    }

    fn ciphertext_space(&self) -> Space {
        self.bridge.source().ciphertext_space()
    }

    fn keygen(&self, lambda: SecurityParameter, rng: &mut dyn RngCore) -> Result<KeyPair> {
        let keys = self.bridge.keygen(lambda, rng)?;
        let mut pk = keys.pk1;
        pk.aux.push(keys.pk2.to_value());
        pk.aux.push(keys.bk.to_value());
        Ok(KeyPair { sk: keys.sk1, pk })
    }

    fn encrypt_value(&self, pk: &PublicKey, m: &Value, rng: &mut dyn RngCore) -> Result<Value> {
        self.bridge.source().encrypt_value(pk, m, rng)
    }

    fn decrypt_value(&self, sk: &SecretKey, c: &Value) -> Result<Value> {
        self.bridge.source().decrypt_value(sk, c)
    }

    fn key_bits(&self) -> usize {
        self.bridge.source().key_bits()
    }

    fn secret_to_bits(&self, sk: &SecretKey) -> Result<Vec<bool>> {
        self.bridge.source().secret_to_bits(sk)
    }

    fn secret_from_bits(&self, bits: &[bool]) -> Result<SecretKey> {
        self.bridge.source().secret_from_bits(bits)
    }

    fn public_from_secret(&self, sk: &SecretKey, rng: &mut dyn RngCore) -> Result<PublicKey> {
        let source = self.bridge.source();
        let pk1 = source.public_from_secret(sk, rng)?;
        let keys =
            self.bridge.keygen_from_source(KeyPair { sk: sk.clone(), pk: pk1 }, SecurityParameter::default(), rng)?;
        let mut pk = keys.pk1;
        pk.aux.push(keys.pk2.to_value());
        pk.aux.push(keys.bk.to_value());
        Ok(pk)
    }
}
