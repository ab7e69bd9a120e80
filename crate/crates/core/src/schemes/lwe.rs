//! Symmetric LWE bit encryption at toy parameters.
//!
//! `Enc(s, m) = (a, a·s + m·q/2 + e mod q)` with `a` uniform and `e` uniform
//! in `[−B, B]`. Two decryption rules are provided: rounding `⌊2v/q⌉ mod 2`
//! (ties away from zero) and the threshold rule `v ∈ (−q/4, q/4) ↦ 0`, both
//! on the centered phase `v = b − a·s ∈ (−q/2, q/2]`.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{malformed, Error, Result};
use crate::scheme::{KeyPair, PublicKey, Scheme, SecretKey, SecurityParameter};
use crate::value::{bit_width, bits_to_int, int_to_bits, Space, Value};

/// Key spaces up to this size are listed for exhaustive checks.
const MAX_LISTED_KEYS: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LweParams {
    pub n: usize,
    pub q: u64,
    pub noise_bound: u64,
}

impl LweParams {
    /// Validated parameters: `q` even and `noise_bound < q/8`.
    pub fn new(n: usize, q: u64, noise_bound: u64) -> Result<Self> {
        let p = LweParams::new_unchecked(n, q, noise_bound)?;
        if noise_bound.checked_mul(8).is_none_or(|b8| b8 >= q) {
            return Err(Error::InvalidParameter(format!("noise bound {noise_bound} is not below q/8 = {q}/8")));
        }
        Ok(p)
    }

    /// Skips the noise condition; for experiments with deliberately wide
    /// noise.
    pub fn new_unchecked(n: usize, q: u64, noise_bound: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if q < 2 || !q.is_multiple_of(2) || q > 1 << 62 {
            return Err(Error::InvalidParameter(format!("modulus {q} must be even and at most 2^62")));
        }
        if noise_bound >= q / 2 {
            return Err(Error::InvalidParameter("noise bound must be below q/2".into()));
        }
        Ok(LweParams { n, q, noise_bound })
    }

    /// Bits per residue in the canonical encodings.
    pub fn residue_bits(&self) -> usize {
        bit_width(self.q)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LweCiphertext {
    pub a: Vec<u64>,
    pub b: u64,
}

impl LweCiphertext {
    pub fn to_value(&self) -> Value {
        Value::List(vec![Value::ints(self.a.iter().copied()), Value::Int(self.b)])
    }

    pub fn from_value(params: &LweParams, v: &Value) -> Result<Self> {
        let [a, b] = v.as_tuple(2)? else { unreachable!() };
        let a = a.as_ints()?;
        let b = b.as_int()?;
        if a.len() != params.n || b >= params.q || a.iter().any(|&x| x >= params.q) {
            return Err(malformed(format!("{v} is not an LWE ciphertext for q={}", params.q)));
        }
        Ok(LweCiphertext { a, b })
    }
}

fn check_key(params: &LweParams, sk: &[u64]) -> Result<()> {
    if sk.len() != params.n || sk.iter().any(|&x| x >= params.q) {
        return Err(malformed("secret key is not a vector in Z_q^n"));
    }
    Ok(())
}

fn dot(params: &LweParams, a: &[u64], s: &[u64]) -> u64 {
    let q = params.q as u128;
    (a.iter().zip(s).map(|(&x, &y)| x as u128 * y as u128 % q).sum::<u128>() % q) as u64
}

/// Deterministic encryption with explicit mask and noise.
pub fn lwe_encrypt_with(params: &LweParams, sk: &[u64], m: u64, a: Vec<u64>, e: i64) -> Result<LweCiphertext> {
    check_key(params, sk)?;
    if m > 1 {
        return Err(Error::InvalidParameter(format!("message {m} is not a bit")));
    }
    if a.len() != params.n || a.iter().any(|&x| x >= params.q) {
        return Err(malformed("mask is not a vector in Z_q^n"));
    }
    let q = params.q as i128;
    let b = (dot(params, &a, sk) as i128 + m as i128 * q / 2 + e as i128).rem_euclid(q) as u64;
    Ok(LweCiphertext { a, b })
}

pub fn lwe_encrypt(params: &LweParams, sk: &[u64], m: u64, rng: &mut dyn RngCore) -> Result<LweCiphertext> {
    let a = (0..params.n).map(|_| rng.gen_range(0..params.q)).collect();
    let bound = params.noise_bound as i64;
    let e = rng.gen_range(-bound..=bound);
    lwe_encrypt_with(params, sk, m, a, e)
}

/// Centered representative of `b − a·s` in `(−q/2, q/2]`.
pub fn centered_phase(params: &LweParams, sk: &[u64], c: &LweCiphertext) -> Result<i64> {
    check_key(params, sk)?;
    let q = params.q;
    let r = (c.b as i128 - dot(params, &c.a, sk) as i128).rem_euclid(q as i128) as u64;
    Ok(if 2 * r > q { r as i64 - q as i64 } else { r as i64 })
}

/// `⌊2v/q⌉ mod 2`, ties rounded away from zero.
pub fn lwe_decrypt(params: &LweParams, sk: &[u64], c: &LweCiphertext) -> Result<u64> {
    let v = centered_phase(params, sk, c)? as i128;
    let q = params.q as i128;
    let rounded = if v >= 0 { (4 * v + q).div_euclid(2 * q) } else { -(-4 * v + q).div_euclid(2 * q) };
    Ok(rounded.rem_euclid(2) as u64)
}

/// 0 iff the centered phase lies in the open interval `(−q/4, q/4)`.
pub fn lwe_threshold_decrypt(params: &LweParams, sk: &[u64], c: &LweCiphertext) -> Result<u64> {
    let v = centered_phase(params, sk, c)? as i128;
    Ok(if (4 * v).abs() < params.q as i128 { 0 } else { 1 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecryptionRule {
    Rounding,
    Threshold,
}

/// The LWE scheme as a [`Scheme`]; the public key is an encryption oracle.
#[derive(Clone, Debug)]
pub struct LweScheme {
    params: LweParams,
    rule: DecryptionRule,
}

impl LweScheme {
    pub fn new(params: LweParams) -> Self {
        LweScheme { params, rule: DecryptionRule::Rounding }
    }

    /// Threshold-decryption variant; needs `q ≡ 2 (mod 4)`.
    pub fn threshold(params: LweParams) -> Result<Self> {
        if params.q % 4 != 2 {
            return Err(Error::InvalidParameter(format!("threshold variant needs q ≡ 2 mod 4, got {}", params.q)));
        }
        Ok(LweScheme { params, rule: DecryptionRule::Threshold })
    }

    pub fn params(&self) -> &LweParams {
        &self.params
    }

    pub fn rule(&self) -> DecryptionRule {
        self.rule
    }

    fn residues(&self) -> Space {
        Space::range(format!("Z{}", self.params.q), self.params.q)
    }

    fn key_space(&self) -> Space {
        Space::power(format!("Z{}^{}", self.params.q, self.params.n), &self.residues(), self.params.n)
    }

    fn secret(&self, sk: &SecretKey) -> Result<Vec<u64>> {
        let s = sk.value().as_ints()?;
        check_key(&self.params, &s)?;
        Ok(s)
    }

    fn ints_to_bits(&self, xs: &[u64]) -> Vec<bool> {
        let w = self.params.residue_bits();
        let mut bits = Vec::with_capacity(xs.len() * w);
        xs.iter().for_each(|&x| int_to_bits(x, w, &mut bits));
        bits
    }

    fn bits_to_ints(&self, bits: &[bool], count: usize) -> Result<Vec<u64>> {
        let w = self.params.residue_bits();
        if bits.len() != w * count {
            return Err(malformed("bit string has the wrong length"));
        }
        let xs: Vec<u64> = bits.chunks(w.max(1)).take(count).map(bits_to_int).collect();
        if xs.iter().any(|&x| x >= self.params.q) {
            return Err(malformed("bit string encodes a residue out of range"));
        }
        Ok(xs)
    }
}

impl Scheme for LweScheme {
    fn name(&self) -> String {
        let p = &self.params;
        let family = match self.rule {
            DecryptionRule::Rounding => "lwe",
            DecryptionRule::Threshold => "lwe2q",
        };
        format!("{family}(n={},q={},B={})", p.n, p.q, p.noise_bound)
    }

    fn plaintext_space(&self) -> Space {
        Space::range("Z2", 2)
    }

    fn ciphertext_space(&self) -> Space {
        let p = &self.params;
        let a = Space::power(format!("Z{}^{}", p.q, p.n), &self.residues(), p.n);
        Space::product(format!("Z{}^{}", p.q, p.n + 1), vec![a, self.residues()])
    }

    fn keygen(&self, _lambda: SecurityParameter, rng: &mut dyn RngCore) -> Result<KeyPair> {
        let sk = SecretKey::new(self.key_space().sample(rng));
        Ok(KeyPair { pk: PublicKey::sealed(sk.clone()), sk })
    }

    fn encrypt_value(&self, pk: &PublicKey, m: &Value, rng: &mut dyn RngCore) -> Result<Value> {
        let s = self.secret(pk.oracle_secret()?)?;
        Ok(lwe_encrypt(&self.params, &s, m.as_int()?, rng)?.to_value())
    }

    fn decrypt_value(&self, sk: &SecretKey, c: &Value) -> Result<Value> {
        let s = self.secret(sk)?;
        let c = LweCiphertext::from_value(&self.params, c)?;
        let m = match self.rule {
            DecryptionRule::Rounding => lwe_decrypt(&self.params, &s, &c)?,
            DecryptionRule::Threshold => lwe_threshold_decrypt(&self.params, &s, &c)?,
        };
        Ok(Value::Int(m))
    }

    fn key_bits(&self) -> usize {
        self.params.n * self.params.residue_bits()
    }

    fn secret_to_bits(&self, sk: &SecretKey) -> Result<Vec<bool>> {
        Ok(self.ints_to_bits(&self.secret(sk)?))
    }

    fn secret_from_bits(&self, bits: &[bool]) -> Result<SecretKey> {
        Ok(SecretKey::new(Value::ints(self.bits_to_ints(bits, self.params.n)?)))
    }

    fn public_from_secret(&self, sk: &SecretKey, _rng: &mut dyn RngCore) -> Result<PublicKey> {
        self.secret(sk)?;
        Ok(PublicKey::sealed(sk.clone()))
    }

    fn secret_keys(&self) -> Option<Vec<SecretKey>> {
        let space = self.key_space();
        if space.size()? > MAX_LISTED_KEYS {
            return None;
        }
        let keys = space.iter().ok()?.map(SecretKey::new).collect();
        Some(keys)
    }

    fn ciphertext_bits(&self) -> Option<usize> {
        Some((self.params.n + 1) * self.params.residue_bits())
    }

    fn ciphertext_to_bits(&self, c: &Value) -> Result<Vec<bool>> {
        let c = LweCiphertext::from_value(&self.params, c)?;
        let mut xs = c.a;
        xs.push(c.b);
        Ok(self.ints_to_bits(&xs))
    }

    fn ciphertext_from_bits(&self, bits: &[bool]) -> Result<Value> {
        let mut xs = self.bits_to_ints(bits, self.params.n + 1)?;
        let b = xs.pop().expect("n + 1 residues");
        Ok(LweCiphertext { a: xs, b }.to_value())
    }
}
