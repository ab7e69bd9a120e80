//! Goldwasser–Micali bit encryption.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{malformed, Error, Result};
use crate::scheme::{KeyPair, PublicKey, Scheme, SecretKey, SecurityParameter};
use crate::value::{bit_width, bits_to_int, int_to_bits, Space, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GmParams {
    pub p: u64,
    pub q_prime: u64,
    pub n: u64,
    pub z: u64,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut acc = 1u128 % m;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Jacobi symbol `(a/n)` for odd `n ≥ 1`.
pub fn jacobi(a: u64, n: u64) -> i32 {
    assert!(n % 2 == 1, "Jacobi symbol needs an odd modulus");
    let (mut a, mut n) = (a % n, n);
    let mut sign = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        (a, n) = (n, a);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// `a` is a quadratic residue modulo the odd prime `p` (Euler's criterion).
pub fn is_residue_mod_prime(a: u64, p: u64) -> bool {
    pow_mod(a, (p - 1) / 2, p) == 1
}

impl GmParams {
    /// Checks the primes and scans upward from 2 for the pseudo-square `z`.
    pub fn new(p: u64, q_prime: u64) -> Result<Self> {
        for x in [p, q_prime] {
            if x % 2 == 0 || !is_prime(x) {
                return Err(Error::InvalidParameter(format!("{x} is not an odd prime")));
            }
        }
        if p == q_prime {
            return Err(Error::InvalidParameter("GM primes must be distinct".into()));
        }
        let n = p
            .checked_mul(q_prime)
            .filter(|&n| n < 1 << 32)
            .ok_or_else(|| Error::InvalidParameter("modulus too large".into()))?;
        let z = (2..n)
            .find(|&z| jacobi(z, n) == 1 && !is_residue_mod_prime(z % p, p))
            .ok_or_else(|| Error::InvalidParameter("no pseudo-square found".into()))?;
        Ok(GmParams { p, q_prime, n, z })
    }

    /// All of `J₁(N)`, the units with Jacobi symbol +1, ascending.
    pub fn jacobi_one(&self) -> Vec<u64> {
        (1..self.n).filter(|&x| jacobi(x, self.n) == 1).collect()
    }
}

/// `z^m · r² mod N` for a given unit `r`.
pub fn gm_encrypt_with(params: &GmParams, m: u64, r: u64) -> Result<u64> {
    if m > 1 {
        return Err(Error::InvalidParameter(format!("message {m} is not a bit")));
    }
    if r == 0 || r >= params.n || gcd(r, params.n) != 1 {
        return Err(Error::InvalidParameter(format!("{r} is not a unit mod {}", params.n)));
    }
    let n = params.n as u128;
    let r2 = r as u128 * r as u128 % n;
    let zm = if m == 1 { params.z as u128 } else { 1 };
    Ok((zm * r2 % n) as u64)
}

/// Encryption with `r` drawn uniformly from the units, resampling non-units.
pub fn gm_encrypt(params: &GmParams, m: u64, rng: &mut dyn RngCore) -> Result<u64> {
    loop {
        let r = rng.gen_range(1..params.n);
        if gcd(r, params.n) == 1 {
            return gm_encrypt_with(params, m, r);
        }
    }
}

/// 0 iff `c` is a square modulo `p`.
pub fn gm_decrypt(params: &GmParams, c: u64) -> Result<u64> {
    if c >= params.n || gcd(c, params.n) != 1 {
        return Err(malformed(format!("{c} is not a unit mod {}", params.n)));
    }
    Ok(if is_residue_mod_prime(c % params.p, params.p) { 0 } else { 1 })
}

#[derive(Clone, Debug)]
pub struct GmScheme {
    params: GmParams,
    ciphertexts: Space,
}

impl GmScheme {
    pub fn new(params: GmParams) -> Self {
        let ciphertexts =
            Space::finite(format!("J1({})", params.n), params.jacobi_one().into_iter().map(Value::Int).collect());
        GmScheme { params, ciphertexts }
    }

    pub fn params(&self) -> &GmParams {
        &self.params
    }

    fn prime_bits(&self) -> usize {
        bit_width(self.params.p.max(self.params.q_prime) + 1)
    }

    fn secret(&self) -> SecretKey {
        SecretKey::new(Value::ints([self.params.p, self.params.q_prime]))
    }

    fn check_secret(&self, sk: &SecretKey) -> Result<()> {
        if *sk != self.secret() {
            return Err(malformed("secret key does not factor this modulus"));
        }
        Ok(())
    }
}

impl Scheme for GmScheme {
    fn name(&self) -> String {
        format!("gm(p={},q={})", self.params.p, self.params.q_prime)
    }

    fn plaintext_space(&self) -> Space {
        Space::range("Z2", 2)
    }

    fn ciphertext_space(&self) -> Space {
        self.ciphertexts.clone()
    }

    fn keygen(&self, _lambda: SecurityParameter, _rng: &mut dyn RngCore) -> Result<KeyPair> {
        Ok(KeyPair { sk: self.secret(), pk: PublicKey::new(Value::ints([self.params.n, self.params.z])) })
    }

    fn encrypt_value(&self, _pk: &PublicKey, m: &Value, rng: &mut dyn RngCore) -> Result<Value> {
        Ok(Value::Int(gm_encrypt(&self.params, m.as_int()?, rng)?))
    }

    fn decrypt_value(&self, sk: &SecretKey, c: &Value) -> Result<Value> {
        self.check_secret(sk)?;
        Ok(Value::Int(gm_decrypt(&self.params, c.as_int()?)?))
    }

    fn key_bits(&self) -> usize {
        2 * self.prime_bits()
    }

    fn secret_to_bits(&self, sk: &SecretKey) -> Result<Vec<bool>> {
        self.check_secret(sk)?;
        let w = self.prime_bits();
        let mut bits = Vec::with_capacity(2 * w);
        int_to_bits(self.params.p, w, &mut bits);
        int_to_bits(self.params.q_prime, w, &mut bits);
        Ok(bits)
    }

    fn secret_from_bits(&self, bits: &[bool]) -> Result<SecretKey> {
        let w = self.prime_bits();
        if bits.len() != 2 * w {
            return Err(malformed("bit string has the wrong length"));
        }
        let sk = SecretKey::new(Value::ints([bits_to_int(&bits[..w]), bits_to_int(&bits[w..])]));
        self.check_secret(&sk)?;
        Ok(sk)
    }

    fn public_from_secret(&self, sk: &SecretKey, _rng: &mut dyn RngCore) -> Result<PublicKey> {
        self.check_secret(sk)?;
        Ok(PublicKey::new(Value::ints([self.params.n, self.params.z])))
    }

    fn secret_keys(&self) -> Option<Vec<SecretKey>> {
        Some(vec![self.secret()])
    }

    fn ciphertext_bits(&self) -> Option<usize> {
        Some(bit_width(self.params.n))
    }

    fn ciphertext_to_bits(&self, c: &Value) -> Result<Vec<bool>> {
        self.ciphertexts.require(c)?;
        let mut bits = Vec::new();
        int_to_bits(c.as_int()?, bit_width(self.params.n), &mut bits);
        Ok(bits)
    }

    fn ciphertext_from_bits(&self, bits: &[bool]) -> Result<Value> {
        if bits.len() != bit_width(self.params.n) {
            return Err(malformed("bit string has the wrong length"));
        }
        let c = Value::Int(bits_to_int(bits));
        self.ciphertexts.require(&c)?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_matches_euler_for_primes() {
        for p in [3u64, 5, 7, 11, 13, 103] {
            for a in 1..p {
                let euler = if is_residue_mod_prime(a, p) { 1 } else { -1 };
                assert_eq!(jacobi(a, p), euler, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn toy_parameters() {
        let g = GmParams::new(3, 7).unwrap();
        assert_eq!(g.n, 21);
        assert_eq!(jacobi(g.z, 21), 1);
        assert!(!is_residue_mod_prime(g.z % 3, 3));
        assert_eq!(g.jacobi_one(), vec![1, 4, 5, 16, 17, 20]);
        assert_eq!(gm_encrypt_with(&g, 0, 1).unwrap(), 1);
        assert_eq!(gm_decrypt(&g, 1).unwrap(), 0);
        assert!(gm_encrypt_with(&g, 0, 7).is_err());
        assert!(GmParams::new(3, 3).is_err());
        assert!(GmParams::new(3, 9).is_err());
    }

    #[test]
    fn key_bits_are_six_for_toy() {
        let s = GmScheme::new(GmParams::new(3, 7).unwrap());
        assert_eq!(s.key_bits(), 6);
        assert_eq!(s.ciphertext_bits(), Some(5));
        let bits = s.secret_to_bits(&s.secret()).unwrap();
        assert_eq!(s.secret_from_bits(&bits).unwrap(), s.secret());
    }
}
