//! Leveled GSW bit encryption with gadget base 2.
//!
//! Symmetric variant with a binary secret `s ∈ {0,1}^n` and `q = 2^k`, so
//! all arithmetic is wrapping `u64` arithmetic under a mask. A ciphertext of
//! `μ` is `C = [A | A·s + e] + μ·G` with `N = (n+1)·ℓ` rows, `ℓ = k + 1`
//! gadget levels, and satisfies `C·t = e + μ·G·t` for `t = (−s, 1)`.
//! Multiplication is `G⁻¹(C₁)·C₂`.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{EvaluableClass, Homomorphic};
use crate::circuits::{arithmetize, BooleanCircuit, Ring};
use crate::error::{malformed, Error, Result};
use crate::scheme::{KeyPair, PublicKey, Scheme, SecretKey, SecurityParameter};
use crate::value::{Space, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GswParams {
    pub n: usize,
    pub log_q: u32,
    pub noise_bound: u64,
    pub depth_budget: usize,
}

impl GswParams {
    /// Parameters whose worst-case noise after `depth_budget` gate levels
    /// stays below `q/4`, which also gives `N^D · B < q/8`.
    pub fn new(n: usize, log_q: u32, noise_bound: u64, depth_budget: usize) -> Result<Self> {
        let p = GswParams { n, log_q, noise_bound, depth_budget };
        if n == 0 || n > 16 {
            return Err(Error::InvalidParameter(format!("dimension {n} outside 1..=16")));
        }
        if !(2..=62).contains(&log_q) {
            return Err(Error::InvalidParameter(format!("log q = {log_q} outside 2..=62")));
        }
        if !p.certifies(depth_budget) || !p.budget_bound_holds(depth_budget) {
            return Err(Error::InvalidParameter(format!(
                "q = 2^{log_q} cannot absorb depth {depth_budget} at noise bound {noise_bound} (N = {})",
                p.rows()
            )));
        }
        Ok(p)
    }

    /// Smallest modulus supporting the requested depth.
    pub fn for_depth(n: usize, noise_bound: u64, depth: usize) -> Result<Self> {
        (2..=62)
            .find_map(|k| GswParams::new(n, k, noise_bound, depth).ok())
            .ok_or_else(|| Error::InvalidParameter(format!("no q ≤ 2^62 supports depth {depth}")))
    }

    pub fn q(&self) -> u64 {
        1 << self.log_q
    }

    fn mask(&self) -> u64 {
        self.q() - 1
    }

    /// Gadget levels, `bitlen(q)`.
    pub fn ell(&self) -> usize {
        self.log_q as usize + 1
    }

    /// Rows `N` of a ciphertext matrix.
    pub fn rows(&self) -> usize {
        (self.n + 1) * self.ell()
    }

    pub fn cols(&self) -> usize {
        self.n + 1
    }

    /// Worst-case per-level noise growth: XOR costs `(N+4)(e_x+e_y)`, AND
    /// costs `N·e_y + e_x`.
    pub fn growth_factor(&self) -> u128 {
        2 * self.rows() as u128 + 8
    }

    /// Noise bound after `depth` levels from fresh inputs; `None` past
    /// `u128`.
    pub fn worst_case_noise(&self, depth: usize) -> Option<u128> {
        (0..depth).try_fold(self.noise_bound as u128, |acc, _| acc.checked_mul(self.growth_factor()))
    }

    /// Whether `depth` levels of evaluation decrypt correctly in the worst case.
    pub fn certifies(&self, depth: usize) -> bool {
        self.worst_case_noise(depth).is_some_and(|e| 4 * e < self.q() as u128)
    }

    fn budget_bound_holds(&self, depth: usize) -> bool {
        budget_product(self.rows() as u128, depth, self.noise_bound).is_some_and(|x| 8 * x < self.q() as u128)
    }

    pub fn ciphertext_bits(&self) -> u64 {
        (self.rows() * self.cols()) as u64 * self.log_q as u64
    }
}

fn budget_product(rows: u128, depth: usize, noise: u64) -> Option<u128> {
    (0..depth).try_fold(noise as u128, |acc, _| acc.checked_mul(rows))
}

/// Result of the `N^depth · B < q/8` test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BudgetCheck {
    pub depth: usize,
    pub ok: bool,
    /// Smallest power of two `q` passing the test at the same `N`, when the
    /// current one fails (absent when it would exceed 2^127).
    pub required_q: Option<u128>,
    pub required_log_q: Option<u32>,
}

pub fn noise_budget_check(params: &GswParams, circuit: &BooleanCircuit) -> BudgetCheck {
    let depth = circuit.depth();
    let product = budget_product(params.rows() as u128, depth, params.noise_bound);
    let ok = product.is_some_and(|x| 8 * x < params.q() as u128);
    if ok {
        return BudgetCheck { depth, ok, required_q: None, required_log_q: None };
    }
    let required_log_q = product.and_then(|x| (0..128u32).find(|&k| (1u128 << k) > x.saturating_mul(8)));
    BudgetCheck { depth, ok, required_q: required_log_q.map(|k| 1u128 << k), required_log_q }
}

/// Row-major `N × (n+1)` matrix over `Z_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GswCiphertext {
    entries: Vec<u64>,
}

impl GswCiphertext {
    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn to_value(&self, params: &GswParams) -> Value {
        Value::List(self.entries.chunks(params.cols()).map(|r| Value::ints(r.iter().copied())).collect())
    }

    pub fn from_value(params: &GswParams, v: &Value) -> Result<Self> {
        let rows = v.as_tuple(params.rows())?;
        let mut entries = Vec::with_capacity(params.rows() * params.cols());
        for r in rows {
            let row = r.as_tuple(params.cols())?;
            for x in row {
                let x = x.as_int()?;
                if x >= params.q() {
                    return Err(malformed("GSW entry out of range"));
                }
                entries.push(x);
            }
        }
        Ok(GswCiphertext { entries })
    }
}

/// `μ·G` with no mask and no noise.
pub fn trivial_encryption(params: &GswParams, mu: u64) -> GswCiphertext {
    let (cols, ell) = (params.cols(), params.ell());
    let mut entries = vec![0u64; params.rows() * cols];
    for j in 0..cols {
        for b in 0..ell {
            let r = j * ell + b;
            entries[r * cols + j] = mu.wrapping_shl(b as u32) & params.mask();
        }
    }
    GswCiphertext { entries }
}

fn check_secret(params: &GswParams, s: &[u64]) -> Result<()> {
    if s.len() != params.n || s.iter().any(|&x| x > 1) {
        return Err(malformed("GSW secrets are binary vectors of length n"));
    }
    Ok(())
}

pub fn gsw_encrypt(params: &GswParams, s: &[u64], mu: u64, rng: &mut dyn RngCore) -> Result<GswCiphertext> {
    check_secret(params, s)?;
    let mut c = trivial_encryption(params, mu);
    let (n, cols) = (params.n, params.cols());
    let bound = params.noise_bound as i64;
    for row in c.entries.chunks_mut(cols) {
        let mut dot = 0u64;
        for j in 0..n {
            let a = rng.gen_range(0..params.q());
            row[j] = row[j].wrapping_add(a) & params.mask();
            if s[j] == 1 {
                dot = dot.wrapping_add(a);
            }
        }
        let e = rng.gen_range(-bound..=bound);
        row[n] = row[n].wrapping_add(dot).wrapping_add(e as u64) & params.mask();
    }
    Ok(c)
}

fn centered(params: &GswParams, x: u64) -> i64 {
    let x = x & params.mask();
    if 2 * x > params.q() {
        x as i64 - params.q() as i64
    } else {
        x as i64
    }
}

fn row_phase(params: &GswParams, s: &[u64], row: &[u64]) -> u64 {
    let n = params.n;
    let dot = (0..n).filter(|&j| s[j] == 1).fold(0u64, |acc, j| acc.wrapping_add(row[j]));
    row[n].wrapping_sub(dot) & params.mask()
}

/// Threshold decryption on the row carrying `q/2` in the last column.
pub fn gsw_decrypt(params: &GswParams, s: &[u64], c: &GswCiphertext) -> Result<u64> {
    check_secret(params, s)?;
    let r = params.n * params.ell() + params.log_q as usize - 1;
    let cols = params.cols();
    let v = centered(params, row_phase(params, s, &c.entries[r * cols..(r + 1) * cols]));
    Ok(if 4 * (v as i128).abs() < params.q() as i128 { 0 } else { 1 })
}

/// Largest centered deviation of `C·t` from `μ·G·t` over all rows.
pub fn gsw_noise(params: &GswParams, s: &[u64], c: &GswCiphertext, mu: u64) -> Result<u64> {
    check_secret(params, s)?;
    let (cols, ell) = (params.cols(), params.ell());
    let mut worst = 0u64;
    for (r, row) in c.entries.chunks(cols).enumerate() {
        let (j, b) = (r / ell, r % ell);
        let gadget = mu.wrapping_shl(b as u32);
        let expected = if j == params.n {
            gadget
        } else if s[j] == 1 {
            gadget.wrapping_neg()
        } else {
            0
        };
        let dev = centered(params, row_phase(params, s, row).wrapping_sub(expected));
        worst = worst.max(dev.unsigned_abs());
    }
    Ok(worst)
}

/// Ciphertext matrices under addition and gadget multiplication.
pub struct GswRing<'a> {
    params: &'a GswParams,
}

impl<'a> GswRing<'a> {
    pub fn new(params: &'a GswParams) -> Self {
        GswRing { params }
    }
}

impl Ring for GswRing<'_> {
    type Elem = GswCiphertext;

    fn zero(&self) -> GswCiphertext {
        trivial_encryption(self.params, 0)
    }

    fn one(&self) -> GswCiphertext {
        trivial_encryption(self.params, 1)
    }

    fn add(&self, a: &GswCiphertext, b: &GswCiphertext) -> GswCiphertext {
        let mask = self.params.mask();
        let entries = a.entries.iter().zip(&b.entries).map(|(x, y)| x.wrapping_add(*y) & mask).collect();
        GswCiphertext { entries }
    }

    fn neg(&self, a: &GswCiphertext) -> GswCiphertext {
        let mask = self.params.mask();
        GswCiphertext { entries: a.entries.iter().map(|x| x.wrapping_neg() & mask).collect() }
    }

    fn mul(&self, a: &GswCiphertext, b: &GswCiphertext) -> GswCiphertext {
        let (cols, ell, mask) = (self.params.cols(), self.params.ell(), self.params.mask());
        let mut out = vec![0u64; a.entries.len()];
        for (arow, orow) in a.entries.chunks(cols).zip(out.chunks_mut(cols)) {
            for (j, &x) in arow.iter().enumerate() {
                let mut bits = x;
                while bits != 0 {
                    let r = j * ell + bits.trailing_zeros() as usize;
                    for (o, y) in orow.iter_mut().zip(&b.entries[r * cols..(r + 1) * cols]) {
                        *o = o.wrapping_add(*y);
                    }
                    bits &= bits - 1;
                }
            }
            orow.iter_mut().for_each(|o| *o &= mask);
        }
        GswCiphertext { entries: out }
    }
}

#[derive(Clone, Debug)]
pub struct GswScheme {
    params: GswParams,
}

impl GswScheme {
    pub fn new(params: GswParams) -> Self {
        GswScheme { params }
    }

    pub fn params(&self) -> &GswParams {
        &self.params
    }

    fn secret(&self, sk: &SecretKey) -> Result<Vec<u64>> {
        let s = sk.value().as_ints()?;
        check_secret(&self.params, &s)?;
        Ok(s)
    }
}

impl Scheme for GswScheme {
    fn name(&self) -> String {
        let p = &self.params;
        format!("gsw(n={},q=2^{},B={},D={})", p.n, p.log_q, p.noise_bound, p.depth_budget)
    }

    fn plaintext_space(&self) -> Space {
        Space::range("Z2", 2)
    }

    fn ciphertext_space(&self) -> Space {
        let p = &self.params;
        let entry = Space::range(format!("Z{}", p.q()), p.q());
        let row = Space::power(format!("Z{}^{}", p.q(), p.cols()), &entry, p.cols());
        Space::power(format!("Z{}^({}x{})", p.q(), p.rows(), p.cols()), &row, p.rows())
    }

    fn keygen(&self, _lambda: SecurityParameter, rng: &mut dyn RngCore) -> Result<KeyPair> {
        let s: Vec<u64> = (0..self.params.n).map(|_| rng.gen_range(0..2)).collect();
        let sk = SecretKey::new(Value::ints(s));
        Ok(KeyPair { pk: PublicKey::sealed(sk.clone()), sk })
    }

    fn encrypt_value(&self, pk: &PublicKey, m: &Value, rng: &mut dyn RngCore) -> Result<Value> {
        let s = self.secret(pk.oracle_secret()?)?;
        Ok(gsw_encrypt(&self.params, &s, m.as_int()?, rng)?.to_value(&self.params))
    }

    fn decrypt_value(&self, sk: &SecretKey, c: &Value) -> Result<Value> {
        let s = self.secret(sk)?;
        let c = GswCiphertext::from_value(&self.params, c)?;
        Ok(Value::Int(gsw_decrypt(&self.params, &s, &c)?))
    }

    fn key_bits(&self) -> usize {
        self.params.n
    }

    fn secret_to_bits(&self, sk: &SecretKey) -> Result<Vec<bool>> {
        Ok(self.secret(sk)?.into_iter().map(|x| x == 1).collect())
    }

    fn secret_from_bits(&self, bits: &[bool]) -> Result<SecretKey> {
        if bits.len() != self.params.n {
            return Err(malformed("bit string has the wrong length"));
        }
        Ok(SecretKey::new(Value::ints(bits.iter().map(|&b| b as u64))))
    }

    fn public_from_secret(&self, sk: &SecretKey, _rng: &mut dyn RngCore) -> Result<PublicKey> {
        self.secret(sk)?;
        Ok(PublicKey::sealed(sk.clone()))
    }

    fn secret_keys(&self) -> Option<Vec<SecretKey>> {
        let n = self.params.n;
        Some((0..1u64 << n).map(|x| SecretKey::new(Value::ints((0..n).map(|i| (x >> (n - 1 - i)) & 1)))).collect())
    }
}

impl Homomorphic for GswScheme {
    fn evaluable_class(&self) -> EvaluableClass {
        EvaluableClass::DepthAtMost(self.params.depth_budget)
    }

    fn eval_values(
        &self,
        _evk: &Value,
        circuit: &BooleanCircuit,
        inputs: &[Value],
        _rng: &mut dyn RngCore,
    ) -> Result<Vec<Value>> {
        self.check_class(circuit)?;
        if inputs.len() != circuit.arity() {
            return Err(Error::ArityMismatch { expected: circuit.arity(), found: inputs.len() });
        }
        let cts = inputs.iter().map(|v| GswCiphertext::from_value(&self.params, v)).collect::<Result<Vec<_>>>()?;
        let ring = GswRing::new(&self.params);
        let out = arithmetize(circuit).evaluate(&ring, &cts)?;
        Ok(out.iter().map(|c| c.to_value(&self.params)).collect())
    }

    fn compact_bound(&self) -> Option<u64> {
        Some(self.params.ciphertext_bits())
    }

    fn serialized_bits(&self, c: &Value) -> u64 {
        let mut ints = Vec::new();
        c.flatten_ints(&mut ints);
        ints.len() as u64 * self.params.log_q as u64
    }
}
