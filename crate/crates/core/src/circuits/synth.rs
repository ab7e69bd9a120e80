//! Truth-table logic synthesis and decryption-circuit compilation.
//!
//! Functions are expanded on their highest-index input first, so when the
//! trailing inputs are later fixed by `partial_apply` the top multiplexers
//! fold away and only the sub-circuit on the leading inputs survives.

use std::collections::HashMap;

use super::circuit::{BooleanCircuit, CircuitBuilder};
use crate::bridges::iota::{message_bits, Iota};
use crate::error::{Error, Result};
use crate::scheme::{SchemeRef, SecretKey};
use crate::value::Value;

/// Widest function [`synthesize`] accepts.
pub const MAX_SYNTH_INPUTS: usize = 20;

/// Widest (key bits + ciphertext bits) decryption circuit compiled in full.
pub const MAX_COMPILE_WIRES: usize = 16;

/// Depth bound of circuits synthesized on `inputs` variables: one level
/// for the first variable and two per multiplexer after it.
pub fn recryption_depth_bound(inputs: usize) -> usize {
    if inputs == 0 {
        0
    } else {
        2 * inputs - 1
    }
}

fn blocks(arity: usize) -> usize {
    ((1u64 << arity).div_ceil(64)) as usize
}

fn mask(bits: u64) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

struct Shannon {
    builder: CircuitBuilder,
    memo: HashMap<(usize, Vec<u64>), usize>,
}

impl Shannon {
    fn build(&mut self, vars: usize, table: &[u64]) -> usize {
        let rows = 1u64 << vars;
        let full = if rows >= 64 { u64::MAX } else { mask(rows) };
        if table.iter().all(|&w| w == 0) {
            return self.builder.constant(false);
        }
        if table.iter().all(|&w| w == full) {
            return self.builder.constant(true);
        }
        let key = (vars, table.to_vec());
        if let Some(&w) = self.memo.get(&key) {
            return w;
        }
        let half = rows / 2;
        let (lo, hi): (Vec<u64>, Vec<u64>) = if half >= 64 {
            let mid = table.len() / 2;
            (table[..mid].to_vec(), table[mid..].to_vec())
        } else {
            (vec![table[0] & mask(half)], vec![(table[0] >> half) & mask(half)])
        };
        let wire = if lo == hi {
            self.build(vars - 1, &lo)
        } else {
            let l = self.build(vars - 1, &lo);
            let h = self.build(vars - 1, &hi);
            let sel = self.builder.input(vars - 1);
            self.builder.mux(sel, l, h)
        };
        self.memo.insert(key, wire);
        wire
    }
}

/// Circuit computing the given truth tables (one bitset per output, bit `x`
/// holding the value on the assignment whose input `i` is bit `i` of `x`).
pub fn synthesize(arity: usize, tables: &[Vec<u64>]) -> Result<BooleanCircuit> {
    if arity > MAX_SYNTH_INPUTS {
        return Err(Error::InvalidParameter(format!("cannot synthesize {arity}-input functions")));
    }
    if tables.is_empty() {
        return Err(Error::InvalidParameter("function has no outputs".into()));
    }
    let words = blocks(arity);
    let rows = 1u64 << arity;
    let mut s = Shannon { builder: CircuitBuilder::new(arity), memo: HashMap::new() };
    let mut outs = Vec::with_capacity(tables.len());
    for t in tables {
        if t.len() != words {
            return Err(Error::InvalidParameter("truth table has the wrong size".into()));
        }
        let mut t = t.clone();
        if rows < 64 {
            t[0] &= mask(rows);
        }
        outs.push(s.build(arity, &t));
    }
    Ok(s.builder.finish(&outs))
}

fn set_bit(table: &mut [u64], index: u64) {
    table[(index / 64) as usize] |= 1 << (index % 64);
}

fn all_secret_keys(scheme: &SchemeRef) -> Vec<Option<SecretKey>> {
    let e = scheme.key_bits();
    (0..1u64 << e)
        .map(|x| {
            let bits: Vec<bool> = (0..e).map(|i| (x >> i) & 1 == 1).collect();
            scheme.secret_from_bits(&bits).ok()
        })
        .collect()
}

fn output_width(iota: &Iota) -> Result<usize> {
    let sample = iota.codomain().element(0)?;
    Ok(message_bits(&sample)?.len())
}

fn decrypt_bits(scheme: &SchemeRef, iota: &Iota, sk: &SecretKey, c: &Value) -> Option<Vec<bool>> {
    let m = scheme.decrypt_value(sk, c).ok()?;
    message_bits(&iota.apply_value(&m).ok()?).ok()
}

/// Circuit on `(key bits, ciphertext bits)` computing `ι(Dec(sk, c))` for
/// every key and ciphertext. Bit strings encoding no key or no ciphertext
/// are don't-cares and map to 0.
pub fn compile_decryption_circuit(scheme: &SchemeRef, iota: &Iota) -> Result<BooleanCircuit> {
    let e = scheme.key_bits();
    let nb = scheme
        .ciphertext_bits()
        .ok_or_else(|| Error::NonEnumerableSpace(scheme.ciphertext_space().name().to_string()))?;
    let arity = e + nb;
    if arity > MAX_COMPILE_WIRES {
        return Err(Error::InvalidParameter(format!(
            "decryption circuit would have {arity} inputs (limit {MAX_COMPILE_WIRES})"
        )));
    }
    let width = output_width(iota)?;
    let keys = all_secret_keys(scheme);
    let mut tables = vec![vec![0u64; blocks(arity)]; width];
    for ct in 0..1u64 << nb {
        let bits: Vec<bool> = (0..nb).map(|i| (ct >> i) & 1 == 1).collect();
        let Ok(c) = scheme.ciphertext_from_bits(&bits) else { continue };
        for (k, sk) in keys.iter().enumerate() {
            let Some(sk) = sk else { continue };
            let Some(out) = decrypt_bits(scheme, iota, sk, &c) else { continue };
            let row = k as u64 | (ct << e);
            for (t, _) in tables.iter_mut().zip(&out).filter(|(_, &b)| b) {
                set_bit(t, row);
            }
        }
    }
    synthesize(arity, &tables)
}

/// Circuit on the key bits alone computing `sk ↦ ι(Dec(sk, c))` for one
/// fixed ciphertext. Semantically equal to fixing the ciphertext inputs of
/// [`compile_decryption_circuit`], but does not need a ciphertext bit
/// encoding, so it also serves schemes with huge ciphertext spaces.
pub fn decryption_function_circuit(scheme: &SchemeRef, iota: &Iota, c: &Value) -> Result<BooleanCircuit> {
    let e = scheme.key_bits();
    if e > MAX_SYNTH_INPUTS {
        return Err(Error::InvalidParameter(format!("{e}-bit keys are too long to synthesize over")));
    }
    let width = output_width(iota)?;
    let mut tables = vec![vec![0u64; blocks(e)]; width];
    for (k, sk) in all_secret_keys(scheme).iter().enumerate() {
        let Some(sk) = sk else { continue };
        let Some(out) = decrypt_bits(scheme, iota, sk, c) else { continue };
        for (t, _) in tables.iter_mut().zip(&out).filter(|(_, &b)| b) {
            set_bit(t, k as u64);
        }
    }
    synthesize(e, &tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::circuit::random_circuit;
    use crate::rng::stream;

    #[test]
    fn synthesis_reproduces_truth_tables() {
        let mut rng = stream(11, 0);
        for arity in [0usize, 1, 2, 5, 6, 7, 9] {
            for _ in 0..5 {
                let c = random_circuit(arity, 15, 3, &mut rng);
                let t = c.truth_table().unwrap();
                let s = synthesize(arity, &t).unwrap();
                assert_eq!(s.truth_table().unwrap(), t, "arity {arity}");
            }
        }
    }

    #[test]
    fn constant_and_projection_functions_stay_small() {
        let zero = synthesize(3, &[vec![0]]).unwrap();
        assert_eq!(zero.eval(&[true, true, true]).unwrap(), vec![false]);
        let proj = synthesize(3, &[vec![0b1111_0000]]).unwrap();
        assert!(proj.gates().is_empty());
        assert_eq!(proj.outputs(), &[2]);
    }
}
