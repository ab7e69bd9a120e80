use rand::RngCore;

use super::{EvaluableClass, Homomorphic};
use crate::circuits::BooleanCircuit;
use crate::error::{malformed, Result};
use crate::scheme::{KeyPair, PublicKey, Scheme, SecretKey, SecurityParameter};
use crate::value::{Space, Value};

/// Identity "encryption" of bits: ciphertext = plaintext, evaluation =
/// plaintext evaluation. Insecure; exists to exercise the framework
/// exhaustively.
#[derive(Clone, Copy, Debug, Default)]
pub struct TrivialFhe;

impl Scheme for TrivialFhe {
    fn name(&self) -> String {
        "trivial".into()
    }

    fn plaintext_space(&self) -> Space {
        Space::range("Z2", 2)
    }

    fn ciphertext_space(&self) -> Space {
        Space::range("Z2", 2)
    }

    fn keygen(&self, _lambda: SecurityParameter, _rng: &mut dyn RngCore) -> Result<KeyPair> {
        Ok(KeyPair { sk: SecretKey::new(Value::empty()), pk: PublicKey::new(Value::empty()) })
    }

    fn encrypt_value(&self, _pk: &PublicKey, m: &Value, _rng: &mut dyn RngCore) -> Result<Value> {
        Ok(m.clone())
    }

    fn decrypt_value(&self, _sk: &SecretKey, c: &Value) -> Result<Value> {
        Ok(c.clone())
    }

    fn key_bits(&self) -> usize {
        0
    }

    fn secret_to_bits(&self, _sk: &SecretKey) -> Result<Vec<bool>> {
        Ok(Vec::new())
    }

    fn secret_from_bits(&self, bits: &[bool]) -> Result<SecretKey> {
        if !bits.is_empty() {
            return Err(malformed("trivial keys have no bits"));
        }
        Ok(SecretKey::new(Value::empty()))
    }

    fn public_from_secret(&self, _sk: &SecretKey, _rng: &mut dyn RngCore) -> Result<PublicKey> {
        Ok(PublicKey::new(Value::empty()))
    }

    fn secret_keys(&self) -> Option<Vec<SecretKey>> {
        Some(vec![SecretKey::new(Value::empty())])
    }

    fn ciphertext_bits(&self) -> Option<usize> {
        Some(1)
    }

    fn ciphertext_to_bits(&self, c: &Value) -> Result<Vec<bool>> {
        Ok(vec![c.as_bit()?])
    }

    fn ciphertext_from_bits(&self, bits: &[bool]) -> Result<Value> {
        match bits {
            [b] => Ok(Value::bit(*b)),
            _ => Err(malformed("trivial ciphertexts are single bits")),
        }
    }
}

impl Homomorphic for TrivialFhe {
    fn evaluable_class(&self) -> EvaluableClass {
        EvaluableClass::All
    }

    fn eval_values(
        &self,
        _evk: &Value,
        circuit: &BooleanCircuit,
        inputs: &[Value],
        _rng: &mut dyn RngCore,
    ) -> Result<Vec<Value>> {
        let bits = inputs.iter().map(Value::as_bit).collect::<Result<Vec<_>>>()?;
        Ok(circuit.eval(&bits)?.into_iter().map(Value::bit).collect())
    }

    fn compact_bound(&self) -> Option<u64> {
        Some(1)
    }

    fn serialized_bits(&self, _c: &Value) -> u64 {
        1
    }
}
