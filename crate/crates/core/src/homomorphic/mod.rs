//! Homomorphic schemes: the evaluation contract, an identity backend and a
//! leveled GSW backend.

pub mod gsw;
pub mod trivial;

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use rand::RngCore;
use serde::Serialize;

use crate::circuits::BooleanCircuit;
use crate::error::{Error, Result};
use crate::rng;
use crate::scheme::{Ciphertext, PublicKey, Scheme, SchemeRef, SecurityParameter};
use crate::value::Value;

pub use gsw::{noise_budget_check, BudgetCheck, GswCiphertext, GswParams, GswScheme};
pub use trivial::TrivialFhe;

/// Circuits a backend promises to evaluate correctly on fresh inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvaluableClass {
    All,
    DepthAtMost(usize),
}

impl EvaluableClass {
    pub fn admits(&self, circuit: &BooleanCircuit) -> bool {
        match *self {
            EvaluableClass::All => true,
            EvaluableClass::DepthAtMost(d) => circuit.depth() <= d,
        }
    }
}

pub trait Homomorphic: Scheme {
    fn evaluable_class(&self) -> EvaluableClass;

    /// One output ciphertext per circuit output. Inputs are raw ciphertext
    /// values of this scheme; `evk` is the public evaluation key.
    fn eval_values(
        &self,
        evk: &Value,
        circuit: &BooleanCircuit,
        inputs: &[Value],
        rng: &mut dyn RngCore,
    ) -> Result<Vec<Value>>;

    /// Upper bound on the serialized size of any `eval` output, in bits.
    fn compact_bound(&self) -> Option<u64>;

    /// Serialized size of one ciphertext, in bits.
    fn serialized_bits(&self, c: &Value) -> u64;

    fn check_class(&self, circuit: &BooleanCircuit) -> Result<()> {
        let class = self.evaluable_class();
        if class.admits(circuit) {
            Ok(())
        } else {
            Err(Error::CircuitOutOfClass(format!("depth {} exceeds {:?} of {}", circuit.depth(), class, self.name())))
        }
    }
}

/// Shared handle to a homomorphic scheme.
#[derive(Clone)]
pub struct HomSchemeRef(Arc<dyn Homomorphic>);

impl fmt::Debug for HomSchemeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HomScheme({})", self.0.name())
    }
}

impl Deref for HomSchemeRef {
    type Target = dyn Homomorphic;

    fn deref(&self) -> &Self::Target {
        &*self.0
    }
}

impl HomSchemeRef {
    pub fn new<H: Homomorphic + 'static>(h: H) -> Self {
        HomSchemeRef(Arc::new(h))
    }

    pub fn scheme(&self) -> SchemeRef {
        let base: Arc<dyn Scheme> = self.0.clone();
        SchemeRef::from_arc(base)
    }

    /// Tag-checked evaluation.
    pub fn eval(
        &self,
        pk: &PublicKey,
        circuit: &BooleanCircuit,
        inputs: &[Ciphertext],
        rng: &mut dyn RngCore,
    ) -> Result<Vec<Ciphertext>> {
        if inputs.len() != circuit.arity() {
            return Err(Error::ArityMismatch { expected: circuit.arity(), found: inputs.len() });
        }
        let scheme = self.scheme();
        for c in inputs {
            scheme.check_ciphertext(c)?;
        }
        let raw: Vec<Value> = inputs.iter().map(|c| c.value().clone()).collect();
        let out = self.eval_values(&pk.evk, circuit, &raw, rng)?;
        let tag = self.ciphertext_tag();
        Ok(out.into_iter().map(|v| Ciphertext::new(tag.clone(), v)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompactnessReport {
    pub scheme: String,
    pub circuits: usize,
    pub compact_bound: Option<u64>,
    pub max_output_bits: u64,
    pub compact: bool,
}

/// Evaluates each circuit on fresh encryptions of random inputs and checks
/// every output against the declared bound.
pub fn compactness_check(h: &HomSchemeRef, circuits: &[BooleanCircuit], seed: u64) -> Result<CompactnessReport> {
    let scheme = h.scheme();
    let mut max_bits = 0;
    for (i, c) in circuits.iter().enumerate() {
        let mut rng = rng::stream(seed, i as u64);
        let keys = scheme.keygen(SecurityParameter::default(), &mut rng)?;
        let inputs = (0..c.arity())
            .map(|_| {
                let m = scheme.sample_message(&mut rng);
                scheme.encrypt(&keys.pk, &m, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        for out in h.eval(&keys.pk, c, &inputs, &mut rng)? {
            max_bits = max_bits.max(h.serialized_bits(out.value()));
        }
    }
    let bound = h.compact_bound();
    Ok(CompactnessReport {
        scheme: h.name(),
        circuits: circuits.len(),
        compact_bound: bound,
        max_output_bits: max_bits,
        compact: bound.is_some_and(|b| max_bits <= b),
    })
}
