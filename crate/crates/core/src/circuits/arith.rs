//! Lifting boolean circuits to a ring: XOR becomes `2(x+y) − (x+y)²`, AND
//! becomes `x·y`, and each output is wrapped in an equality test against 1.

use serde::Serialize;

use super::circuit::{BooleanCircuit, Gate};
use crate::error::{Error, Result};

/// A commutative ring with unit.
pub trait Ring {
    type Elem: Clone;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

/// Rings whose elements can be compared directly. Only plaintext rings
/// qualify; ciphertexts admit no such test.
pub trait RingEq: Ring {
    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
}

/// `x ⊕ y = 2(x+y) − (x+y)²`.
pub fn oplus<R: Ring>(ring: &R, x: &R::Elem, y: &R::Elem) -> R::Elem {
    let s = ring.add(x, y);
    let twice = ring.add(&s, &s);
    let square = ring.mul(&s, &s);
    ring.sub(&twice, &square)
}

/// `x ⊗ y = x·y`.
pub fn otimes<R: Ring>(ring: &R, x: &R::Elem, y: &R::Elem) -> R::Elem {
    ring.mul(x, y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RingNode {
    Input(usize),
    Const(bool),
    Oplus(usize, usize),
    Otimes(usize, usize),
}

/// Node `i` corresponds to wire `i` of the source circuit; outputs are
/// equality-test terminals over the listed nodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RingCircuit {
    arity: usize,
    nodes: Vec<RingNode>,
    equality_tests: Vec<usize>,
}

pub fn arithmetize(c: &BooleanCircuit) -> RingCircuit {
    let mut nodes: Vec<RingNode> = (0..c.arity()).map(RingNode::Input).collect();
    nodes.extend(c.gates().iter().map(|g| match *g {
        Gate::Xor(a, b) => RingNode::Oplus(a, b),
        Gate::And(a, b) => RingNode::Otimes(a, b),
        Gate::Const(bit) => RingNode::Const(bit),
    }));
    RingCircuit { arity: c.arity(), nodes, equality_tests: c.outputs().to_vec() }
}

impl RingCircuit {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn nodes(&self) -> &[RingNode] {
        &self.nodes
    }

    pub fn equality_tests(&self) -> &[usize] {
        &self.equality_tests
    }

    /// Values `g̃_i` feeding the equality tests. On inputs in {0, 1} these
    /// are already in {0, 1}, so the tests reduce to the identity wire; this
    /// is how the circuit is evaluated over ciphertexts.
    pub fn evaluate<R: Ring>(&self, ring: &R, inputs: &[R::Elem]) -> Result<Vec<R::Elem>> {
        if inputs.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: inputs.len() });
        }
        let mut vals: Vec<R::Elem> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match *node {
                RingNode::Input(i) => inputs[i].clone(),
                RingNode::Const(true) => ring.one(),
                RingNode::Const(false) => ring.zero(),
                RingNode::Oplus(a, b) => oplus(ring, &vals[a], &vals[b]),
                RingNode::Otimes(a, b) => otimes(ring, &vals[a], &vals[b]),
            };
            vals.push(v);
        }
        Ok(self.equality_tests.iter().map(|&o| vals[o].clone()).collect())
    }

    /// Runs the equality tests `[g̃_i = 1]` literally.
    pub fn decide<R: RingEq>(&self, ring: &R, inputs: &[R::Elem]) -> Result<Vec<bool>> {
        let one = ring.one();
        Ok(self.evaluate(ring, inputs)?.iter().map(|v| ring.equal(v, &one)).collect())
    }
}

/// Integers modulo `modulus` (at most 2^64).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModRing {
    modulus: u128,
}

impl ModRing {
    pub fn new(modulus: u128) -> Result<Self> {
        if !(2..=1u128 << 64).contains(&modulus) {
            return Err(Error::InvalidParameter(format!("ring modulus {modulus} out of range")));
        }
        Ok(ModRing { modulus })
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    pub fn embed(&self, bit: bool) -> u128 {
        bit as u128
    }
}

impl Ring for ModRing {
    type Elem = u128;

    fn zero(&self) -> u128 {
        0
    }

    fn one(&self) -> u128 {
        1
    }

    fn add(&self, a: &u128, b: &u128) -> u128 {
        (a + b) % self.modulus
    }

    fn neg(&self, a: &u128) -> u128 {
        (self.modulus - a % self.modulus) % self.modulus
    }

    fn mul(&self, a: &u128, b: &u128) -> u128 {
        // Operands are below 2^64, so the product fits.
        (a * b) % self.modulus
    }
}

impl RingEq for ModRing {
    fn equal(&self, a: &u128, b: &u128) -> bool {
        a % self.modulus == b % self.modulus
    }
}

/// One of the eight operation-table equations of the two-element field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldEquation {
    pub equation: String,
    pub holds: bool,
}

/// Checks that {0, 1} is closed under ⊕ and ⊗ with the operation tables of
/// GF(2).
pub fn two_element_field_equations<R: RingEq>(ring: &R) -> Vec<FieldEquation> {
    let elems = [ring.zero(), ring.one()];
    let mut out = Vec::with_capacity(8);
    for (op, sym) in [(0, "⊕"), (1, "⊗")] {
        for a in 0..2usize {
            for b in 0..2usize {
                let got = if op == 0 { oplus(ring, &elems[a], &elems[b]) } else { otimes(ring, &elems[a], &elems[b]) };
                let want = if op == 0 { a ^ b } else { a & b };
                out.push(FieldEquation {
                    equation: format!("{a}{sym}{b}={want}"),
                    holds: ring.equal(&got, &elems[want]),
                });
            }
        }
    }
    out
}
