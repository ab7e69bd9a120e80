//! Untyped values and finite-set descriptors.
//!
//! Keys, messages and ciphertexts of every scheme are trees of non-negative
//! integers. Their canonical JSON form is nested arrays of base-10 integers.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{malformed, Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(u64),
    List(Vec<Value>),
}

impl Value {
    pub fn empty() -> Value {
        Value::List(Vec::new())
    }

    pub fn bit(b: bool) -> Value {
        Value::Int(b as u64)
    }

    pub fn ints<I: IntoIterator<Item = u64>>(items: I) -> Value {
        Value::List(items.into_iter().map(Value::Int).collect())
    }

    pub fn bits<I: IntoIterator<Item = bool>>(items: I) -> Value {
        Value::List(items.into_iter().map(Value::bit).collect())
    }

    pub fn as_int(&self) -> Result<u64> {
        match self {
            Value::Int(v) => Ok(*v),
            Value::List(_) => Err(malformed(format!("expected integer, found {self}"))),
        }
    }

    pub fn as_bit(&self) -> Result<bool> {
        match self {
            Value::Int(0) => Ok(false),
            Value::Int(1) => Ok(true),
            _ => Err(malformed(format!("expected bit, found {self}"))),
        }
    }

    pub fn as_list(&self) -> Result<&[Value]> {
        match self {
            Value::List(items) => Ok(items),
            Value::Int(_) => Err(malformed(format!("expected list, found {self}"))),
        }
    }

    /// List of exactly `n` entries.
    pub fn as_tuple(&self, n: usize) -> Result<&[Value]> {
        let items = self.as_list()?;
        if items.len() != n {
            return Err(malformed(format!("expected {n}-tuple, found {self}")));
        }
        Ok(items)
    }

    pub fn as_ints(&self) -> Result<Vec<u64>> {
        self.as_list()?.iter().map(Value::as_int).collect()
    }

    pub fn as_bits(&self) -> Result<Vec<bool>> {
        self.as_list()?.iter().map(Value::as_bit).collect()
    }

    /// Canonical JSON text.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("values always serialize")
    }

    pub fn from_json(text: &str) -> Result<Value> {
        serde_json::from_str(text).map_err(|e| malformed(e.to_string()))
    }

    /// Structural shape: integers collapse to a single marker.
    pub fn shape(&self) -> String {
        match self {
            Value::Int(_) => "i".into(),
            Value::List(items) => {
                let inner: Vec<String> = items.iter().map(Value::shape).collect();
                format!("[{}]", inner.join(","))
            }
        }
    }

    /// First integer in depth-first order, if any.
    pub fn first_int(&self) -> Option<u64> {
        match self {
            Value::Int(v) => Some(*v),
            Value::List(items) => items.iter().find_map(Value::first_int),
        }
    }

    /// All integers in depth-first order.
    pub fn flatten_ints(&self, out: &mut Vec<u64>) {
        match self {
            Value::Int(v) => out.push(*v),
            Value::List(items) => items.iter().for_each(|v| v.flatten_ints(out)),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::bit(b)
    }
}

impl From<Vec<Value>> for Value {
    fn from(items: Vec<Value>) -> Self {
        Value::List(items)
    }
}

/// Bit width needed to write any integer in `0..bound`.
pub fn bit_width(bound: u64) -> usize {
    if bound <= 1 {
        0
    } else {
        (64 - (bound - 1).leading_zeros()) as usize
    }
}

/// Little-endian bits of `v`, exactly `width` of them.
pub fn int_to_bits(v: u64, width: usize, out: &mut Vec<bool>) {
    for i in 0..width {
        out.push(i < 64 && (v >> i) & 1 == 1);
    }
}

/// Inverse of [`int_to_bits`].
pub fn bits_to_int(bits: &[bool]) -> u64 {
    bits.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
}

type Sampler = Arc<dyn Fn(&mut dyn RngCore) -> Value + Send + Sync>;
type Membership = Arc<dyn Fn(&Value) -> bool + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Range(u64),
    Finite(Arc<Vec<Value>>),
    Product(Vec<Space>),
    Samplable { sampler: Sampler, member: Membership },
}

/// How a space may be traversed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceMode {
    Enumerable,
    ProductOfEnumerables,
    SamplableOnly,
}

/// A finite set with a name that doubles as the tag of its elements.
#[derive(Clone)]
pub struct Space {
    name: Arc<str>,
    kind: Kind,
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Space({})", self.name)
    }
}

impl Space {
    /// `{0, …, modulus-1}` as integers.
    pub fn range(name: impl Into<String>, modulus: u64) -> Space {
        Space { name: name.into().into(), kind: Kind::Range(modulus) }
    }

    /// Explicit element list; stored sorted and deduplicated.
    pub fn finite(name: impl Into<String>, mut elements: Vec<Value>) -> Space {
        elements.sort();
        elements.dedup();
        Space { name: name.into().into(), kind: Kind::Finite(Arc::new(elements)) }
    }

    /// Cartesian product; elements are lists with one entry per factor.
    pub fn product(name: impl Into<String>, factors: Vec<Space>) -> Space {
        Space { name: name.into().into(), kind: Kind::Product(factors) }
    }

    pub fn power(name: impl Into<String>, base: &Space, k: usize) -> Space {
        Space::product(name, vec![base.clone(); k])
    }

    pub fn samplable(
        name: impl Into<String>,
        sampler: impl Fn(&mut dyn RngCore) -> Value + Send + Sync + 'static,
        member: impl Fn(&Value) -> bool + Send + Sync + 'static,
    ) -> Space {
        Space {
            name: name.into().into(),
            kind: Kind::Samplable { sampler: Arc::new(sampler), member: Arc::new(member) },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mode(&self) -> SpaceMode {
        match &self.kind {
            Kind::Range(_) | Kind::Finite(_) => SpaceMode::Enumerable,
            Kind::Product(fs) => {
                if fs.iter().all(|f| f.mode() != SpaceMode::SamplableOnly) {
                    SpaceMode::ProductOfEnumerables
                } else {
                    SpaceMode::SamplableOnly
                }
            }
            Kind::Samplable { .. } => SpaceMode::SamplableOnly,
        }
    }

    /// Number of elements, or `None` when unknown or beyond `u64`.
    pub fn size(&self) -> Option<u64> {
        match &self.kind {
            Kind::Range(m) => Some(*m),
            Kind::Finite(els) => Some(els.len() as u64),
            Kind::Product(fs) => fs.iter().try_fold(1u64, |acc, f| acc.checked_mul(f.size()?)),
            Kind::Samplable { .. } => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.size() == Some(0)
    }

    /// Element at position `index` of the lexicographic enumeration. Products
    /// use mixed radix with the first factor most significant.
    pub fn element(&self, index: u64) -> Result<Value> {
        let size = self.size().ok_or_else(|| Error::NonEnumerableSpace(self.name.to_string()))?;
        if index >= size {
            return Err(malformed(format!("index {index} outside {}", self.name)));
        }
        Ok(self.element_unchecked(index))
    }

    fn element_unchecked(&self, mut index: u64) -> Value {
        match &self.kind {
            Kind::Range(_) => Value::Int(index),
            Kind::Finite(els) => els[index as usize].clone(),
            Kind::Product(fs) => {
                let mut parts = vec![Value::empty(); fs.len()];
                for (slot, f) in parts.iter_mut().zip(fs).rev() {
                    let s = f.size().expect("enumerable factor");
                    *slot = f.element_unchecked(index % s);
                    index /= s;
                }
                Value::List(parts)
            }
            Kind::Samplable { .. } => unreachable!("checked by size()"),
        }
    }

    /// All elements in lexicographic order.
    pub fn iter(&self) -> Result<impl Iterator<Item = Value> + '_> {
        let size = self.size().ok_or_else(|| Error::NonEnumerableSpace(self.name.to_string()))?;
        Ok((0..size).map(move |i| self.element_unchecked(i)))
    }

    /// Uniform sample.
    pub fn sample(&self, rng: &mut dyn RngCore) -> Value {
        match &self.kind {
            Kind::Range(m) => Value::Int(rng.gen_range(0..*m)),
            Kind::Finite(els) => els[rng.gen_range(0..els.len())].clone(),
            Kind::Product(fs) => Value::List(fs.iter().map(|f| f.sample(rng)).collect()),
            Kind::Samplable { sampler, .. } => sampler(rng),
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (&self.kind, v) {
            (Kind::Range(m), Value::Int(x)) => x < m,
            (Kind::Finite(els), _) => els.binary_search(v).is_ok(),
            (Kind::Product(fs), Value::List(items)) => {
                fs.len() == items.len() && fs.iter().zip(items).all(|(f, x)| f.contains(x))
            }
            (Kind::Samplable { member, .. }, _) => member(v),
            _ => false,
        }
    }

    pub fn require(&self, v: &Value) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::NotInSpace(self.name.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn product_enumeration_is_lexicographic() {
        let z3 = Space::range("Z3", 3);
        let p = Space::product("Z3xZ3", vec![z3.clone(), z3]);
        let all: Vec<Value> = p.iter().unwrap().collect();
        assert_eq!(all.len(), 9);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        assert_eq!(all[5], Value::ints([1, 2]));
    }

    #[test]
    fn nested_product_matches_value_order() {
        let z4 = Space::range("Z4", 4);
        let a = Space::power("Z4^1", &z4, 1);
        let c = Space::product("C", vec![a, z4]);
        let all: Vec<Value> = c.iter().unwrap().collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[3], Value::List(vec![Value::ints([0]), Value::Int(3)]));
    }

    #[test]
    fn overflowing_products_are_not_enumerable() {
        let big = Space::range("Zq", 1 << 40);
        let p = Space::power("P", &big, 3);
        assert_eq!(p.size(), None);
        assert!(p.element(0).is_err());
        let mut rng = stream(1, 0);
        let s = p.sample(&mut rng);
        assert!(p.contains(&s));
    }

    #[test]
    fn json_is_nested_integer_arrays() {
        let v = Value::List(vec![Value::ints([0, 0]), Value::Int(3)]);
        assert_eq!(v.to_json(), "[[0,0],3]");
        assert_eq!(Value::from_json("[[0,0],3]").unwrap(), v);
        assert_eq!(v.to_string(), "((0,0),3)");
    }

    #[test]
    fn bit_helpers_round_trip() {
        let mut bits = Vec::new();
        int_to_bits(11, 5, &mut bits);
        assert_eq!(bits, vec![true, true, false, true, false]);
        assert_eq!(bits_to_int(&bits), 11);
        assert_eq!(bit_width(16), 4);
        assert_eq!(bit_width(4), 2);
        assert_eq!(bit_width(6), 3);
        assert_eq!(bit_width(1), 0);
    }
}
