use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scheme::Message;
use crate::value::{Space, Value};

/// Plaintext map of a bridge, stored as an explicit table over an
/// enumerable domain.
#[derive(Clone)]
pub struct Iota {
    name: String,
    domain: Space,
    codomain: Space,
    table: Arc<BTreeMap<Value, Value>>,
}

impl fmt::Debug for Iota {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Iota({}: {} -> {})", self.name, self.domain.name(), self.codomain.name())
    }
}

impl Iota {
    pub fn from_fn(
        name: impl Into<String>,
        domain: &Space,
        codomain: &Space,
        f: impl Fn(&Value) -> Result<Value>,
    ) -> Result<Iota> {
        let mut table = BTreeMap::new();
        for m in domain.iter()? {
            let image = f(&m)?;
            codomain.require(&image)?;
            table.insert(m, image);
        }
        Ok(Iota { name: name.into(), domain: domain.clone(), codomain: codomain.clone(), table: Arc::new(table) })
    }

    pub fn identity(space: &Space) -> Result<Iota> {
        Iota::from_fn("id", space, space, |m| Ok(m.clone()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &Space {
        &self.domain
    }

    pub fn codomain(&self) -> &Space {
        &self.codomain
    }

    pub fn table(&self) -> &BTreeMap<Value, Value> {
        &self.table
    }

    pub fn apply_value(&self, m: &Value) -> Result<Value> {
        self.table.get(m).cloned().ok_or_else(|| Error::NotInSpace(self.domain.name().to_string()))
    }

    pub fn apply(&self, m: &Message) -> Result<Message> {
        if m.tag() != self.domain.name() {
            return Err(Error::TagMismatch { expected: self.domain.name().into(), found: m.tag().into() });
        }
        Ok(Message::new(self.codomain.name(), self.apply_value(m.value())?))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Iota) -> Result<Iota> {
        if self.codomain.name() != next.domain.name() {
            return Err(Error::TagMismatch { expected: next.domain.name().into(), found: self.codomain.name().into() });
        }
        let table = self
            .table
            .iter()
            .map(|(k, v)| Ok((k.clone(), next.apply_value(v)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Iota {
            name: format!("{}∘{}", next.name, self.name),
            domain: self.domain.clone(),
            codomain: next.codomain.clone(),
            table: Arc::new(table),
        })
    }

    /// `m ↦ (f₁(m), …, f_s(m))` into the product of the codomains.
    pub fn tuple(name: impl Into<String>, parts: &[Iota], codomain: &Space) -> Result<Iota> {
        let first = parts.first().ok_or_else(|| Error::InvalidParameter("empty tuple of maps".into()))?;
        Iota::from_fn(name, &first.domain, codomain, |m| {
            Ok(Value::List(parts.iter().map(|p| p.apply_value(m)).collect::<Result<_>>()?))
        })
    }
}

/// Flattens a plaintext of bits (or nested tuples of bits) to a bit vector.
pub fn message_bits(v: &Value) -> Result<Vec<bool>> {
    match v {
        Value::Int(_) => Ok(vec![v.as_bit()?]),
        Value::List(items) => {
            let mut out = Vec::new();
            for item in items {
                out.extend(message_bits(item)?);
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_and_tags() {
        let z2 = Space::range("Z2", 2);
        let pair = Space::power("Z2^2", &z2, 2);
        let xor = Iota::from_fn("xor", &pair, &z2, |m| {
            let b = m.as_bits()?;
            Ok(Value::bit(b[0] ^ b[1]))
        })
        .unwrap();
        let flip = Iota::from_fn("not", &z2, &z2, |m| Ok(Value::bit(!m.as_bit()?))).unwrap();
        let both = xor.then(&flip).unwrap();
        assert_eq!(both.apply_value(&Value::ints([1, 1])).unwrap(), Value::Int(1));
        assert!(flip.then(&xor).is_err());
        let wrong = Message::new("Z3", Value::Int(0));
        assert!(matches!(flip.apply(&wrong), Err(Error::TagMismatch { .. })));
        assert_eq!(message_bits(&Value::ints([1, 0])).unwrap(), vec![true, false]);
    }
}
