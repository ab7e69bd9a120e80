use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::scheme::{PublicKey, SchemeRef, SecretKey};
use crate::value::{Space, Value};

/// What an adversary sees when choosing messages. `sk` is present only
/// for white-box fixtures.
pub struct View<'a> {
    pub pk: &'a PublicKey,
    pub sk: Option<&'a SecretKey>,
    pub plaintexts: &'a Space,
}

pub struct Choice {
    pub m0: Value,
    pub m1: Value,
    pub state: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Guess {
    Bit(bool),
    Abstain,
}

pub trait Adversary: Send + Sync {
    fn name(&self) -> String;

    /// Whether the harness should hand over the secret key.
    fn white_box(&self) -> bool {
        false
    }

    fn choose(&self, view: &View<'_>, rng: &mut dyn RngCore) -> Result<Choice>;

    fn guess(&self, view: &View<'_>, state: &Value, challenge: &Value, rng: &mut dyn RngCore) -> Result<Guess>;
}

fn first_two(space: &Space) -> Result<(Value, Value)> {
    Ok((space.element(0)?, space.element(1)?))
}

fn choose_first_two(view: &View<'_>) -> Result<Choice> {
    let (m0, m1) = first_two(view.plaintexts)?;
    Ok(Choice { m0, m1, state: Value::empty() })
}

struct RandomGuess;

impl Adversary for RandomGuess {
    fn name(&self) -> String {
        "random-guess".into()
    }

    fn choose(&self, view: &View<'_>, _: &mut dyn RngCore) -> Result<Choice> {
        choose_first_two(view)
    }

    fn guess(&self, _: &View<'_>, _: &Value, _: &Value, rng: &mut dyn RngCore) -> Result<Guess> {
        Ok(Guess::Bit(rng.gen()))
    }
}

pub fn random_guess() -> Box<dyn Adversary> {
    Box::new(RandomGuess)
}

/// Reads the challenge as if it were the plaintext.
struct PlaintextReader;

impl Adversary for PlaintextReader {
    fn name(&self) -> String {
        "plaintext-reader".into()
    }

    fn choose(&self, view: &View<'_>, _: &mut dyn RngCore) -> Result<Choice> {
        choose_first_two(view)
    }

    fn guess(&self, view: &View<'_>, _: &Value, challenge: &Value, rng: &mut dyn RngCore) -> Result<Guess> {
        let (m0, m1) = first_two(view.plaintexts)?;
        Ok(if *challenge == m1 {
            Guess::Bit(true)
        } else if *challenge == m0 {
            Guess::Bit(false)
        } else {
            Guess::Bit(rng.gen())
        })
    }
}

pub fn plaintext_reader() -> Box<dyn Adversary> {
    Box::new(PlaintextReader)
}

/// White-box fixture that decrypts the challenge with the real key.
struct Omniscient {
    scheme: SchemeRef,
}

impl Adversary for Omniscient {
    fn name(&self) -> String {
        "omniscient".into()
    }

    fn white_box(&self) -> bool {
        true
    }

    fn choose(&self, view: &View<'_>, _: &mut dyn RngCore) -> Result<Choice> {
        choose_first_two(view)
    }

    fn guess(&self, view: &View<'_>, _: &Value, challenge: &Value, _: &mut dyn RngCore) -> Result<Guess> {
        let sk = view.sk.ok_or_else(|| Error::InvalidParameter("omniscient adversary needs the secret key".into()))?;
        let (_, m1) = first_two(view.plaintexts)?;
        Ok(Guess::Bit(self.scheme.decrypt_value(sk, challenge)? == m1))
    }
}

pub fn omniscient(scheme: &SchemeRef) -> Box<dyn Adversary> {
    Box::new(Omniscient { scheme: scheme.clone() })
}

/// Where the half-key attacker finds the bridge key and the source
/// ciphertext.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frontend {
    /// Source public key with `[pk₂, bk]` appended to its extra values.
    Augmented,
    /// Graph-scheme key `[pk₁, pk₂, bk]`; challenges are pairs.
    Graph,
}

/// Rebuilds the source secret key from a composite bridge key
/// `[first half, pk₂, second half]` and decrypts the challenge.
struct HalfkeyAttacker {
    base: SchemeRef,
    frontend: Frontend,
}

impl HalfkeyAttacker {
    fn bridge_key<'a>(&self, pk: &'a PublicKey) -> Option<&'a Value> {
        match self.frontend {
            Frontend::Augmented => pk.aux.last(),
            Frontend::Graph => pk.value.as_list().ok()?.get(2),
        }
    }

    /// Secret key from both halves, or `MissingKeyHalf`.
    pub fn reassemble(&self, pk: &PublicKey) -> Result<SecretKey> {
        let bk = self.bridge_key(pk).ok_or(Error::MissingKeyHalf)?;
        let parts = bk.as_tuple(3).map_err(|_| Error::MissingKeyHalf)?;
        let first = parts[0].as_bits().map_err(|_| Error::MissingKeyHalf)?;
        let second = parts[2].as_bits().map_err(|_| Error::MissingKeyHalf)?;
        let mut bits = first;
        bits.extend(second);
        if bits.len() != self.base.key_bits() {
            return Err(Error::MissingKeyHalf);
        }
        self.base.secret_from_bits(&bits)
    }
}

impl Adversary for HalfkeyAttacker {
    fn name(&self) -> String {
        "reassembly".into()
    }

    fn choose(&self, view: &View<'_>, _: &mut dyn RngCore) -> Result<Choice> {
        let (m0, m1) = first_two(view.plaintexts)?;
        let state = match self.reassemble(view.pk) {
            Ok(sk) => sk.value().clone(),
            Err(Error::MissingKeyHalf) => Value::empty(),
            Err(e) => return Err(e),
        };
        Ok(Choice { m0, m1, state })
    }

    fn guess(&self, view: &View<'_>, state: &Value, challenge: &Value, _: &mut dyn RngCore) -> Result<Guess> {
        if *state == Value::empty() {
            return Ok(Guess::Abstain);
        }
        let sk = SecretKey::new(state.clone());
        let c = match self.frontend {
            Frontend::Augmented => challenge,
            Frontend::Graph => &challenge.as_tuple(2)?[0],
        };
        let (_, m1) = first_two(view.plaintexts)?;
        Ok(Guess::Bit(self.base.decrypt_value(&sk, c)? == m1))
    }
}

pub fn halfkey_attacker(base: &SchemeRef, frontend: Frontend) -> Box<dyn Adversary> {
    Box::new(HalfkeyAttacker { base: base.clone(), frontend })
}

/// Secret key rebuilt from a published composite half-key bridge key.
pub fn reassemble_secret(base: &SchemeRef, pk: &PublicKey) -> Result<SecretKey> {
    HalfkeyAttacker { base: base.clone(), frontend: Frontend::Augmented }.reassemble(pk)
}
