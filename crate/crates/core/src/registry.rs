//! String ids for everything the command line can name.

use crate::bridges::{
    compose, double_additive_bridge, halfkey_bridges, identity_bridge, lwe_additive_bridge_on, modswitch_bridge,
    sabotaged_lwe_bridge, Bridge, KeyMode,
};
use crate::circuits::BooleanCircuit;
use crate::error::{Error, Result};
use crate::fche::{bootstrap_after_eval, fche_transform};
use crate::gentry::{circuit_bridge, gentry_bridge, RecryptVariant};
use crate::harness::{
    byte_parity, first_bit, gentry_samplers, halfkey_attacker, omniscient, plaintext_reader, random_guess, Adversary,
    Distinguisher, Frontend, Sampler,
};
use crate::homomorphic::{HomSchemeRef, TrivialFhe};
use crate::params::{Preset, Presets};
use crate::scheme::SchemeRef;

/// Bridge ids with their default preset and a one-line description.
pub const BRIDGES: &[(&str, &str, &str)] = &[
    ("identity", "lwe-toy", "identity on any preset scheme"),
    ("lwe-additive", "lwe-additive", "pairs of LWE ciphertexts to one ciphertext of the XOR"),
    ("double-additive", "lwe-toy", "two stacked additive bridges; noise doubles"),
    ("additive-modswitch", "lwe-modswitch-wide", "additive bridge followed by modulus switching"),
    ("modswitch", "lwe-modswitch", "threshold LWE from q to Q by scaling"),
    ("gm-identity", "gm-toy", "identity on Goldwasser-Micali"),
    ("halfkey-f", "lwe-toy", "appends the first half of the secret key"),
    ("halfkey-g", "lwe-toy", "appends the second half of the secret key"),
    ("halfkey-composed", "lwe-toy", "composition of the two half-key bridges"),
    ("sabotaged", "lwe-toy", "identity that flips the plaintext half of the time"),
    ("gentry-composed", "lwe-n1q4", "identity followed by recryption into gsw-demo"),
    ("gentry:<inner>:<outer>[:shared][:encrypted-bits]", "-", "recryption bridge; outer is trivial or a GSW preset"),
    ("circuit:<backend>:<circuit>", "-", "homomorphic evaluation of xor, and, full-adder or identity"),
];

pub const SCHEMES: &[(&str, &str)] = &[
    ("<preset>", "any LWE, GM or GSW preset"),
    ("trivial", "ciphertext = plaintext, evaluates everything"),
    ("fche:<backend>", "composable transform of trivial or a GSW preset"),
    ("bootstrap:<backend>", "evaluation followed by recryption"),
];

pub const ADVERSARIES: &[(&str, &str)] = &[
    ("random-guess", "guesses a uniform bit"),
    ("plaintext-reader", "reads the challenge as the plaintext"),
    ("omniscient", "white-box fixture holding the secret key"),
    ("reassembly", "rebuilds the secret key from a composite half-key bridge key"),
    ("reassembly-graph", "the same attack against graph-scheme keys"),
];

pub const SAMPLERS: &[(&str, &str)] = &[
    ("gentry-real", "public material of gentry-composed"),
    ("gentry-zero", "the same with the recryption key replaced by encryptions of 0"),
    ("uniform-bits", "8 uniform bits"),
    ("zero-bits", "8 zero bits"),
];

pub const DISTINGUISHERS: &[(&str, &str)] =
    &[("byte-parity", "parity of the low byte of the first integer"), ("first-bit", "low bit of the first integer")];

pub const CIRCUITS: &[&str] = &["xor", "and", "full-adder", "identity"];

#[derive(Clone, Debug)]
pub struct Registry {
    presets: Presets,
}

impl Default for Registry {
    fn default() -> Self {
        Registry::new(Presets::builtin())
    }
}

fn unknown(kind: &'static str, id: &str) -> Error {
    Error::Unknown { kind, id: id.to_string() }
}

pub fn circuit(id: &str) -> Result<BooleanCircuit> {
    match id {
        "xor" => Ok(BooleanCircuit::xor()),
        "and" => Ok(BooleanCircuit::and()),
        "full-adder" => Ok(BooleanCircuit::full_adder()),
        "identity" => Ok(BooleanCircuit::identity(1)),
        _ => Err(unknown("circuit", id)),
    }
}

impl Registry {
    pub fn new(presets: Presets) -> Self {
        Registry { presets }
    }

    pub fn presets(&self) -> &Presets {
        &self.presets
    }

    pub fn scheme(&self, id: &str) -> Result<SchemeRef> {
        if id == "trivial" || id.starts_with("fche:") || id.starts_with("bootstrap:") {
            return Ok(self.hom_scheme(id)?.scheme());
        }
        self.presets.get(id).map_err(|_| unknown("scheme", id))?.scheme()
    }

    pub fn hom_scheme(&self, id: &str) -> Result<HomSchemeRef> {
        if id == "trivial" {
            return Ok(HomSchemeRef::new(TrivialFhe));
        }
        if let Some(base) = id.strip_prefix("fche:") {
            return Ok(fche_transform(&self.hom_scheme(base)?));
        }
        if let Some(base) = id.strip_prefix("bootstrap:") {
            return Ok(bootstrap_after_eval(&self.hom_scheme(base)?));
        }
        match self.presets.get(id) {
            Ok(p @ Preset::Gsw { .. }) => p.hom_scheme(),
            _ => Err(unknown("homomorphic scheme", id)),
        }
    }

    /// Default preset of a bridge id, if it takes one.
    pub fn default_preset(id: &str) -> Option<&'static str> {
        BRIDGES.iter().find(|(name, p, _)| *name == id && *p != "-").map(|(_, p, _)| *p)
    }

    pub fn bridge(&self, id: &str, preset: Option<&str>) -> Result<Bridge> {
        if let Some(rest) = id.strip_prefix("gentry:") {
            return self.gentry(id, rest);
        }
        if let Some(rest) = id.strip_prefix("circuit:") {
            let (backend, name) = rest.split_once(':').ok_or_else(|| unknown("bridge", id))?;
            return circuit_bridge(&self.hom_scheme(backend)?, name, &circuit(name)?);
        }
        let preset_name = preset.or(Registry::default_preset(id)).ok_or_else(|| unknown("bridge", id))?;
        let p = self.presets.get(preset_name)?;
        match id {
            "identity" => identity_bridge(&p.scheme()?),
            "lwe-additive" => lwe_additive_bridge_on(p.lwe_scheme()?),
            "double-additive" => double_additive_bridge(p.lwe_params()?),
            "sabotaged" => sabotaged_lwe_bridge(p.lwe_params()?),
            "modswitch" | "additive-modswitch" => {
                let Preset::Modswitch { n, q, big_q, noise_bound, .. } = *p else {
                    return Err(Error::InvalidParameter(format!("{preset_name} is not a modulus-switching preset")));
                };
                let switch = modswitch_bridge(n, q, big_q, noise_bound)?;
                if id == "modswitch" {
                    Ok(switch)
                } else {
                    compose(&lwe_additive_bridge_on(p.lwe_scheme()?)?, &switch)
                }
            }
            "gm-identity" => match p {
                Preset::Gm { .. } => identity_bridge(&p.scheme()?),
                _ => Err(Error::InvalidParameter(format!("{preset_name} is not a GM preset"))),
            },
            "halfkey-f" | "halfkey-g" | "halfkey-composed" => {
                let (f, g) = halfkey_bridges(&p.scheme()?)?;
                match id {
                    "halfkey-f" => Ok(f),
                    "halfkey-g" => Ok(g),
                    _ => compose(&f, &g),
                }
            }
            "gentry-composed" => {
                let inner = p.scheme()?;
                let outer = self.hom_scheme("gsw-demo")?;
                let g = gentry_bridge(&inner, &outer, KeyMode::Independent, RecryptVariant::Folded)?;
                compose(&identity_bridge(&inner)?, &g)
            }
            _ => Err(unknown("bridge", id)),
        }
    }

    fn gentry(&self, id: &str, rest: &str) -> Result<Bridge> {
        let mut parts = rest.split(':');
        let (Some(inner), Some(outer)) = (parts.next(), parts.next()) else {
            return Err(unknown("bridge", id));
        };
        let mut mode = KeyMode::Independent;
        let mut variant = RecryptVariant::Folded;
        for option in parts {
            match option {
                "shared" => mode = KeyMode::Shared,
                "independent" => mode = KeyMode::Independent,
                "encrypted-bits" => variant = RecryptVariant::EncryptedBits,
                "folded" => variant = RecryptVariant::Folded,
                _ => return Err(unknown("bridge option", option)),
            }
        }
        gentry_bridge(&self.scheme(inner)?, &self.hom_scheme(outer)?, mode, variant)
    }

    /// Adversary for games on `scheme`; the key-reassembly attack decrypts
    /// with `scheme`'s algorithm.
    pub fn adversary(&self, id: &str, scheme: &SchemeRef) -> Result<Box<dyn Adversary>> {
        match id {
            "random-guess" => Ok(random_guess()),
            "plaintext-reader" => Ok(plaintext_reader()),
            "omniscient" => Ok(omniscient(scheme)),
            "reassembly" => Ok(halfkey_attacker(scheme, Frontend::Augmented)),
            "reassembly-graph" => Ok(halfkey_attacker(scheme, Frontend::Graph)),
            _ => Err(unknown("adversary", id)),
        }
    }

    pub fn sampler(&self, id: &str) -> Result<Sampler> {
        match id {
            "gentry-real" | "gentry-zero" => {
                let (real, zero) = gentry_samplers(&self.bridge("gentry-composed", None)?)?;
                Ok(if id == "gentry-real" { real } else { zero })
            }
            "uniform-bits" => Ok(Sampler::uniform_bits(8)),
            "zero-bits" => Ok(Sampler::zero_bits(8)),
            _ => Err(unknown("sampler", id)),
        }
    }

    pub fn distinguisher(&self, id: &str) -> Result<Distinguisher> {
        match id {
            "byte-parity" => Ok(byte_parity()),
            "first-bit" => Ok(first_bit()),
            _ => Err(unknown("distinguisher", id)),
        }
    }
}
