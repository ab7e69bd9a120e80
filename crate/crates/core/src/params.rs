//! Named parameter sets, built in or loaded from TOML.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homomorphic::{GswParams, GswScheme, HomSchemeRef};
use crate::scheme::SchemeRef;
use crate::schemes::{DecryptionRule, GmParams, GmScheme, LweParams, LweScheme};

const BUILTIN: &str = include_str!("presets.toml");

fn rounding() -> DecryptionRule {
    DecryptionRule::Rounding
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Preset {
    Lwe {
        #[serde(default)]
        description: String,
        n: usize,
        q: u64,
        noise_bound: u64,
        #[serde(default = "rounding")]
        rule: DecryptionRule,
    },
    /// A pair of threshold-decryption LWE schemes for modulus switching;
    /// as a scheme it stands for the source side.
    Modswitch {
        #[serde(default)]
        description: String,
        n: usize,
        q: u64,
        big_q: u64,
        noise_bound: u64,
    },
    Gm {
        #[serde(default)]
        description: String,
        p: u64,
        q: u64,
    },
    /// `log_q` may be omitted to take the smallest modulus certified for
    /// `depth`.
    Gsw {
        #[serde(default)]
        description: String,
        n: usize,
        log_q: Option<u32>,
        noise_bound: u64,
        depth: usize,
    },
}

impl Preset {
    pub fn description(&self) -> &str {
        match self {
            Preset::Lwe { description, .. }
            | Preset::Modswitch { description, .. }
            | Preset::Gm { description, .. }
            | Preset::Gsw { description, .. } => description,
        }
    }

    pub fn lwe_params(&self) -> Result<LweParams> {
        match *self {
            Preset::Lwe { n, q, noise_bound, .. } => LweParams::new(n, q, noise_bound),
            Preset::Modswitch { n, q, noise_bound, .. } => LweParams::new_unchecked(n, q, noise_bound),
            _ => Err(Error::InvalidParameter("not an LWE preset".into())),
        }
    }

    pub fn lwe_scheme(&self) -> Result<LweScheme> {
        match self {
            Preset::Lwe { rule: DecryptionRule::Threshold, .. } | Preset::Modswitch { .. } => {
                LweScheme::threshold(self.lwe_params()?)
            }
            Preset::Lwe { .. } => Ok(LweScheme::new(self.lwe_params()?)),
            _ => Err(Error::InvalidParameter("not an LWE preset".into())),
        }
    }

    pub fn gsw_params(&self) -> Result<GswParams> {
        match *self {
            Preset::Gsw { n, log_q: Some(k), noise_bound, depth, .. } => GswParams::new(n, k, noise_bound, depth),
            Preset::Gsw { n, log_q: None, noise_bound, depth, .. } => GswParams::for_depth(n, noise_bound, depth),
            _ => Err(Error::InvalidParameter("not a GSW preset".into())),
        }
    }

    pub fn scheme(&self) -> Result<SchemeRef> {
        match *self {
            Preset::Lwe { .. } | Preset::Modswitch { .. } => Ok(SchemeRef::new(self.lwe_scheme()?)),
            Preset::Gm { p, q, .. } => Ok(SchemeRef::new(GmScheme::new(GmParams::new(p, q)?))),
            Preset::Gsw { .. } => Ok(self.hom_scheme()?.scheme()),
        }
    }

    pub fn hom_scheme(&self) -> Result<HomSchemeRef> {
        Ok(HomSchemeRef::new(GswScheme::new(self.gsw_params()?)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Presets(BTreeMap<String, Preset>);

impl Presets {
    pub fn builtin() -> Presets {
        Presets::from_toml(BUILTIN).expect("built-in presets parse")
    }

    pub fn from_toml(text: &str) -> Result<Presets> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Built-in presets with the file's entries added or overriding them.
    pub fn with_file(path: &Path) -> Result<Presets> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut presets = Presets::builtin();
        presets.0.extend(Presets::from_toml(&text)?.0);
        Ok(presets)
    }

    pub fn get(&self, name: &str) -> Result<&Preset> {
        self.0.get(name).ok_or_else(|| Error::Unknown { kind: "preset", id: name.to_string() })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Preset)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.0).expect("presets serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_presets_build() {
        let presets = Presets::builtin();
        for (name, preset) in presets.iter() {
            preset.scheme().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(presets.get("nope").is_err());
    }

    #[test]
    fn files_override_builtins() {
        let dir = std::env::temp_dir().join(format!("presets-{}", std::process::id()));
        std::fs::write(&dir, "[lwe-toy]\nkind = \"lwe\"\nn = 1\nq = 32\nnoise_bound = 0\n").unwrap();
        let presets = Presets::with_file(&dir).unwrap();
        std::fs::remove_file(&dir).unwrap();
        assert_eq!(presets.get("lwe-toy").unwrap().lwe_params().unwrap(), LweParams::new(1, 32, 0).unwrap());
        assert!(presets.get("gm-toy").is_ok());
    }

    #[test]
    fn round_trips_through_toml() {
        let presets = Presets::builtin();
        assert_eq!(Presets::from_toml(&presets.to_toml()).unwrap(), presets);
    }
}
