//! Language profiles.
//!
//! A profile is a TOML file naming the active predefined classes, the word
//! tables used by the number and spelling verbalizers, and the currency and
//! measure inventories used for realignment.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::classes::{NumberWords, SilSet};

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("cannot read profile {path}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid profile {path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpellTable {
    /// Letter → spoken name. Letters missing from the table are read as
    /// themselves.
    pub letters: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurrencyInventory {
    pub symbols: Vec<String>,
    pub decimal_marks: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureInventory {
    pub units: Vec<String>,
    pub exponents: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub id: String,
    /// Predefined classes in registry order.
    pub classes: Vec<String>,
    #[serde(default)]
    pub numbers: NumberWords,
    #[serde(default)]
    pub spell: SpellTable,
    #[serde(default)]
    pub sil: SilSet,
    #[serde(default)]
    pub currency: CurrencyInventory,
    #[serde(default)]
    pub measure: MeasureInventory,
}

const ENGLISH: &str = include_str!("../profiles/en.toml");

impl Profile {
    /// The built-in English profile.
    pub fn english() -> Self {
        Self::parse(ENGLISH, Path::new("<builtin en>")).expect("built-in profile is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ProfileError> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|source| ProfileError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, ProfileError> {
        let invalid = |message: String| ProfileError::Invalid { path: path.to_path_buf(), message };
        let profile: Profile = toml::from_str(text).map_err(|e| invalid(e.to_string()))?;
        profile.numbers.validate().map_err(invalid)?;
        if profile.classes.is_empty() {
            return Err(invalid("no predefined classes listed".into()));
        }
        if profile.currency.symbols.iter().chain(&profile.currency.decimal_marks).any(String::is_empty)
            || profile.measure.units.iter().chain(&profile.measure.exponents).any(String::is_empty)
        {
            return Err(invalid("empty entry in currency or measure inventory".into()));
        }
        if !profile.currency.symbols.is_empty() && profile.currency.decimal_marks.is_empty() {
            return Err(invalid("currency symbols need at least one decimal mark".into()));
        }
        Ok(profile)
    }

    /// Hash of the profile contents, recorded in model files.
    pub fn fingerprint(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("profile serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
