//! Normalization classes.
//!
//! Every class answers two questions about a token: does it accept the token,
//! and if so, what is the spoken form. Predefined classes carry hand-written
//! rules; auto-generated classes are induced from annotated pairs and accept
//! exactly one token text.

mod numbers;
mod registry;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_general_category::{get_general_category, GeneralCategory};
use unicode_script::{Script, UnicodeScript};

pub use numbers::{is_roman, roman_to_int, spell, NumberWords, CARDINAL_CEILING};
pub use registry::{ClassRecord, ClassRegistry, RegistryRecord};

use crate::tokenizer::is_mark;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassError {
    #[error("class `{class}` does not accept token `{token}`")]
    ContractViolation { class: String, token: String },
    #[error("number `{0}` is outside the verbalizer range")]
    OutOfRange(String),
    #[error("`{0}` is not a canonical roman numeral")]
    InvalidRoman(String),
    #[error("unknown predefined class `{0}`")]
    UnknownClass(String),
    #[error("duplicate class id `{0}`")]
    DuplicateClass(String),
}

/// Index of a class in its registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassId(pub u32);

impl ClassId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Predefined,
    AutoGenerated,
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassKind::Predefined => "predefined",
            ClassKind::AutoGenerated => "auto_generated",
        })
    }
}

/// Characters the silence class accepts beyond general punctuation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SilSet {
    pub extra: Vec<char>,
    pub exclude: Vec<char>,
}

impl SilSet {
    fn accepts(&self, text: &str) -> bool {
        !text.is_empty()
            && text.chars().all(|ch| {
                if self.exclude.contains(&ch) {
                    return false;
                }
                self.extra.contains(&ch) || is_punctuation(ch)
            })
    }
}

fn is_punctuation(ch: char) -> bool {
    matches!(
        get_general_category(ch),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

fn is_letter(ch: char) -> bool {
    matches!(
        get_general_category(ch),
        GeneralCategory::UppercaseLetter
            | GeneralCategory::LowercaseLetter
            | GeneralCategory::TitlecaseLetter
            | GeneralCategory::ModifierLetter
            | GeneralCategory::OtherLetter
    )
}

/// Letters (with combining marks), optionally restricted to one script.
fn is_word(text: &str, script: Option<Script>) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(first) if is_letter(first) => {}
        _ => return false,
    }
    text.chars().all(|ch| {
        if is_mark(ch) {
            return true;
        }
        is_letter(ch) && script.is_none_or(|s| ch.script() == s)
    })
}

fn is_ascii_number(text: &str) -> bool {
    !text.is_empty() && text.bytes().all(|b| b.is_ascii_digit())
}

/// Digit strings without leading zeros ("0" itself is fine) within the
/// cardinal ceiling.
fn plain_number(text: &str) -> Option<u64> {
    if !is_ascii_number(text) || (text.len() > 1 && text.starts_with('0')) || text.len() > 16 {
        return None;
    }
    text.parse::<u64>().ok().filter(|&n| n <= CARDINAL_CEILING)
}

/// The behaviour behind a class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// Passes alphabetic tokens through unchanged.
    SelfPass {
        script: Option<Script>,
    },
    /// Punctuation read as silence.
    Sil(Arc<SilSet>),
    Spell(Arc<BTreeMap<String, String>>),
    Cardinal(Arc<NumberWords>),
    Ordinal(Arc<NumberWords>),
    Digit(Arc<NumberWords>),
    Year(Arc<NumberWords>),
    RomanCardinal(Arc<NumberWords>),
    RomanOrdinal(Arc<NumberWords>),
    /// Induced from data: accepts `source` only and emits `target`.
    Generated {
        source: String,
        target: String,
    },
}

/// Shared tables used to build predefined rules.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tables {
    pub numbers: Arc<NumberWords>,
    pub letters: Arc<BTreeMap<String, String>>,
    pub sil: Arc<SilSet>,
}

impl Rule {
    /// Builds a predefined rule from its profile name. `self:<Script>`
    /// restricts the pass-through class to one script.
    pub fn predefined(spec: &str, tables: &Tables) -> Result<(String, Rule), ClassError> {
        let rule = match spec {
            "self" => Rule::SelfPass { script: None },
            "sil" => Rule::Sil(tables.sil.clone()),
            "spell" => Rule::Spell(tables.letters.clone()),
            "cardinal" => Rule::Cardinal(tables.numbers.clone()),
            "ordinal" => Rule::Ordinal(tables.numbers.clone()),
            "digit" => Rule::Digit(tables.numbers.clone()),
            "year" => Rule::Year(tables.numbers.clone()),
            "roman_cardinal" => Rule::RomanCardinal(tables.numbers.clone()),
            "roman_ordinal" => Rule::RomanOrdinal(tables.numbers.clone()),
            other => {
                let script = other
                    .strip_prefix("self:")
                    .and_then(Script::from_full_name)
                    .ok_or_else(|| ClassError::UnknownClass(other.to_string()))?;
                let id = format!("self_{}", script.full_name().to_lowercase());
                return Ok((id, Rule::SelfPass { script: Some(script) }));
            }
        };
        Ok((spec.to_string(), rule))
    }

    /// Profile name of a predefined rule; `None` for generated rules.
    pub fn spec(&self) -> Option<String> {
        Some(match self {
            Rule::SelfPass { script: None } => "self".into(),
            Rule::SelfPass { script: Some(s) } => format!("self:{}", s.full_name()),
            Rule::Sil(_) => "sil".into(),
            Rule::Spell(_) => "spell".into(),
            Rule::Cardinal(_) => "cardinal".into(),
            Rule::Ordinal(_) => "ordinal".into(),
            Rule::Digit(_) => "digit".into(),
            Rule::Year(_) => "year".into(),
            Rule::RomanCardinal(_) => "roman_cardinal".into(),
            Rule::RomanOrdinal(_) => "roman_ordinal".into(),
            Rule::Generated { .. } => return None,
        })
    }

    pub fn accepts(&self, text: &str) -> bool {
        match self {
            Rule::SelfPass { script } => is_word(text, *script),
            Rule::Sil(set) => set.accepts(text),
            Rule::Spell(_) => is_word(text, None),
            Rule::Cardinal(_) => plain_number(text).is_some(),
            Rule::Ordinal(_) => plain_number(text).is_some_and(|n| n > 0),
            Rule::Digit(_) => is_ascii_number(text),
            Rule::Year(_) => text.len() == 4 && is_ascii_number(text) && !text.starts_with('0'),
            Rule::RomanCardinal(_) | Rule::RomanOrdinal(_) => is_roman(text),
            Rule::Generated { source, .. } => source == text,
        }
    }

    /// Output for an accepted token. Errors only on inputs outside the
    /// accept set.
    pub fn normalize(&self, text: &str) -> Result<String, ClassError> {
        match self {
            Rule::SelfPass { .. } => Ok(text.to_string()),
            Rule::Sil(_) => Ok(String::new()),
            Rule::Spell(letters) => Ok(spell(text, letters)),
            Rule::Cardinal(words) => words.cardinal(plain_number(text).expect("accepted")),
            Rule::Ordinal(words) => words.ordinal(plain_number(text).expect("accepted")),
            Rule::Digit(words) => words.digits(text),
            Rule::Year(words) => words.year(text.parse().expect("accepted")),
            Rule::RomanCardinal(words) => words.cardinal(u64::from(roman_to_int(text)?)),
            Rule::RomanOrdinal(words) => words.ordinal(u64::from(roman_to_int(text)?)),
            Rule::Generated { target, .. } => Ok(target.clone()),
        }
    }
}

/// A named accepts/normalize pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationClass {
    pub id: String,
    pub kind: ClassKind,
    pub rule: Rule,
}

impl NormalizationClass {
    pub fn generated(id: String, source: &str, target: &str) -> Self {
        NormalizationClass {
            id,
            kind: ClassKind::AutoGenerated,
            rule: Rule::Generated { source: source.to_string(), target: target.to_string() },
        }
    }

    pub fn accepts(&self, token_text: &str) -> bool {
        self.rule.accepts(token_text)
    }

    pub fn normalize(&self, token_text: &str) -> Result<String, ClassError> {
        if !self.accepts(token_text) {
            return Err(ClassError::ContractViolation { class: self.id.clone(), token: token_text.to_string() });
        }
        self.rule.normalize(token_text)
    }
}

/// Id for a generated class: `<token>_to_<norm>_AG`, with spaces in the norm
/// turned into underscores and other whitespace or control characters
/// written as `{U+XXXX}`.
pub fn generated_class_id(source: &str, target: &str) -> String {
    fn clean(s: &str, out: &mut String) {
        for ch in s.chars() {
            if ch == ' ' {
                out.push('_');
            } else if ch.is_whitespace() || ch.is_control() {
                out.push_str(&format!("{{U+{:04X}}}", ch as u32));
            } else {
                out.push(ch);
            }
        }
    }
    let mut id = String::with_capacity(source.len() + target.len() + 7);
    clean(source, &mut id);
    id.push_str("_to_");
    clean(target, &mut id);
    id.push_str("_AG");
    id
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(spec: &str) -> NormalizationClass {
        let (id, rule) = Rule::predefined(spec, &Tables::default()).unwrap();
        NormalizationClass { id, kind: ClassKind::Predefined, rule }
    }

    #[test]
    fn accept_examples() {
        assert!(class("cardinal").accepts("2"));
        assert!(class("self").accepts("hello"));
        let ag = NormalizationClass::generated("12_to_December_AG".into(), "12", "December");
        assert!(!ag.accepts("13"));
        assert!(ag.accepts("12"));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(class("self").normalize("hello").unwrap(), "hello");
        assert_eq!(class("sil").normalize(",").unwrap(), "");
        let ag = NormalizationClass::generated("12_to_December_AG".into(), "12", "December");
        assert_eq!(ag.normalize("12").unwrap(), "December");
    }

    #[test]
    fn contract_violation_on_unaccepted() {
        let err = class("cardinal").normalize("abc").unwrap_err();
        assert!(matches!(err, ClassError::ContractViolation { .. }));
        let ag = NormalizationClass::generated("12_to_December_AG".into(), "12", "December");
        assert!(ag.normalize("13").is_err());
    }

    #[test]
    fn number_accept_sets() {
        let cardinal = class("cardinal");
        assert!(cardinal.accepts("0"));
        assert!(!cardinal.accepts("007"));
        assert!(!cardinal.accepts("10000000000000001"));
        assert!(cardinal.accepts("1000000000000000"));
        assert!(!class("ordinal").accepts("0"));
        assert!(class("digit").accepts("007"));
        assert!(class("digit").accepts("10000000000000001"));
        assert!(class("year").accepts("2020"));
        assert!(!class("year").accepts("0999"));
        assert!(!class("year").accepts("20200"));
        // Tamil digits are Digit tokens but the English verbalizers skip them
        assert!(!cardinal.accepts("௩"));
    }

    #[test]
    fn roman_classes_route_through_numbers() {
        assert_eq!(class("roman_cardinal").normalize("XIV").unwrap(), "fourteen");
        assert_eq!(class("roman_ordinal").normalize("VIII").unwrap(), "eighth");
        assert!(!class("roman_cardinal").accepts("IIII"));
    }

    #[test]
    fn script_restricted_self() {
        let tamil = class("self:Tamil");
        assert_eq!(tamil.id, "self_tamil");
        assert!(tamil.accepts("கிடை"));
        assert!(!tamil.accepts("hello"));
        assert!(class("self").accepts("கிடை"));
    }

    #[test]
    fn sil_accepts_punctuation_only() {
        let sil = class("sil");
        assert!(sil.accepts(","));
        assert!(sil.accepts("?!"));
        assert!(!sil.accepts("$"));
        assert!(!sil.accepts("☂"));
        assert!(!sil.accepts("./currency"));
        assert!(!sil.accepts("a"));
    }

    #[test]
    fn unknown_spec() {
        assert!(matches!(Rule::predefined("units", &Tables::default()), Err(ClassError::UnknownClass(_))));
        assert!(Rule::predefined("self:Klingon", &Tables::default()).is_err());
    }

    #[test]
    fn generated_ids() {
        assert_eq!(generated_class_id("12", "December"), "12_to_December_AG");
        assert_eq!(generated_class_id("/", "of"), "/_to_of_AG");
        assert_eq!(generated_class_id("$", "us dollars"), "$_to_us_dollars_AG");
        assert_eq!(generated_class_id("./currency", "cents"), "./currency_to_cents_AG");
        assert_eq!(generated_class_id("x", "a\tb"), "x_to_a{U+0009}b_AG");
        assert_eq!(generated_class_id("☂", ""), "☂_to__AG");
    }
}
