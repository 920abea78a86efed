use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{
    generated_class_id, ClassError, ClassId, ClassKind, NormalizationClass, NumberWords, Rule, SilSet, Tables,
};
use crate::profile::Profile;

/// Ordered set of classes known to a model: predefined first, then
/// generated classes in creation order.
#[derive(Clone, Debug)]
pub struct ClassRegistry {
    classes: Vec<NormalizationClass>,
    freq: Vec<u64>,
    by_id: HashMap<String, ClassId>,
    by_source: HashMap<String, Vec<ClassId>>,
    predefined: usize,
    tables: Tables,
    snapshot: OnceLock<String>,
}

impl ClassRegistry {
    pub fn from_profile(profile: &Profile) -> Result<Self, ClassError> {
        let tables = Tables {
            numbers: Arc::new(profile.numbers.clone()),
            letters: Arc::new(profile.spell.letters.clone()),
            sil: Arc::new(profile.sil.clone()),
        };
        Self::with_predefined(profile.classes.iter().map(String::as_str), tables)
    }

    pub fn with_predefined<'a>(specs: impl IntoIterator<Item = &'a str>, tables: Tables) -> Result<Self, ClassError> {
        let mut registry = ClassRegistry {
            classes: Vec::new(),
            freq: Vec::new(),
            by_id: HashMap::new(),
            by_source: HashMap::new(),
            predefined: 0,
            tables,
            snapshot: OnceLock::new(),
        };
        for spec in specs {
            let (id, rule) = Rule::predefined(spec, &registry.tables)?;
            if registry.by_id.contains_key(&id) {
                return Err(ClassError::DuplicateClass(id));
            }
            registry.push(NormalizationClass { id, kind: ClassKind::Predefined, rule });
        }
        registry.predefined = registry.classes.len();
        Ok(registry)
    }

    fn push(&mut self, class: NormalizationClass) -> ClassId {
        self.snapshot = OnceLock::new();
        let id = ClassId(self.classes.len() as u32);
        self.by_id.insert(class.id.clone(), id);
        if let Rule::Generated { source, .. } = &class.rule {
            self.by_source.entry(source.clone()).or_default().push(id);
        }
        self.classes.push(class);
        self.freq.push(0);
        id
    }

    /// Adds a generated class for `source → target`, suffixing `_2`, `_3`…
    /// when the plain id is taken.
    pub fn add_generated(&mut self, source: &str, target: &str) -> ClassId {
        let base = generated_class_id(source, target);
        let mut id = base.clone();
        let mut n = 2;
        while self.by_id.contains_key(&id) {
            id = format!("{base}_{n}");
            n += 1;
        }
        self.push(NormalizationClass::generated(id, source, target))
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn predefined_len(&self) -> usize {
        self.predefined
    }

    pub fn generated_len(&self) -> usize {
        self.classes.len() - self.predefined
    }

    pub fn classes(&self) -> &[NormalizationClass] {
        &self.classes
    }

    pub fn ids(&self) -> impl Iterator<Item = ClassId> {
        (0..self.classes.len() as u32).map(ClassId)
    }

    pub fn get(&self, id: ClassId) -> &NormalizationClass {
        &self.classes[id.index()]
    }

    pub fn name(&self, id: ClassId) -> &str {
        &self.classes[id.index()].id
    }

    pub fn lookup(&self, name: &str) -> Option<ClassId> {
        self.by_id.get(name).copied()
    }

    pub fn kind(&self, id: ClassId) -> ClassKind {
        self.classes[id.index()].kind
    }

    pub fn accepts(&self, id: ClassId, token_text: &str) -> bool {
        self.get(id).accepts(token_text)
    }

    pub fn normalize(&self, id: ClassId, token_text: &str) -> Result<String, ClassError> {
        self.get(id).normalize(token_text)
    }

    /// Every class accepting `token_text`, in registry order.
    pub fn candidates(&self, token_text: &str) -> Vec<ClassId> {
        let mut out: Vec<ClassId> =
            (0..self.predefined as u32).map(ClassId).filter(|&id| self.accepts(id, token_text)).collect();
        if let Some(generated) = self.by_source.get(token_text) {
            out.extend_from_slice(generated);
        }
        out
    }

    /// Candidate ids as names.
    pub fn candidate_classes(&self, token_text: &str) -> Vec<&str> {
        self.candidates(token_text).into_iter().map(|id| self.name(id)).collect()
    }

    /// Classes that accept `token_text` and produce exactly `norm`.
    pub fn generators(&self, token_text: &str, norm: &str) -> Vec<ClassId> {
        self.candidates(token_text)
            .into_iter()
            .filter(|&id| self.get(id).rule.normalize(token_text).is_ok_and(|out| out == norm))
            .collect()
    }

    pub fn freq(&self, id: ClassId) -> u64 {
        self.freq[id.index()]
    }

    pub(crate) fn set_freqs(&mut self, freq: Vec<u64>) {
        assert_eq!(freq.len(), self.classes.len());
        self.snapshot = OnceLock::new();
        self.freq = freq;
    }

    pub fn to_record(&self) -> RegistryRecord {
        RegistryRecord {
            numbers: (*self.tables.numbers).clone(),
            letters: (*self.tables.letters).clone(),
            sil: (*self.tables.sil).clone(),
            classes: self
                .classes
                .iter()
                .zip(&self.freq)
                .map(|(class, &freq)| {
                    let (rule, source, target) = match &class.rule {
                        Rule::Generated { source, target } => (None, Some(source.clone()), Some(target.clone())),
                        other => (other.spec(), None, None),
                    };
                    ClassRecord { id: class.id.clone(), kind: class.kind, rule, source, target, freq }
                })
                .collect(),
        }
    }

    pub fn from_record(record: &RegistryRecord) -> Result<Self, ClassError> {
        let tables = Tables {
            numbers: Arc::new(record.numbers.clone()),
            letters: Arc::new(record.letters.clone()),
            sil: Arc::new(record.sil.clone()),
        };
        let predefined: Vec<&str> = record
            .classes
            .iter()
            .take_while(|c| c.kind == ClassKind::Predefined)
            .map(|c| c.rule.as_deref().unwrap_or_default())
            .collect();
        let mut registry = Self::with_predefined(predefined, tables)?;
        for class in &record.classes[registry.predefined..] {
            match (class.kind, &class.source, &class.target) {
                (ClassKind::AutoGenerated, Some(source), Some(target)) => {
                    if registry.by_id.contains_key(&class.id) {
                        return Err(ClassError::DuplicateClass(class.id.clone()));
                    }
                    registry.push(NormalizationClass::generated(class.id.clone(), source, target));
                }
                _ => return Err(ClassError::UnknownClass(class.id.clone())),
            }
        }
        for (i, class) in record.classes.iter().enumerate() {
            if registry.classes[i].id != class.id {
                return Err(ClassError::UnknownClass(class.id.clone()));
            }
        }
        registry.set_freqs(record.classes.iter().map(|c| c.freq).collect());
        Ok(registry)
    }

    /// Content hash identifying this exact registry (classes, tables and
    /// frequencies).
    pub fn snapshot_id(&self) -> String {
        self.snapshot
            .get_or_init(|| {
                let bytes = serde_json::to_vec(&self.to_record()).expect("registry serializes");
                hex::encode(Sha256::digest(&bytes))
            })
            .clone()
    }

    /// Human-readable listing: one class per line with kind and frequency.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {} classes ({} predefined, {} auto-generated)",
            self.len(),
            self.predefined,
            self.generated_len()
        );
        let _ = writeln!(out, "# index\tkind\tfreq\tid");
        for (i, class) in self.classes.iter().enumerate() {
            let _ = writeln!(out, "{i}\t{}\t{}\t{}", class.kind, self.freq[i], class.id);
        }
        out
    }
}

/// Serialized form of a registry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegistryRecord {
    pub numbers: NumberWords,
    pub letters: std::collections::BTreeMap<String, String>,
    pub sil: SilSet,
    pub classes: Vec<ClassRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassRecord {
    pub id: String,
    pub kind: ClassKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub freq: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn english() -> ClassRegistry {
        ClassRegistry::from_profile(&Profile::english()).unwrap()
    }

    #[test]
    fn candidates_follow_registry_order() {
        let mut reg = english();
        reg.add_generated("2", "second hand");
        assert_eq!(reg.candidate_classes("2"), ["cardinal", "ordinal", "digit", "2_to_second_hand_AG"]);
        assert_eq!(reg.candidate_classes(","), ["sil"]);
        assert!(reg.candidates("☂").is_empty());
        assert_eq!(reg.candidate_classes("Hello"), ["self", "spell"]);
        assert_eq!(reg.candidate_classes("2020"), ["cardinal", "ordinal", "digit", "year"]);
    }

    #[test]
    fn generators_require_exact_output() {
        let reg = english();
        let names = |ids: Vec<ClassId>| ids.into_iter().map(|id| reg.name(id).to_string()).collect::<Vec<_>>();
        assert_eq!(names(reg.generators("2", "two")), ["cardinal", "digit"]);
        assert_eq!(names(reg.generators("1", "first")), ["ordinal"]);
        assert!(reg.generators("12", "December").is_empty());
    }

    #[test]
    fn collision_suffix() {
        let mut reg = english();
        let a = reg.add_generated("x", "a b");
        let b = reg.add_generated("x", "a_b");
        let c = reg.add_generated("x", "a\u{a0}b");
        assert_eq!(reg.name(a), "x_to_a_b_AG");
        assert_eq!(reg.name(b), "x_to_a_b_AG_2");
        assert_eq!(reg.name(c), "x_to_a{U+00A0}b_AG");
        assert!(reg.candidates("x").ends_with(&[a, b, c]));
    }

    #[test]
    fn record_round_trip() {
        let mut reg = english();
        reg.add_generated("12", "December");
        reg.add_generated("$", "dollars");
        let mut freq = vec![0; reg.len()];
        freq[3] = 17;
        reg.set_freqs(freq);
        let record = reg.to_record();
        let back = ClassRegistry::from_record(&record).unwrap();
        assert_eq!(back.to_record(), record);
        assert_eq!(back.snapshot_id(), reg.snapshot_id());
        assert_eq!(back.freq(ClassId(3)), 17);
    }

    #[test]
    fn duplicate_predefined_rejected() {
        let err = ClassRegistry::with_predefined(["self", "self"], Tables::default()).unwrap_err();
        assert_eq!(err, ClassError::DuplicateClass("self".into()));
    }

    #[test]
    fn dump_lists_every_class() {
        let mut reg = english();
        reg.add_generated("12", "December");
        let dump = reg.dump();
        assert!(dump.contains("auto_generated\t0\t12_to_December_AG"));
        assert_eq!(dump.lines().count(), reg.len() + 2);
    }
}
