//! Linear-chain CRF over token classes.
//!
//! Decoding only ever considers, at each position, the classes that accept
//! that token. A token nothing accepts is left unresolved rather than forced
//! into a wrong class.

mod features;
mod train;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use features::{extract_features, extract_with_pos, FeatureSet, END_OF_SENTENCE};
pub use train::train;

use crate::classes::{ClassId, ClassRegistry};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TaggerError {
    #[error("no training tokens")]
    EmptyCorpus,
    #[error("model was trained against registry {expected}, got {found}")]
    RegistryMismatch { expected: String, found: String },
    #[error("sentence {sentence}, token {position}: label is not among the token's candidates")]
    InvalidLabel { sentence: usize, position: usize },
    #[error("malformed model: {0}")]
    Malformed(String),
}

/// Training settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hyper {
    /// L2 coefficient on the squared weight norm.
    pub l2: f64,
    pub epochs: usize,
    /// Initial SGD step size.
    pub learning_rate: f64,
    /// Seed for the per-epoch sentence shuffle.
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 20_200_101;

impl Default for Hyper {
    fn default() -> Self {
        Hyper { l2: 1.0, epochs: 50, learning_rate: 0.1, seed: DEFAULT_SEED }
    }
}

impl Hyper {
    /// Sets one field from a `key=value` style pair.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let bad = |e: &dyn std::fmt::Display| format!("bad value `{value}` for `{key}`: {e}");
        match key {
            "l2" | "c2" => self.l2 = value.parse().map_err(|e| bad(&e))?,
            "epochs" | "iterations" => self.epochs = value.parse().map_err(|e| bad(&e))?,
            "learning_rate" | "eta" => self.learning_rate = value.parse().map_err(|e| bad(&e))?,
            "seed" => self.seed = value.parse().map_err(|e| bad(&e))?,
            _ => return Err(format!("unknown hyperparameter `{key}`")),
        }
        if !(self.l2 >= 0.0 && self.learning_rate > 0.0) {
            return Err(format!("`{key}` out of range"));
        }
        Ok(())
    }
}

/// Start-of-sentence state in transition keys.
const START: u32 = u32::MAX;

/// Trained weights bound to one registry snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct TaggerModel {
    registry_id: String,
    hyper: Hyper,
    features: Vec<String>,
    feature_index: HashMap<String, u32>,
    /// Per feature, `(class, weight)` sorted by class.
    emissions: Vec<Vec<(ClassId, f64)>>,
    transitions: HashMap<(u32, u32), f64>,
}

/// Candidate classes and their emission scores at each position.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub candidates: Vec<Vec<ClassId>>,
    pub emission: Vec<Vec<f64>>,
}

impl TaggerModel {
    pub fn registry_id(&self) -> &str {
        &self.registry_id
    }

    pub fn hyper(&self) -> &Hyper {
        &self.hyper
    }

    pub fn feature_count(&self) -> usize {
        self.features.len()
    }

    pub fn check_registry(&self, registry: &ClassRegistry) -> Result<(), TaggerError> {
        let found = registry.snapshot_id();
        if found != self.registry_id {
            return Err(TaggerError::RegistryMismatch { expected: self.registry_id.clone(), found });
        }
        Ok(())
    }

    /// Emission weight of one class under the given feature strings. Unknown
    /// features contribute nothing.
    pub fn emission_score(&self, features: &[String], class: ClassId) -> f64 {
        features.iter().filter_map(|f| self.feature_index.get(f)).map(|&f| self.weight(f, class)).sum()
    }

    fn weight(&self, feature: u32, class: ClassId) -> f64 {
        let row = &self.emissions[feature as usize];
        row.binary_search_by_key(&class, |&(c, _)| c).map_or(0.0, |i| row[i].1)
    }

    /// Transition weight; `prev = None` is the sentence start.
    pub fn transition_score(&self, prev: Option<ClassId>, class: ClassId) -> f64 {
        let prev = prev.map_or(START, |p| p.0);
        self.transitions.get(&(prev, class.0)).copied().unwrap_or(0.0)
    }

    pub fn lattice(&self, tokens: &[impl AsRef<str>], registry: &ClassRegistry) -> Lattice {
        let mut candidates = Vec::with_capacity(tokens.len());
        let mut emission = Vec::with_capacity(tokens.len());
        for i in 0..tokens.len() {
            let fs = extract_features(tokens, i, registry);
            let ids: Vec<u32> = fs.names(registry).iter().filter_map(|f| self.feature_index.get(f).copied()).collect();
            emission.push(fs.candidates.iter().map(|&c| ids.iter().map(|&f| self.weight(f, c)).sum()).collect());
            candidates.push(fs.candidates);
        }
        Lattice { candidates, emission }
    }

    /// Highest scoring class sequence where each position may only take a
    /// class accepting its token. Positions without candidates yield `None`
    /// and restart the chain.
    pub fn predict(
        &self,
        tokens: &[impl AsRef<str>],
        registry: &ClassRegistry,
    ) -> Result<Vec<Option<ClassId>>, TaggerError> {
        self.check_registry(registry)?;
        Ok(self.decode(&self.lattice(tokens, registry)))
    }

    pub fn decode(&self, lattice: &Lattice) -> Vec<Option<ClassId>> {
        let n = lattice.candidates.len();
        let mut out = vec![None; n];
        let mut i = 0;
        while i < n {
            if lattice.candidates[i].is_empty() {
                i += 1;
                continue;
            }
            let start = i;
            while i < n && !lattice.candidates[i].is_empty() {
                i += 1;
            }
            for (k, class) in self.viterbi(lattice, start, i).into_iter().enumerate() {
                out[start + k] = Some(class);
            }
        }
        out
    }

    fn viterbi(&self, lattice: &Lattice, start: usize, end: usize) -> Vec<ClassId> {
        let cands = &lattice.candidates;
        let mut delta: Vec<f64> = cands[start]
            .iter()
            .zip(&lattice.emission[start])
            .map(|(&c, &e)| self.transition_score(None, c) + e)
            .collect();
        let mut back: Vec<Vec<usize>> = Vec::with_capacity(end - start);
        back.push(Vec::new());
        for i in start + 1..end {
            let mut next = Vec::with_capacity(cands[i].len());
            let mut ptr = Vec::with_capacity(cands[i].len());
            for (j, &c) in cands[i].iter().enumerate() {
                // strict comparison: ties go to the lower class index
                let mut best = (0, f64::NEG_INFINITY);
                for (k, &p) in cands[i - 1].iter().enumerate() {
                    let s = delta[k] + self.transition_score(Some(p), c);
                    if s > best.1 {
                        best = (k, s);
                    }
                }
                next.push(best.1 + lattice.emission[i][j]);
                ptr.push(best.0);
            }
            delta = next;
            back.push(ptr);
        }
        let mut j = 0;
        for (k, &s) in delta.iter().enumerate() {
            if s > delta[j] {
                j = k;
            }
        }
        let mut path = vec![ClassId(0); end - start];
        for i in (start..end).rev() {
            path[i - start] = cands[i][j];
            if i > start {
                j = back[i - start][j];
            }
        }
        path
    }

    pub fn to_record(&self) -> ModelRecord {
        let mut emissions: Vec<(u32, u32, f64)> = self
            .emissions
            .iter()
            .enumerate()
            .flat_map(|(f, row)| row.iter().map(move |&(c, w)| (f as u32, c.0, w)))
            .collect();
        emissions.sort_by_key(|&(f, c, _)| (f, c));
        let mut transitions: Vec<(i64, u32, f64)> =
            self.transitions.iter().map(|(&(p, c), &w)| (if p == START { -1 } else { i64::from(p) }, c, w)).collect();
        transitions.sort_by_key(|&(p, c, _)| (p, c));
        ModelRecord {
            registry_id: self.registry_id.clone(),
            hyper: self.hyper.clone(),
            features: self.features.clone(),
            emissions,
            transitions,
        }
    }

    pub fn from_record(record: ModelRecord) -> Result<Self, TaggerError> {
        let mut feature_index = HashMap::with_capacity(record.features.len());
        for (i, f) in record.features.iter().enumerate() {
            if feature_index.insert(f.clone(), i as u32).is_some() {
                return Err(TaggerError::Malformed(format!("duplicate feature `{f}`")));
            }
        }
        let mut emissions = vec![Vec::new(); record.features.len()];
        for (f, c, w) in record.emissions {
            let row = emissions
                .get_mut(f as usize)
                .ok_or_else(|| TaggerError::Malformed(format!("feature index {f} out of range")))?;
            row.push((ClassId(c), w));
        }
        for row in &mut emissions {
            row.sort_by_key(|&(c, _)| c);
        }
        let transitions = record
            .transitions
            .into_iter()
            .map(|(p, c, w)| {
                let p = if p < 0 { START } else { p as u32 };
                ((p, c), w)
            })
            .collect();
        Ok(TaggerModel {
            registry_id: record.registry_id,
            hyper: record.hyper,
            features: record.features,
            feature_index,
            emissions,
            transitions,
        })
    }

    /// Largest class index referenced by any weight.
    pub fn max_class_index(&self) -> Option<u32> {
        let em = self.emissions.iter().flatten().map(|&(c, _)| c.0);
        let tr = self.transitions.keys().flat_map(|&(p, c)| [p, c]).filter(|&x| x != START);
        em.chain(tr).max()
    }
}

/// Serialized weights. Emissions are `(feature, class, weight)`;
/// transitions are `(previous class or -1 for start, class, weight)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelRecord {
    pub registry_id: String,
    pub hyper: Hyper,
    pub features: Vec<String>,
    pub emissions: Vec<(u32, u32, f64)>,
    pub transitions: Vec<(i64, u32, f64)>,
}

#[cfg(test)]
mod tests;
