//! Class induction and corpus labeling.
//!
//! Any training pair no existing class can produce gets its own generated
//! class. Each token is then labeled with a class that reproduces its
//! annotation; when several do, the one matched least often across the
//! corpus wins, so rare classes are not swamped by common ones.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classes::{ClassId, ClassKind, ClassRegistry};
use crate::corpus::AnnotatedCorpus;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("sentence {sentence}: no class turns `{token}` into `{norm}`")]
pub struct CoverageError {
    pub sentence: usize,
    pub token: String,
    pub norm: String,
}

/// Token keys with one class per token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledSentence {
    pub tokens: Vec<String>,
    pub labels: Vec<ClassId>,
}

/// Returns `registry` extended with a generated class for every pair no
/// existing class (predefined or generated so far) produces. Pairs are
/// visited in corpus order.
pub fn induce_ags(corpus: &AnnotatedCorpus, registry: &ClassRegistry) -> ClassRegistry {
    let mut out = registry.clone();
    for sentence in &corpus.sentences {
        for (key, norm) in sentence.keys().iter().zip(sentence.norms()) {
            if out.generators(key, norm).is_empty() {
                out.add_generated(key, norm);
            }
        }
    }
    out
}

/// For every class, the number of corpus pairs it reproduces.
pub fn count_matches(corpus: &AnnotatedCorpus, registry: &ClassRegistry) -> Vec<u64> {
    let mut counts = vec![0u64; registry.len()];
    for sentence in &corpus.sentences {
        for (key, norm) in sentence.keys().iter().zip(sentence.norms()) {
            for id in registry.generators(key, norm) {
                counts[id.index()] += 1;
            }
        }
    }
    counts
}

/// Labels every token with its least frequent generating class, using
/// counts from a full first pass over the corpus. Ties go to the class
/// earlier in the registry.
pub fn label_corpus(corpus: &AnnotatedCorpus, registry: &ClassRegistry) -> Result<Vec<LabeledSentence>, CoverageError> {
    let counts = count_matches(corpus, registry);
    label_with_counts(corpus, registry, &counts)
}

pub fn label_with_counts(
    corpus: &AnnotatedCorpus,
    registry: &ClassRegistry,
    counts: &[u64],
) -> Result<Vec<LabeledSentence>, CoverageError> {
    corpus
        .sentences
        .iter()
        .enumerate()
        .map(|(i, sentence)| {
            let labels = sentence
                .keys()
                .iter()
                .zip(sentence.norms())
                .map(|(key, norm)| {
                    registry
                        .generators(key, norm)
                        .into_iter()
                        .min_by_key(|id| (counts[id.index()], *id))
                        .ok_or_else(|| CoverageError { sentence: i, token: key.clone(), norm: norm.to_string() })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(LabeledSentence { tokens: sentence.keys().to_vec(), labels })
        })
        .collect()
}

/// Result of preparing a training corpus.
#[derive(Clone, Debug)]
pub struct Induction {
    /// Registry with generated classes and match counts as frequencies.
    pub registry: ClassRegistry,
    pub labeled: Vec<LabeledSentence>,
    pub stats: CoverageStats,
}

/// Induces generated classes, freezes frequencies and labels the corpus.
pub fn induce(corpus: &AnnotatedCorpus, predefined: &ClassRegistry) -> Result<Induction, CoverageError> {
    let mut registry = induce_ags(corpus, predefined);
    let counts = count_matches(corpus, &registry);
    let labeled = label_with_counts(corpus, &registry, &counts)?;
    registry.set_freqs(counts);
    let stats = CoverageStats::new(corpus, &registry, &labeled, predefined.len());
    Ok(Induction { registry, labeled, stats })
}

/// How the training pairs are explained.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageStats {
    pub sentences: usize,
    pub pairs: usize,
    /// Pairs whose spoken form equals the token (plain words).
    pub self_pairs: usize,
    /// Pairs labeled with a predefined class.
    pub predefined_pairs: usize,
    /// Pairs labeled with a generated class.
    pub generated_pairs: usize,
    /// Non-silent, non-self pairs and how many of those are labeled with a
    /// generated class.
    pub normalized_pairs: usize,
    pub normalized_by_generated: usize,
    pub generated_classes: usize,
    pub new_generated_classes: usize,
}

impl CoverageStats {
    fn new(
        corpus: &AnnotatedCorpus,
        registry: &ClassRegistry,
        labeled: &[LabeledSentence],
        previous_len: usize,
    ) -> Self {
        let mut stats = CoverageStats {
            sentences: corpus.len(),
            generated_classes: registry.generated_len(),
            new_generated_classes: registry.len() - previous_len,
            ..Default::default()
        };
        for (sentence, labels) in corpus.sentences.iter().zip(labeled) {
            for ((unnorm, norm), &label) in sentence.pairs().iter().zip(&labels.labels) {
                stats.pairs += 1;
                let generated = registry.kind(label) == ClassKind::AutoGenerated;
                if generated {
                    stats.generated_pairs += 1;
                } else {
                    stats.predefined_pairs += 1;
                }
                if unnorm == norm {
                    stats.self_pairs += 1;
                } else if !norm.is_empty() {
                    stats.normalized_pairs += 1;
                    stats.normalized_by_generated += usize::from(generated);
                }
            }
        }
        stats
    }

    /// Share of non-self, non-silent normalizations handled by generated
    /// classes.
    pub fn generated_share(&self) -> f64 {
        if self.normalized_pairs == 0 {
            0.0
        } else {
            self.normalized_by_generated as f64 / self.normalized_pairs as f64
        }
    }

    /// Share of pairs whose spoken form differs from the token.
    pub fn non_self_share(&self) -> f64 {
        if self.pairs == 0 {
            0.0
        } else {
            (self.pairs - self.self_pairs) as f64 / self.pairs as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Profile;
    use crate::realign::Realigner;

    fn corpus(lines: &[&str]) -> AnnotatedCorpus {
        AnnotatedCorpus::parse(&lines.join("\n"), &Realigner::new(&Profile::english())).unwrap()
    }

    fn english() -> ClassRegistry {
        ClassRegistry::from_profile(&Profile::english()).unwrap()
    }

    fn names(reg: &ClassRegistry, labels: &[ClassId]) -> Vec<String> {
        labels.iter().map(|&id| reg.name(id).to_string()).collect()
    }

    const DATE: &str =
        r#"{"source":"1/1/2020","pairs":[["1","first"],["/","of"],["1","January"],["/",""],["2020","twenty twenty"]]}"#;

    #[test]
    fn generates_class_for_unexplained_pair() {
        let c = corpus(&[r#"{"source":"12","pairs":[["12","December"]]}"#]);
        let reg = induce_ags(&c, &english());
        assert_eq!(reg.generated_len(), 1);
        assert_eq!(reg.name(ClassId(reg.predefined_len() as u32)), "12_to_December_AG");
    }

    #[test]
    fn no_class_when_predefined_covers() {
        let c = corpus(&[r#"{"source":"2","pairs":[["2","two"]]}"#]);
        assert_eq!(induce_ags(&c, &english()).generated_len(), 0);
    }

    #[test]
    fn several_generated_classes_per_token() {
        let c = corpus(&[
            r#"{"source":"12","pairs":[["12","December"]]}"#,
            r#"{"source":"12","pairs":[["12","twelve o'clock"]]}"#,
            r#"{"source":"12","pairs":[["12","December"]]}"#,
        ]);
        let reg = induce_ags(&c, &english());
        assert_eq!(reg.candidate_classes("12")[3..], ["12_to_December_AG", "12_to_twelve_o'clock_AG"]);
    }

    #[test]
    fn labels_date_example() {
        let c = corpus(&[DATE]);
        let induction = induce(&c, &english()).unwrap();
        assert_eq!(
            names(&induction.registry, &induction.labeled[0].labels),
            ["ordinal", "/_to_of_AG", "1_to_January_AG", "sil", "year"]
        );
    }

    #[test]
    fn least_frequent_class_wins() {
        // "2" → "two" is reproduced by cardinal and digit; digit matches less
        // often here, so it is chosen.
        let c =
            corpus(&[r#"{"source":"2","pairs":[["2","two"]]}"#, r#"{"source":"45","pairs":[["45","forty five"]]}"#]);
        let induction = induce(&c, &english()).unwrap();
        let reg = &induction.registry;
        assert_eq!(reg.freq(reg.lookup("cardinal").unwrap()), 2);
        assert_eq!(reg.freq(reg.lookup("digit").unwrap()), 1);
        assert_eq!(names(reg, &induction.labeled[0].labels), ["digit"]);
        assert_eq!(names(reg, &induction.labeled[1].labels), ["cardinal"]);
    }

    #[test]
    fn ties_break_by_registry_order() {
        let c = corpus(&[r#"{"source":"2","pairs":[["2","two"]]}"#]);
        let induction = induce(&c, &english()).unwrap();
        assert_eq!(names(&induction.registry, &induction.labeled[0].labels), ["cardinal"]);
    }

    #[test]
    fn plain_word_is_self() {
        let c = corpus(&[r#"{"source":"hello","pairs":[["hello","hello"]]}"#]);
        let induction = induce(&c, &english()).unwrap();
        assert_eq!(names(&induction.registry, &induction.labeled[0].labels), ["self"]);
    }

    #[test]
    fn coverage_error_without_induction() {
        let c = corpus(&[r#"{"source":"12","pairs":[["12","December"]]}"#]);
        let err = label_corpus(&c, &english()).unwrap_err();
        assert_eq!(err.token, "12");
    }

    #[test]
    fn stats_count_generated_share() {
        let c = corpus(&[DATE, r#"{"source":"hi","pairs":[["hi","hi"]]}"#]);
        let stats = induce(&c, &english()).unwrap().stats;
        assert_eq!(stats.pairs, 6);
        assert_eq!(stats.self_pairs, 1);
        assert_eq!(stats.generated_pairs, 2);
        assert_eq!(stats.normalized_pairs, 4);
        assert_eq!(stats.normalized_by_generated, 2);
        assert_eq!(stats.new_generated_classes, 2);
        assert!((stats.generated_share() - 0.5).abs() < 1e-12);
    }
}
