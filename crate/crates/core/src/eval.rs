//! Word error rate and token accuracy.
//!
//! WER is word-level Levenshtein distance between the normalized output and
//! the reference, per reference word, summed over the whole corpus (micro).
//! The per-sentence average (macro) is reported alongside.
//!
//! A token counts as correct when its predicted class reproduces the
//! annotated spoken form, whichever class that is: cardinal and digit both
//! turn "2" into "two", and either choice is right.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classes::ClassKind;
use crate::corpus::{AnnotatedCorpus, AnnotatedSentence};
use crate::pipeline::Pipeline;

/// Label used for tokens whose annotation no class can produce.
pub const UNSEEN_CLASS: &str = "<unseen>";

/// Minimum number of word insertions, deletions and substitutions turning
/// `hyp` into `reference`.
pub fn word_edit_distance(hyp: &str, reference: &str) -> usize {
    let h: Vec<&str> = hyp.split_whitespace().collect();
    let r: Vec<&str> = reference.split_whitespace().collect();
    edit_distance(&h, &r)
}

pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = diag + usize::from(x != y);
            diag = row[j + 1];
            row[j + 1] = sub.min(row[j] + 1).min(row[j + 1] + 1);
        }
    }
    row[b.len()]
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub class: String,
    pub count: usize,
    pub correct: usize,
    /// Percent of all evaluated tokens.
    pub proportion: f64,
    pub accuracy: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub sentences: usize,
    pub tokens: usize,
    pub reference_words: usize,
    pub edits: usize,
    /// Corpus-level WER in percent.
    pub wer: f64,
    /// Mean of per-sentence WERs in percent (sentences with an empty
    /// reference are skipped).
    pub macro_wer: f64,
    pub correct_tokens: usize,
    pub accuracy: f64,
    pub unresolved_tokens: usize,
    /// Tokens whose reference equals the token text, and accuracy on them.
    pub self_tokens: usize,
    pub self_accuracy: f64,
    pub other_tokens: usize,
    pub other_accuracy: f64,
    /// Correctly normalized non-self, non-silent tokens, and the share of
    /// those whose class was auto-generated.
    pub normalized_correct: usize,
    pub generated_share: f64,
    /// Keyed by the class the labeling rule would assign to the reference.
    pub per_class: Vec<ClassReport>,
}

#[derive(Default)]
struct Tally {
    sentences: usize,
    tokens: usize,
    reference_words: usize,
    edits: usize,
    sentence_wer_sum: f64,
    sentence_wer_count: usize,
    correct: usize,
    unresolved: usize,
    self_tokens: usize,
    self_correct: usize,
    normalized_correct: usize,
    normalized_by_generated: usize,
    per_class: BTreeMap<String, (usize, usize)>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.sentences += other.sentences;
        self.tokens += other.tokens;
        self.reference_words += other.reference_words;
        self.edits += other.edits;
        self.sentence_wer_sum += other.sentence_wer_sum;
        self.sentence_wer_count += other.sentence_wer_count;
        self.correct += other.correct;
        self.unresolved += other.unresolved;
        self.self_tokens += other.self_tokens;
        self.self_correct += other.self_correct;
        self.normalized_correct += other.normalized_correct;
        self.normalized_by_generated += other.normalized_by_generated;
        for (k, (n, c)) in other.per_class {
            let e = self.per_class.entry(k).or_default();
            e.0 += n;
            e.1 += c;
        }
        self
    }
}

fn percent(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

fn score_sentence(pipeline: &Pipeline, sentence: &AnnotatedSentence) -> Tally {
    let registry = pipeline.registry();
    let result = pipeline.normalize(sentence.source());
    assert_eq!(
        result.tokens.len(),
        sentence.len(),
        "corpus and pipeline disagree on tokenization of {:?}",
        sentence.source()
    );
    let reference = sentence.reference();
    let edits = word_edit_distance(&result.output, &reference);
    let reference_words = reference.split_whitespace().count();

    let mut t = Tally { sentences: 1, edits, reference_words, ..Default::default() };
    if reference_words > 0 {
        t.sentence_wer_sum = edits as f64 / reference_words as f64;
        t.sentence_wer_count = 1;
    }
    for (i, ((unnorm, norm), key)) in sentence.pairs().iter().zip(sentence.keys()).enumerate() {
        t.tokens += 1;
        let predicted = result.classes[i];
        let correct = result.normalizations[i].as_deref() == Some(norm.as_str());
        t.correct += usize::from(correct);
        t.unresolved += usize::from(predicted.is_none());
        if unnorm == norm {
            t.self_tokens += 1;
            t.self_correct += usize::from(correct);
        } else if correct && !norm.is_empty() {
            t.normalized_correct += 1;
            let generated = predicted.is_some_and(|c| registry.kind(c) == ClassKind::AutoGenerated);
            t.normalized_by_generated += usize::from(generated);
        }
        let gold = registry
            .generators(key, norm)
            .into_iter()
            .min_by_key(|&c| (registry.freq(c), c))
            .map_or(UNSEEN_CLASS, |c| registry.name(c));
        let e = t.per_class.entry(gold.to_string()).or_default();
        e.0 += 1;
        e.1 += usize::from(correct);
    }
    t
}

/// Normalizes every sentence of `corpus` and scores the output. Sentences
/// are processed in parallel; all aggregates are integer counts merged in
/// corpus order, so the report does not depend on scheduling.
pub fn evaluate(pipeline: &Pipeline, corpus: &AnnotatedCorpus) -> EvalReport {
    let tallies: Vec<Tally> = corpus.sentences.par_iter().map(|s| score_sentence(pipeline, s)).collect();
    let t = tallies.into_iter().fold(Tally::default(), Tally::merge);

    let mut per_class: Vec<ClassReport> = t
        .per_class
        .into_iter()
        .map(|(class, (count, correct))| ClassReport {
            class,
            count,
            correct,
            proportion: percent(count, t.tokens),
            accuracy: percent(correct, count),
        })
        .collect();
    per_class.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.class.cmp(&b.class)));
    let other_tokens = t.tokens - t.self_tokens;
    EvalReport {
        sentences: t.sentences,
        tokens: t.tokens,
        reference_words: t.reference_words,
        edits: t.edits,
        wer: percent(t.edits, t.reference_words),
        macro_wer: if t.sentence_wer_count == 0 {
            0.0
        } else {
            100.0 * t.sentence_wer_sum / t.sentence_wer_count as f64
        },
        correct_tokens: t.correct,
        accuracy: percent(t.correct, t.tokens),
        unresolved_tokens: t.unresolved,
        self_tokens: t.self_tokens,
        self_accuracy: percent(t.self_correct, t.self_tokens),
        other_tokens,
        other_accuracy: percent(t.correct - t.self_correct, other_tokens),
        normalized_correct: t.normalized_correct,
        generated_share: if t.normalized_correct == 0 {
            0.0
        } else {
            t.normalized_by_generated as f64 / t.normalized_correct as f64
        },
        per_class,
    }
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Plain-text report with a per-class table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "sentences        {}", self.sentences);
        let _ = writeln!(out, "tokens           {}", self.tokens);
        let _ = writeln!(out, "reference words  {}", self.reference_words);
        let _ = writeln!(out, "word edits       {}", self.edits);
        let _ = writeln!(out, "WER (micro)      {:.2}", self.wer);
        let _ = writeln!(out, "WER (macro)      {:.2}", self.macro_wer);
        let _ = writeln!(out, "accuracy         {:.2}", self.accuracy);
        let _ = writeln!(out, "  self tokens    {:.2} ({} tokens)", self.self_accuracy, self.self_tokens);
        let _ = writeln!(out, "  other tokens   {:.2} ({} tokens)", self.other_accuracy, self.other_tokens);
        let _ = writeln!(out, "unresolved       {}", self.unresolved_tokens);
        let _ = writeln!(
            out,
            "auto-generated   {:.1}% of {} correct normalizations",
            100.0 * self.generated_share,
            self.normalized_correct
        );
        let _ = writeln!(out);
        let width = self.per_class.iter().map(|c| c.class.chars().count()).max().unwrap_or(5).max(5);
        let _ = writeln!(out, "{:<width$}  {:>7}  {:>8}  {:>8}", "class", "tokens", "share%", "acc%");
        for c in &self.per_class {
            let _ = writeln!(out, "{:<width$}  {:>7}  {:>8.2}  {:>8.2}", c.class, c.count, c.proportion, c.accuracy);
        }
        out
    }
}
