//! Annotated corpus files.
//!
//! One JSON record per line, UTF-8:
//!
//! ```text
//! # language: en
//! {"source":"1/1/2020","pairs":[["1","first"],["/","of"],["1","January"],["/",""],["2020","twenty twenty"]]}
//! ```
//!
//! `pairs` lists the granular tokens of `source` (after currency/measure
//! realignment) with their spoken forms; an empty norm means silence. The
//! optional `# language:` header names the profile. Other `#` lines and
//! blank lines are ignored.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::realign::Realigner;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot access corpus {path}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}", parse_message(*.line, .message))]
    Parse { line: usize, message: String },
    #[error("{} misaligned sentence(s):\n{}", .0.len(), join_issues(.0))]
    Alignment(Vec<AlignmentIssue>),
}

fn parse_message(line: usize, message: &str) -> String {
    if line == 0 {
        message.to_string()
    } else {
        format!("line {line}: {message}")
    }
}

fn join_issues(issues: &[AlignmentIssue]) -> String {
    issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n")
}

/// An annotation whose token list disagrees with the tokenizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlignmentIssue {
    /// 1-based line in the corpus file, 0 when not read from a file.
    pub line: usize,
    pub source: String,
    pub expected: Vec<String>,
    pub found: Vec<String>,
}

impl fmt::Display for AlignmentIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}: {:?} tokenizes as {:?} but is annotated as {:?}",
            self.line, self.source, self.expected, self.found
        )
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    source: String,
    pairs: Vec<(String, String)>,
}

/// A source sentence with one spoken form per granular token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatedSentence {
    source: String,
    pairs: Vec<(String, String)>,
    keys: Vec<String>,
}

impl AnnotatedSentence {
    /// Checks the annotation against the tokenizer.
    pub fn new(
        source: impl Into<String>,
        pairs: Vec<(String, String)>,
        realigner: &Realigner,
    ) -> Result<Self, AlignmentIssue> {
        let source = source.into();
        let tokens = realigner.segment(&source);
        let aligned =
            tokens.len() == pairs.len() && tokens.iter().zip(&pairs).all(|(t, (unnorm, _))| &t.text == unnorm);
        if !aligned {
            return Err(AlignmentIssue {
                line: 0,
                expected: tokens.into_iter().map(|t| t.text).collect(),
                found: pairs.into_iter().map(|(u, _)| u).collect(),
                source,
            });
        }
        let keys = tokens.iter().map(|t| t.key().into_owned()).collect();
        Ok(AnnotatedSentence { source, pairs, keys })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// `(unnormalized token, spoken form)` pairs in spoken order.
    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    /// Class keys of the tokens (token text plus context tag).
    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn norms(&self) -> impl Iterator<Item = &str> {
        self.pairs.iter().map(|(_, n)| n.as_str())
    }

    /// The reference spoken sentence: non-empty norms joined by spaces.
    pub fn reference(&self) -> String {
        self.norms().filter(|n| !n.is_empty()).collect::<Vec<_>>().join(" ")
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnnotatedCorpus {
    pub language: Option<String>,
    pub sentences: Vec<AnnotatedSentence>,
}

impl AnnotatedCorpus {
    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(AnnotatedSentence::len).sum()
    }

    /// Parses corpus text. All misaligned records are reported together.
    pub fn parse(text: &str, realigner: &Realigner) -> Result<Self, CorpusError> {
        let mut corpus = AnnotatedCorpus::default();
        let mut issues = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                if let Some(lang) = comment.trim().strip_prefix("language:") {
                    corpus.language = Some(lang.trim().to_string());
                }
                continue;
            }
            let record: Record = serde_json::from_str(trimmed)
                .map_err(|e| CorpusError::Parse { line: line_no, message: e.to_string() })?;
            match AnnotatedSentence::new(record.source, record.pairs, realigner) {
                Ok(sentence) => corpus.sentences.push(sentence),
                Err(mut issue) => {
                    issue.line = line_no;
                    issues.push(issue);
                }
            }
        }
        if !issues.is_empty() {
            return Err(CorpusError::Alignment(issues));
        }
        if corpus.sentences.is_empty() {
            return Err(CorpusError::Parse { line: 0, message: "no sentences".into() });
        }
        Ok(corpus)
    }

    /// Canonical text form: optional language header, then one compact JSON
    /// record per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(lang) = &self.language {
            out.push_str("# language: ");
            out.push_str(lang);
            out.push('\n');
        }
        for s in &self.sentences {
            let record = Record { source: s.source.clone(), pairs: s.pairs.clone() };
            out.push_str(&serde_json::to_string(&record).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CorpusError> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })
    }

    /// Seeded shuffle, then the first `floor(n * train_fraction)` sentences
    /// train and the rest test. Each part keeps corpus order.
    pub fn split(&self, train_fraction: f64, seed: u64) -> (AnnotatedCorpus, AnnotatedCorpus) {
        assert!(train_fraction > 0.0 && train_fraction < 1.0, "train fraction must be in (0, 1), got {train_fraction}");
        let n = self.sentences.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let n_train = ((n as f64) * train_fraction + 1e-9).floor() as usize;
        let mut in_train = vec![false; n];
        for &i in &order[..n_train] {
            in_train[i] = true;
        }
        let mut train = AnnotatedCorpus { language: self.language.clone(), sentences: Vec::new() };
        let mut test = train.clone();
        for (i, s) in self.sentences.iter().enumerate() {
            if in_train[i] {
                train.sentences.push(s.clone());
            } else {
                test.sentences.push(s.clone());
            }
        }
        (train, test)
    }
}

pub fn load_corpus(path: impl AsRef<Path>, realigner: &Realigner) -> Result<AnnotatedCorpus, CorpusError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })?;
    AnnotatedCorpus::parse(&text, realigner)
}

pub fn split_corpus(corpus: &AnnotatedCorpus, train_fraction: f64, seed: u64) -> (AnnotatedCorpus, AnnotatedCorpus) {
    corpus.split(train_fraction, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Profile;

    const DATE: &str =
        r#"{"source":"1/1/2020","pairs":[["1","first"],["/","of"],["1","January"],["/",""],["2020","twenty twenty"]]}"#;

    fn realigner() -> Realigner {
        Realigner::new(&Profile::english())
    }

    fn numbered(n: usize) -> AnnotatedCorpus {
        let text: String =
            (0..n).map(|i| format!("{{\"source\":\"w{i}\",\"pairs\":[[\"w\",\"w\"],[\"{i}\",\"x\"]]}}\n")).collect();
        AnnotatedCorpus::parse(&text, &realigner()).unwrap()
    }

    #[test]
    fn parses_date_record() {
        let corpus = AnnotatedCorpus::parse(DATE, &realigner()).unwrap();
        assert_eq!(corpus.len(), 1);
        let s = &corpus.sentences[0];
        assert_eq!(s.len(), 5);
        assert_eq!(s.pairs()[3], ("/".to_string(), String::new()));
        assert_eq!(s.reference(), "first of January twenty twenty");
    }

    #[test]
    fn empty_file_is_parse_error() {
        let err = AnnotatedCorpus::parse("", &realigner()).unwrap_err();
        assert!(matches!(err, CorpusError::Parse { .. }));
        assert_eq!(err.to_string(), "no sentences");
    }

    #[test]
    fn malformed_record_reports_line() {
        let text = format!("{DATE}\n{{\"source\": 3}}\n");
        match AnnotatedCorpus::parse(&text, &realigner()).unwrap_err() {
            CorpusError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unsplit_token_is_misaligned() {
        let text = format!("# language: en\n{DATE}\n{}\n", r#"{"source":"C3PO","pairs":[["C3PO","see threepio"]]}"#);
        match AnnotatedCorpus::parse(&text, &realigner()).unwrap_err() {
            CorpusError::Alignment(issues) => {
                assert_eq!(issues.len(), 1);
                assert_eq!(issues[0].line, 3);
                assert_eq!(issues[0].expected, ["C", "3", "PO"]);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn currency_keys_carry_tag() {
        let text =
            r#"{"source":"$45.18","pairs":[["45","forty five"],["$","dollars"],["18","eighteen"],[".","cents"]]}"#;
        let corpus = AnnotatedCorpus::parse(text, &realigner()).unwrap();
        assert_eq!(corpus.sentences[0].keys(), ["45", "$", "18", "./currency"]);
    }

    #[test]
    fn canonical_round_trip() {
        let text = format!("# language: en\n{DATE}\n");
        let corpus = AnnotatedCorpus::parse(&text, &realigner()).unwrap();
        assert_eq!(corpus.language.as_deref(), Some("en"));
        assert_eq!(corpus.to_text(), text);
    }

    #[test]
    fn split_sizes() {
        let (train, test) = numbered(10).split(0.6, 7);
        assert_eq!((train.len(), test.len()), (6, 4));
        let (train, test) = numbered(5).split(0.6, 7);
        assert_eq!((train.len(), test.len()), (3, 2));
    }

    #[test]
    fn split_is_deterministic_and_partitions() {
        let corpus = numbered(50);
        let a = corpus.split(0.6, 42);
        let b = corpus.split(0.6, 42);
        assert_eq!(a, b);
        let mut all: Vec<&str> = a.0.sentences.iter().chain(&a.1.sentences).map(|s| s.source()).collect();
        all.sort();
        let mut expected: Vec<&str> = corpus.sentences.iter().map(|s| s.source()).collect();
        expected.sort();
        assert_eq!(all, expected);
        let c = corpus.split(0.6, 43);
        assert_ne!(a.0, c.0);
    }

    #[test]
    #[should_panic(expected = "train fraction")]
    fn split_rejects_bad_fraction() {
        numbered(3).split(1.0, 0);
    }
}
