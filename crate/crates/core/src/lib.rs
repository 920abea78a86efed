//! Text normalization for speech synthesis.
//!
//! Sentences are split into granular tokens at every unicode class change,
//! currency and measure spans are reordered into spoken order, and each
//! token is assigned a normalization class by a CRF whose choices are
//! restricted to classes that accept the token. Besides a small predefined
//! set (numbers, years, spelling, silence, …), classes are induced from an
//! annotated corpus: every observed token → spoken-form pair that no
//! predefined class produces becomes its own auto-generated class.
//!
//! ```
//! use tnorm::tokenizer::tokenize;
//! let texts: Vec<_> = tokenize("C3PO").into_iter().map(|t| t.text).collect();
//! assert_eq!(texts, ["C", "3", "PO"]);
//! ```

pub mod classes;
pub mod corpus;
pub mod eval;
pub mod induction;
pub mod model;
pub mod pipeline;
pub mod profile;
pub mod realign;
pub mod synthetic;
pub mod tagger;
pub mod tokenizer;

pub use classes::{ClassError, ClassId, ClassKind, ClassRegistry, NormalizationClass};
pub use corpus::{load_corpus, split_corpus, AnnotatedCorpus, AnnotatedSentence, CorpusError};
pub use eval::{evaluate, word_edit_distance, EvalReport};
pub use induction::{induce, induce_ags, CoverageError, CoverageStats, Induction};
pub use model::{ModelError, TrainedModel};
pub use pipeline::{normalize_sentence, NormalizationResult, Pipeline};
pub use profile::{Profile, ProfileError};
pub use realign::{detect_protected_spans, realign, ProtectedSpan, Realigner};
pub use tagger::{train, Hyper, TaggerError, TaggerModel};
pub use tokenizer::{tokenize, Token, UnicodeClass};
