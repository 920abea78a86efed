//! Currency and measure realignment.
//!
//! Amounts such as `$45.18` and measures such as `3 m²` are not read left to
//! right. They are detected before granular tokenization, kept out of the
//! ordinary split, and their pieces are reordered into spoken order:
//! `$45.18` → `45 $ 18 .` and `3 m²` → `3 ² m`. Each reordered piece is then
//! classified like any other token.

use regex::{Captures, Regex};

use crate::profile::Profile;
use crate::tokenizer::{tokenize_at, unicode_class_of, Token, UnicodeClass};

/// Tag carried by the decimal mark of a currency amount, so its class key
/// (`./currency`) never collides with the ordinary full stop.
pub const CURRENCY_TAG: &str = "currency";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpanKind {
    Currency,
    Measure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpanParts {
    Currency { symbol: Token, integer: Token, mark: Option<Token>, fraction: Option<Token> },
    Measure { number: Token, unit: Token, exponent: Option<Token> },
}

/// A detected currency or measure expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtectedSpan {
    pub start: usize,
    pub end: usize,
    pub parts: SpanParts,
}

impl ProtectedSpan {
    pub fn kind(&self) -> SpanKind {
        match self.parts {
            SpanParts::Currency { .. } => SpanKind::Currency,
            SpanParts::Measure { .. } => SpanKind::Measure,
        }
    }

    /// Pieces in source order.
    pub fn original(&self) -> Vec<&Token> {
        let mut out: Vec<&Token> = match &self.parts {
            SpanParts::Currency { symbol, integer, mark, fraction } => {
                [Some(symbol), Some(integer), mark.as_ref(), fraction.as_ref()].into_iter().flatten().collect()
            }
            SpanParts::Measure { number, unit, exponent } => {
                [Some(number), Some(unit), exponent.as_ref()].into_iter().flatten().collect()
            }
        };
        out.sort_by_key(|t| t.start);
        out
    }
}

/// Pieces of `span` in spoken order: `[integer, symbol, fraction, mark]`
/// for currency (fraction and mark only when present) and
/// `[number, exponent, unit]` for measures.
pub fn realign(span: &ProtectedSpan) -> Vec<Token> {
    match &span.parts {
        SpanParts::Currency { symbol, integer, mark, fraction } => {
            let mut out = vec![integer.clone(), symbol.clone()];
            if let (Some(mark), Some(fraction)) = (mark, fraction) {
                out.push(fraction.clone());
                out.push(mark.clone());
            }
            out
        }
        SpanParts::Measure { number, unit, exponent } => {
            let mut out = vec![number.clone()];
            out.extend(exponent.clone());
            out.push(unit.clone());
            out
        }
    }
}

/// Compiled currency and measure patterns for one profile.
#[derive(Clone, Debug)]
pub struct Realigner {
    currency: Option<Regex>,
    measure: Option<Regex>,
}

fn alternation(items: &[String]) -> String {
    let mut sorted: Vec<&String> = items.iter().collect();
    // longest first so "km" wins over "m"
    sorted.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    sorted.dedup();
    sorted.iter().map(|s| regex::escape(s)).collect::<Vec<_>>().join("|")
}

fn piece(caps: &Captures<'_>, name: &str, tag: Option<&'static str>) -> Option<Token> {
    caps.name(name).map(|m| {
        let text = m.as_str();
        let first = text.chars().next().expect("non-empty group");
        let mut token = Token::new(text, unicode_class_of(first), m.start());
        token.protected = true;
        token.tag = tag;
        token
    })
}

fn is_word_char(ch: char) -> bool {
    matches!(unicode_class_of(ch), UnicodeClass::Letter(_) | UnicodeClass::Digit)
}

impl Realigner {
    pub fn new(profile: &Profile) -> Self {
        let currency = (!profile.currency.symbols.is_empty()).then(|| {
            let sym = alternation(&profile.currency.symbols);
            let mark = alternation(&profile.currency.decimal_marks);
            let pattern = format!(
                r"(?P<sym>{sym})(?P<int>\d+)(?:(?P<mark>{mark})(?P<frac>\d+))?|(?P<int2>\d+)(?:(?P<mark2>{mark})(?P<frac2>\d+))?(?P<sym2>{sym})"
            );
            Regex::new(&pattern).expect("escaped inventory compiles")
        });
        let measure = (!profile.measure.units.is_empty()).then(|| {
            let unit = alternation(&profile.measure.units);
            let exponent = if profile.measure.exponents.is_empty() {
                String::new()
            } else {
                format!("(?P<exp>{})?", alternation(&profile.measure.exponents))
            };
            let pattern = format!(r"(?P<num>\d+)[ \u{{a0}}]?(?P<unit>{unit}){exponent}");
            Regex::new(&pattern).expect("escaped inventory compiles")
        });
        Realigner { currency, measure }
    }

    /// Non-overlapping spans in source order. Currency wins over measure
    /// where the two overlap.
    pub fn detect(&self, sentence: &str) -> Vec<ProtectedSpan> {
        let mut spans = Vec::new();
        if let Some(re) = &self.currency {
            for caps in re.captures_iter(sentence) {
                let whole = caps.get(0).expect("match");
                let parts = if caps.name("sym").is_some() {
                    SpanParts::Currency {
                        symbol: piece(&caps, "sym", None).expect("matched"),
                        integer: piece(&caps, "int", None).expect("matched"),
                        mark: piece(&caps, "mark", Some(CURRENCY_TAG)),
                        fraction: piece(&caps, "frac", None),
                    }
                } else {
                    SpanParts::Currency {
                        symbol: piece(&caps, "sym2", None).expect("matched"),
                        integer: piece(&caps, "int2", None).expect("matched"),
                        mark: piece(&caps, "mark2", Some(CURRENCY_TAG)),
                        fraction: piece(&caps, "frac2", None),
                    }
                };
                spans.push(ProtectedSpan { start: whole.start(), end: whole.end(), parts });
            }
        }
        if let Some(re) = &self.measure {
            let mut at = 0;
            while at <= sentence.len() {
                let Some(caps) = re.captures_at(sentence, at) else { break };
                let whole = caps.get(0).expect("match");
                let bounded = sentence[whole.end()..].chars().next().is_none_or(|c| !is_word_char(c))
                    && sentence[..whole.start()]
                        .chars()
                        .next_back()
                        .is_none_or(|c| unicode_class_of(c) != UnicodeClass::Digit);
                let free = spans.iter().all(|s| whole.end() <= s.start || whole.start() >= s.end);
                if bounded && free {
                    spans.push(ProtectedSpan {
                        start: whole.start(),
                        end: whole.end(),
                        parts: SpanParts::Measure {
                            number: piece(&caps, "num", None).expect("matched"),
                            unit: piece(&caps, "unit", None).expect("matched"),
                            exponent: piece(&caps, "exp", None),
                        },
                    });
                    at = whole.end();
                } else {
                    // retry from the next character; a shorter unit may still fit
                    at = whole.start() + sentence[whole.start()..].chars().next().map_or(1, char::len_utf8);
                }
            }
        }
        spans.sort_by_key(|s| s.start);
        spans
    }

    /// Granular tokens with protected spans replaced by their realigned
    /// pieces. This is the token sequence annotations and classes see.
    pub fn segment(&self, sentence: &str) -> Vec<Token> {
        let mut tokens = Vec::new();
        let mut cursor = 0;
        for span in self.detect(sentence) {
            tokens.extend(tokenize_at(&sentence[cursor..span.start], cursor));
            tokens.extend(realign(&span));
            cursor = span.end;
        }
        tokens.extend(tokenize_at(&sentence[cursor..], cursor));
        tokens
    }
}

pub fn detect_protected_spans(sentence: &str, profile: &Profile) -> Vec<ProtectedSpan> {
    Realigner::new(profile).detect(sentence)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn english() -> Realigner {
        Realigner::new(&Profile::english())
    }

    fn texts(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.text.as_str()).collect()
    }

    #[test]
    fn currency_with_fraction() {
        let spans = english().detect("$45.18");
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0].kind(), SpanKind::Currency);
        let original: Vec<&str> = spans[0].original().iter().map(|t| t.text.as_str()).collect();
        assert_eq!(original, ["$", "45", ".", "18"]);
        let reordered = realign(&spans[0]);
        assert_eq!(texts(&reordered), ["45", "$", "18", "."]);
        assert_eq!(reordered[3].key(), "./currency");
        assert!(reordered.iter().all(|t| t.protected));
    }

    #[test]
    fn currency_without_fraction() {
        let spans = english().detect("$2");
        assert_eq!(texts(&realign(&spans[0])), ["2", "$"]);
        // trailing full stop is not a decimal mark
        let tokens = english().segment("It costs $2.");
        assert_eq!(texts(&tokens), ["It", "costs", "2", "$", "."]);
        assert_eq!(tokens[4].key(), ".");
    }

    #[test]
    fn suffix_currency() {
        let tokens = english().segment("12.50€ each");
        assert_eq!(texts(&tokens), ["12", "€", "50", ".", "each"]);
    }

    #[test]
    fn measure_with_exponent() {
        let spans = english().detect("3 m²");
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0].kind(), SpanKind::Measure);
        assert_eq!(texts(&realign(&spans[0])), ["3", "²", "m"]);
    }

    #[test]
    fn measure_needs_word_boundary() {
        assert!(english().detect("5 miles").is_empty());
        assert!(english().detect("5 mice").is_empty());
        assert_eq!(texts(&english().segment("5km away")), ["5", "km", "away"]);
        assert_eq!(texts(&english().segment("ran 10 mi.")), ["ran", "10", "mi", "."]);
    }

    #[test]
    fn no_spans_in_plain_text() {
        assert!(english().detect("hello world").is_empty());
        assert!(english().detect("").is_empty());
    }

    #[test]
    fn spans_do_not_overlap() {
        let spans = english().detect("$5 m and 7 kg for £3.10");
        assert_eq!(spans.len(), 3);
        for pair in spans.windows(2) {
            assert!(pair[0].end <= pair[1].start);
        }
    }

    #[test]
    fn symbol_run_is_split_at_span() {
        let tokens = english().segment("($5)");
        assert_eq!(texts(&tokens), ["(", "5", "$", ")"]);
    }

    #[test]
    fn multi_char_symbol_is_one_protected_token() {
        let mut profile = Profile::english();
        profile.currency.symbols.push("US$".into());
        let tokens = Realigner::new(&profile).segment("US$7");
        assert_eq!(texts(&tokens), ["7", "US$"]);
    }

    #[test]
    fn empty_inventories_disable_detection() {
        let mut profile = Profile::english();
        profile.currency.symbols.clear();
        profile.measure.units.clear();
        let r = Realigner::new(&profile);
        assert!(r.detect("$4 5 km").is_empty());
        assert_eq!(texts(&r.segment("$4")), ["$", "4"]);
    }
}
