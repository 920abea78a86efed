//! Granular tokenizer.
//!
//! Text is first split on whitespace and each chunk is then split again at
//! every change of [`UnicodeClass`]. `"C3PO"` becomes `["C", "3", "PO"]` and a
//! date such as `"1/1/2020"` becomes `["1", "/", "1", "/", "2020"]`.
//!
//! Letters carry their script, so a run of Tamil letters followed by Latin
//! letters is two tokens. Case changes never split.

use std::borrow::Cow;
use std::fmt;

use unicode_general_category::{get_general_category, GeneralCategory};
use unicode_script::{Script, UnicodeScript};

/// Coarse character class used to find token boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnicodeClass {
    Letter(Script),
    Digit,
    Separator,
    Symbol,
}

impl UnicodeClass {
    pub fn is_letter(self) -> bool {
        matches!(self, UnicodeClass::Letter(_))
    }
}

impl fmt::Display for UnicodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnicodeClass::Letter(script) => write!(f, "Letter({})", script.full_name()),
            UnicodeClass::Digit => f.write_str("Digit"),
            UnicodeClass::Separator => f.write_str("Separator"),
            UnicodeClass::Symbol => f.write_str("Symbol"),
        }
    }
}

/// Context-free class of a single scalar value.
///
/// Combining marks are `Symbol` here; the tokenizer attaches them to a
/// preceding letter run of the same script (see [`class_in_run`]).
pub fn unicode_class_of(ch: char) -> UnicodeClass {
    if ch.is_whitespace() {
        return UnicodeClass::Separator;
    }
    match get_general_category(ch) {
        GeneralCategory::DecimalNumber => UnicodeClass::Digit,
        GeneralCategory::UppercaseLetter
        | GeneralCategory::LowercaseLetter
        | GeneralCategory::TitlecaseLetter
        | GeneralCategory::ModifierLetter
        | GeneralCategory::OtherLetter => UnicodeClass::Letter(ch.script()),
        _ => UnicodeClass::Symbol,
    }
}

pub(crate) fn is_mark(ch: char) -> bool {
    matches!(
        get_general_category(ch),
        GeneralCategory::NonspacingMark | GeneralCategory::SpacingMark | GeneralCategory::EnclosingMark
    )
}

/// Class of `ch` given the class of the run it would extend.
///
/// A combining mark directly after a letter run takes the run's class when
/// the mark belongs to the same script (or is script-inherited), which keeps
/// orthographic syllables such as Tamil consonant + vowel sign together.
pub fn class_in_run(run: Option<UnicodeClass>, ch: char) -> UnicodeClass {
    if let Some(UnicodeClass::Letter(script)) = run {
        if is_mark(ch) {
            let mark_script = ch.script();
            if mark_script == script || mark_script == Script::Inherited || mark_script == Script::Common {
                return UnicodeClass::Letter(script);
            }
        }
    }
    unicode_class_of(ch)
}

/// A non-empty, whitespace-free span of the source sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub uclass: UnicodeClass,
    /// Byte offsets into the source sentence.
    pub start: usize,
    pub end: usize,
    /// Produced inside a currency or measure span.
    pub protected: bool,
    /// Context tag appended to the class key, e.g. the decimal mark of a
    /// currency amount is keyed as `./currency`.
    pub tag: Option<&'static str>,
}

impl Token {
    pub fn new(text: &str, uclass: UnicodeClass, start: usize) -> Self {
        Token { text: text.to_string(), uclass, start, end: start + text.len(), protected: false, tag: None }
    }

    /// The string classes see for this token.
    pub fn key(&self) -> Cow<'_, str> {
        match self.tag {
            None => Cow::Borrowed(&self.text),
            Some(tag) => Cow::Owned(format!("{}/{}", self.text, tag)),
        }
    }
}

/// Splits `sentence` into granular tokens, in source order.
pub fn tokenize(sentence: &str) -> Vec<Token> {
    tokenize_at(sentence, 0)
}

/// Same as [`tokenize`] with byte offsets shifted by `offset`.
pub(crate) fn tokenize_at(text: &str, offset: usize) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut run: Option<(usize, UnicodeClass)> = None;

    for (i, ch) in text.char_indices() {
        let class = class_in_run(run.map(|(_, c)| c), ch);
        match run {
            Some((_, current)) if current == class => {}
            Some((start, current)) => {
                tokens.push(Token::new(&text[start..i], current, start + offset));
                run = None;
            }
            None => {}
        }
        if class == UnicodeClass::Separator {
            continue;
        }
        if run.is_none() {
            run = Some((i, class));
        }
    }
    if let Some((start, current)) = run {
        tokens.push(Token::new(&text[start..], current, start + offset));
    }
    tokens
}

/// Rebuilds the source from tokens by restoring the gaps between their
/// byte spans. Tokens must be in source order.
pub fn reconstruct(tokens: &[Token], source: &str) -> String {
    let mut out = String::with_capacity(source.len());
    let mut cursor = 0;
    for token in tokens {
        out.push_str(&source[cursor..token.start]);
        out.push_str(&token.text);
        cursor = token.end;
    }
    out.push_str(&source[cursor..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(s: &str) -> Vec<String> {
        tokenize(s).into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn classes_of_basic_chars() {
        assert_eq!(unicode_class_of('3'), UnicodeClass::Digit);
        assert_eq!(unicode_class_of('P'), UnicodeClass::Letter(Script::Latin));
        assert_eq!(unicode_class_of('/'), UnicodeClass::Symbol);
        assert_eq!(unicode_class_of(' '), UnicodeClass::Separator);
        assert_eq!(unicode_class_of('\u{3000}'), UnicodeClass::Separator);
        assert_eq!(unicode_class_of('க'), UnicodeClass::Letter(Script::Tamil));
        assert_eq!(unicode_class_of('௩'), UnicodeClass::Digit);
        assert_eq!(unicode_class_of('²'), UnicodeClass::Symbol);
        assert_eq!(unicode_class_of('$'), UnicodeClass::Symbol);
    }

    #[test]
    fn splits_on_class_change() {
        assert_eq!(texts("C3PO"), ["C", "3", "PO"]);
        assert_eq!(texts("1/1/2020"), ["1", "/", "1", "/", "2020"]);
        assert_eq!(texts("hello world"), ["hello", "world"]);
        assert_eq!(texts("Hi!?"), ["Hi", "!?"]);
    }

    #[test]
    fn empty_and_blank() {
        assert!(tokenize("").is_empty());
        assert!(tokenize(" \t\n ").is_empty());
    }

    #[test]
    fn scripts_split() {
        assert_eq!(texts("abcகடை"), ["abc", "கடை"]);
    }

    #[test]
    fn tamil_vowel_signs_stay_attached() {
        // க + ி (vowel sign i) + ட + ை
        let toks = tokenize("கிடை");
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].uclass, UnicodeClass::Letter(Script::Tamil));
    }

    #[test]
    fn marks_follow_latin_base_but_not_symbols() {
        let toks = tokenize("e\u{301}!");
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[0].text, "e\u{301}");
        // a mark after a digit is a symbol
        assert_eq!(texts("5\u{301}"), ["5", "\u{301}"]);
    }

    #[test]
    fn spans_and_reconstruction() {
        let s = "  C3PO  says hi ";
        let toks = tokenize(s);
        for t in &toks {
            assert_eq!(&s[t.start..t.end], t.text);
        }
        assert_eq!(reconstruct(&toks, s), s);
    }

    #[test]
    fn tagged_key() {
        let mut t = Token::new(".", UnicodeClass::Symbol, 0);
        assert_eq!(t.key(), ".");
        t.tag = Some("currency");
        assert_eq!(t.key(), "./currency");
    }
}
