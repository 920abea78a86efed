use crate::classes::{ClassId, ClassRegistry};

/// Marks the position after the last token.
pub const END_OF_SENTENCE: &str = "</s>";

/// Observation features of one token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureSet {
    pub candidates: Vec<ClassId>,
    /// Key of the following token, or [`END_OF_SENTENCE`].
    pub next: String,
    /// Prefixes of 1 to 4 characters (only those not longer than the token).
    pub prefixes: Vec<String>,
    pub suffixes: Vec<String>,
    pub is_upper: bool,
    pub is_numeric: bool,
    pub is_capitalized: bool,
    pub pos: Option<String>,
}

impl FeatureSet {
    /// Feature strings as the model stores them.
    pub fn names(&self, registry: &ClassRegistry) -> Vec<String> {
        let mut out = Vec::with_capacity(self.candidates.len() + self.prefixes.len() * 2 + 5);
        for &id in &self.candidates {
            out.push(format!("cand={}", registry.name(id)));
        }
        out.push(format!("next={}", self.next));
        for (i, p) in self.prefixes.iter().enumerate() {
            out.push(format!("pre{}={p}", i + 1));
        }
        for (i, s) in self.suffixes.iter().enumerate() {
            out.push(format!("suf{}={s}", i + 1));
        }
        out.push(format!("upper={}", self.is_upper));
        out.push(format!("numeric={}", self.is_numeric));
        out.push(format!("capital={}", self.is_capitalized));
        if let Some(pos) = &self.pos {
            out.push(format!("pos={pos}"));
        }
        out
    }
}

fn affixes(text: &str) -> (Vec<String>, Vec<String>) {
    let chars: Vec<char> = text.chars().collect();
    let max = chars.len().min(4);
    let prefixes = (1..=max).map(|k| chars[..k].iter().collect()).collect();
    let suffixes = (1..=max).map(|k| chars[chars.len() - k..].iter().collect()).collect();
    (prefixes, suffixes)
}

/// Features of `tokens[i]`. `tokens` are class keys.
pub fn extract_features(tokens: &[impl AsRef<str>], i: usize, registry: &ClassRegistry) -> FeatureSet {
    extract_with_pos(tokens, i, registry, None)
}

pub fn extract_with_pos(
    tokens: &[impl AsRef<str>],
    i: usize,
    registry: &ClassRegistry,
    pos: Option<&str>,
) -> FeatureSet {
    let text = tokens[i].as_ref();
    let (prefixes, suffixes) = affixes(text);
    let has_cased = text.chars().any(|c| c.is_uppercase() || c.is_lowercase());
    FeatureSet {
        candidates: registry.candidates(text),
        next: tokens.get(i + 1).map_or_else(|| END_OF_SENTENCE.to_string(), |t| t.as_ref().to_string()),
        prefixes,
        suffixes,
        is_upper: has_cased && !text.chars().any(char::is_lowercase),
        is_numeric: !text.is_empty() && text.chars().all(char::is_numeric),
        is_capitalized: text.chars().next().is_some_and(char::is_uppercase),
        pos: pos.map(str::to_string),
    }
}
