//! Number, year, roman numeral and spelling verbalizers.
//!
//! The word tables come from the language profile; the defaults are English.
//! Output words are space separated with no hyphens and no "and".

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ClassError;
use crate::tokenizer::is_mark;

/// Largest value the cardinal and ordinal verbalizers read.
pub const CARDINAL_CEILING: u64 = 1_000_000_000_000_000;

/// Word tables for the number verbalizers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumberWords {
    /// Words for 0 through 19.
    pub ones: Vec<String>,
    /// Words for the multiples of ten, indexed by tens digit; 0 and 1 unused.
    pub tens: Vec<String>,
    pub hundred: String,
    /// Scale words for 10^3, 10^6, 10^9, 10^12 and 10^15.
    pub scales: Vec<String>,
    /// Ordinal forms of words that do not take the regular suffix.
    pub ordinal_irregular: BTreeMap<String, String>,
    pub ordinal_suffix: String,
    /// Replaces a trailing "y" when forming ordinals ("twenty" → "twentieth").
    pub ordinal_y_suffix: String,
    /// Read for a zero tens digit in years such as 1905.
    pub year_zero: String,
}

fn strings(words: &[&str]) -> Vec<String> {
    words.iter().map(|w| w.to_string()).collect()
}

impl Default for NumberWords {
    fn default() -> Self {
        NumberWords {
            ones: strings(&[
                "zero",
                "one",
                "two",
                "three",
                "four",
                "five",
                "six",
                "seven",
                "eight",
                "nine",
                "ten",
                "eleven",
                "twelve",
                "thirteen",
                "fourteen",
                "fifteen",
                "sixteen",
                "seventeen",
                "eighteen",
                "nineteen",
            ]),
            tens: strings(&["", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"]),
            hundred: "hundred".into(),
            scales: strings(&["thousand", "million", "billion", "trillion", "quadrillion"]),
            ordinal_irregular: [
                ("one", "first"),
                ("two", "second"),
                ("three", "third"),
                ("five", "fifth"),
                ("eight", "eighth"),
                ("nine", "ninth"),
                ("twelve", "twelfth"),
            ]
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
            ordinal_suffix: "th".into(),
            ordinal_y_suffix: "ieth".into(),
            year_zero: "oh".into(),
        }
    }
}

impl NumberWords {
    pub fn validate(&self) -> Result<(), String> {
        if self.ones.len() != 20 {
            return Err(format!("numbers.ones needs 20 entries, got {}", self.ones.len()));
        }
        if self.tens.len() != 10 {
            return Err(format!("numbers.tens needs 10 entries, got {}", self.tens.len()));
        }
        if self.scales.len() < 5 {
            return Err(format!("numbers.scales needs 5 entries, got {}", self.scales.len()));
        }
        Ok(())
    }

    fn push_below_thousand(&self, n: u64, out: &mut Vec<String>) {
        debug_assert!(n < 1000);
        let hundreds = (n / 100) as usize;
        let rest = (n % 100) as usize;
        if hundreds > 0 {
            out.push(self.ones[hundreds].clone());
            out.push(self.hundred.clone());
        }
        if rest == 0 {
            return;
        }
        if rest < 20 {
            out.push(self.ones[rest].clone());
        } else {
            out.push(self.tens[rest / 10].clone());
            if !rest.is_multiple_of(10) {
                out.push(self.ones[rest % 10].clone());
            }
        }
    }

    fn cardinal_words(&self, n: u64) -> Result<Vec<String>, ClassError> {
        if n > CARDINAL_CEILING {
            return Err(ClassError::OutOfRange(n.to_string()));
        }
        if n == 0 {
            return Ok(vec![self.ones[0].clone()]);
        }
        let mut groups = Vec::new();
        let mut rest = n;
        while rest > 0 {
            groups.push(rest % 1000);
            rest /= 1000;
        }
        let mut out = Vec::new();
        for (scale, &group) in groups.iter().enumerate().rev() {
            if group == 0 {
                continue;
            }
            self.push_below_thousand(group, &mut out);
            if scale > 0 {
                out.push(self.scales[scale - 1].clone());
            }
        }
        Ok(out)
    }

    pub fn cardinal(&self, n: u64) -> Result<String, ClassError> {
        Ok(self.cardinal_words(n)?.join(" "))
    }

    pub fn ordinal(&self, n: u64) -> Result<String, ClassError> {
        if n == 0 {
            return Err(ClassError::OutOfRange(n.to_string()));
        }
        let mut words = self.cardinal_words(n)?;
        let last = words.pop().expect("cardinal of a positive number has words");
        words.push(self.ordinal_word(&last));
        Ok(words.join(" "))
    }

    fn ordinal_word(&self, word: &str) -> String {
        if let Some(irregular) = self.ordinal_irregular.get(word) {
            return irregular.clone();
        }
        match word.strip_suffix('y') {
            Some(stem) => format!("{stem}{}", self.ordinal_y_suffix),
            None => format!("{word}{}", self.ordinal_suffix),
        }
    }

    /// Reads each digit on its own, keeping leading zeros.
    pub fn digits(&self, text: &str) -> Result<String, ClassError> {
        let mut words = Vec::with_capacity(text.len());
        for ch in text.chars() {
            let d = ch.to_digit(10).ok_or_else(|| ClassError::OutOfRange(text.to_string()))?;
            words.push(self.ones[d as usize].as_str());
        }
        if words.is_empty() {
            return Err(ClassError::OutOfRange(text.to_string()));
        }
        Ok(words.join(" "))
    }

    /// Year reading: two pairs ("nineteen ninety nine"), with whole thousands
    /// and X00y read as cardinals and XY00 read as "<XY> hundred".
    pub fn year(&self, n: u64) -> Result<String, ClassError> {
        if !(1000..=9999).contains(&n) {
            return Err(ClassError::OutOfRange(n.to_string()));
        }
        let high = n / 100;
        let low = n % 100;
        if n.is_multiple_of(1000) || (high.is_multiple_of(10) && low < 10) {
            return self.cardinal(n);
        }
        let head = self.cardinal(high)?;
        if low == 0 {
            Ok(format!("{head} {}", self.hundred))
        } else if low < 10 {
            Ok(format!("{head} {} {}", self.year_zero, self.ones[low as usize]))
        } else {
            Ok(format!("{head} {}", self.cardinal(low)?))
        }
    }
}

const ROMAN_TABLE: [(u32, &str); 13] = [
    (1000, "M"),
    (900, "CM"),
    (500, "D"),
    (400, "CD"),
    (100, "C"),
    (90, "XC"),
    (50, "L"),
    (40, "XL"),
    (10, "X"),
    (9, "IX"),
    (5, "V"),
    (4, "IV"),
    (1, "I"),
];

fn roman_digit(ch: char) -> Option<u32> {
    Some(match ch {
        'I' => 1,
        'V' => 5,
        'X' => 10,
        'L' => 50,
        'C' => 100,
        'D' => 500,
        'M' => 1000,
        _ => return None,
    })
}

fn int_to_roman(mut n: u32) -> String {
    let mut out = String::new();
    for &(value, glyphs) in &ROMAN_TABLE {
        while n >= value {
            out.push_str(glyphs);
            n -= value;
        }
    }
    out
}

/// Value of a canonical uppercase Roman numeral (1–3999).
pub fn roman_to_int(text: &str) -> Result<u32, ClassError> {
    let invalid = || ClassError::InvalidRoman(text.to_string());
    let values = text.chars().map(roman_digit).collect::<Option<Vec<_>>>().ok_or_else(invalid)?;
    if values.is_empty() {
        return Err(invalid());
    }
    let mut total = 0i64;
    for (i, &v) in values.iter().enumerate() {
        match values.get(i + 1) {
            Some(&next) if next > v => total -= i64::from(v),
            _ => total += i64::from(v),
        }
    }
    // Subtractive scanning accepts sloppy forms like "IIII" or "VX"; only the
    // canonical spelling of the value is allowed through.
    if !(1..=3999).contains(&total) || int_to_roman(total as u32) != text {
        return Err(invalid());
    }
    Ok(total as u32)
}

pub fn is_roman(text: &str) -> bool {
    roman_to_int(text).is_ok()
}

/// Splits a word into letters (with attached marks) and reads each one via
/// the letter table, falling back to the letter itself.
pub fn spell(text: &str, letters: &BTreeMap<String, String>) -> String {
    let mut units: Vec<String> = Vec::new();
    for ch in text.chars() {
        match units.last_mut() {
            Some(last) if is_mark(ch) => last.push(ch),
            _ => units.push(ch.to_string()),
        }
    }
    units.into_iter().map(|u| letters.get(&u).cloned().unwrap_or(u)).collect::<Vec<_>>().join(" ")
}
