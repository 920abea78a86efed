//! Seeded generator for annotated English sentences.
//!
//! Sentences mix plain words with dates, counts, years, ordinals, currency
//! amounts, measures, abbreviations, addresses, company names, acronyms,
//! digit strings, roman numerals, percentages and clock times. Spoken forms for numbers come from
//! the English verbalizers; everything else (month names, "of", "dollars",
//! "doctor", …) is left for class induction to pick up.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classes::NumberWords;
use crate::corpus::{AnnotatedCorpus, AnnotatedSentence};
use crate::profile::Profile;
use crate::realign::Realigner;

const MONTHS: [&str; 12] = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];
const MONTH_ABBREV: [(&str, &str); 6] = [
    ("Jan", "January"),
    ("Feb", "February"),
    ("Aug", "August"),
    ("Sept", "September"),
    ("Oct", "October"),
    ("Dec", "December"),
];
const DATE_LEADS: [&str; 5] =
    ["The meeting is on", "She was born on", "We arrived on", "The report is due on", "It happened on"];
const COUNT_LEADS: [&str; 4] = ["There were", "We saw", "They sold", "I counted"];
const NOUNS: [&str; 6] = ["people", "apples", "cars", "books", "students", "birds"];
const YEAR_LEADS: [&str; 3] = ["In", "Back in", "Since"];
const YEAR_TAILS: [&str; 4] = ["things changed", "the city grew", "prices rose", "we lived there"];
const PLACERS: [&str; 4] = ["She", "He", "Our team", "The horse"];
const PRICE_LEADS: [&str; 4] = ["It costs", "The ticket was", "They paid", "He spent"];
const CURRENCIES: [(&str, &str, bool); 4] =
    [("$", "dollars", true), ("€", "euros", true), ("£", "pounds", true), ("₹", "rupees", false)];
const UNITS: [(&str, &str); 5] =
    [("km", "kilometres"), ("kg", "kilograms"), ("m", "metres"), ("cm", "centimetres"), ("mi", "miles")];
const TITLES: [(&str, &str); 4] = [("Dr", "doctor"), ("Mr", "mister"), ("Mrs", "misses"), ("Prof", "professor")];
const NAMES: [&str; 6] = ["Smith", "Jones", "Brown", "Taylor", "Clark", "Lee"];
const VERBS: [&str; 4] = ["called", "visited", "wrote", "answered"];
const ACRONYMS: [&str; 6] = ["TV", "FBI", "USA", "BBC", "DVD", "CEO"];
const KINGS: [&str; 4] = ["Henry", "Louis", "George", "Edward"];
const STREETS: [&str; 5] = ["Oak", "Main", "Park", "Hill", "Mill"];
const STREET_TYPES: [(&str, &str); 4] = [("St", "street"), ("Ave", "avenue"), ("Rd", "road"), ("Blvd", "boulevard")];
const FIRM_TYPES: [(&str, &str); 3] = [("Ltd", "limited"), ("Inc", "incorporated"), ("Co", "company")];
const PLAIN: [&str; 6] = [
    "The weather was nice today",
    "We walked along the river",
    "I like reading old books",
    "They will come back soon",
    "She opened the window slowly",
    "Nobody knew the answer",
];

/// Builds a source string and its aligned pairs side by side.
#[derive(Default)]
struct Builder {
    source: String,
    pairs: Vec<(String, String)>,
}

impl Builder {
    fn space(&mut self) {
        if !self.source.is_empty() {
            self.source.push(' ');
        }
    }

    /// Plain words read as written.
    fn words(&mut self, text: &str) -> &mut Self {
        for w in text.split_whitespace() {
            self.space();
            self.source.push_str(w);
            self.pairs.push((w.to_string(), w.to_string()));
        }
        self
    }

    /// One token; `attached` suppresses the preceding space.
    fn token(&mut self, attached: bool, text: &str, norm: &str) -> &mut Self {
        if !attached {
            self.space();
        }
        self.source.push_str(text);
        self.pairs.push((text.to_string(), norm.to_string()));
        self
    }

    /// Several source characters whose tokens are listed in spoken order.
    fn span(&mut self, surface: &str, pairs: &[(&str, String)]) -> &mut Self {
        self.space();
        self.source.push_str(surface);
        self.pairs.extend(pairs.iter().map(|(u, n)| (u.to_string(), n.clone())));
        self
    }

    fn stop(&mut self) -> &mut Self {
        self.token(true, ".", "")
    }
}

/// Generator state: RNG, number words and the realigner used to check
/// alignment.
pub struct Generator {
    rng: ChaCha8Rng,
    words: NumberWords,
    realigner: Realigner,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        let profile = Profile::english();
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            words: profile.numbers.clone(),
            realigner: Realigner::new(&profile),
        }
    }

    fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.rng.random_range(0..items.len())]
    }

    fn range(&mut self, lo: u64, hi: u64) -> u64 {
        self.rng.random_range(lo..=hi)
    }

    fn cardinal(&self, n: u64) -> String {
        self.words.cardinal(n).expect("in range")
    }

    fn ordinal(&self, n: u64) -> String {
        self.words.ordinal(n).expect("in range")
    }

    fn ordinal_suffix(n: u64) -> &'static str {
        match (n % 10, n % 100) {
            (_, 11..=13) => "th",
            (1, _) => "st",
            (2, _) => "nd",
            (3, _) => "rd",
            _ => "th",
        }
    }

    fn date(&mut self, b: &mut Builder) {
        let lead = *self.pick(&DATE_LEADS);
        let day = self.range(1, 28);
        let month = self.range(1, 12);
        let year = self.range(1950, 2030);
        let (d, m, y) = (day.to_string(), month.to_string(), year.to_string());
        b.words(lead).span(
            &format!("{d}/{m}/{y}"),
            &[
                (&d, self.ordinal(day)),
                ("/", "of".into()),
                (&m, MONTHS[month as usize - 1].into()),
                ("/", String::new()),
                (&y, self.words.year(year).expect("in range")),
            ],
        );
        b.stop();
    }

    fn count(&mut self, b: &mut Builder) {
        let lead = *self.pick(&COUNT_LEADS);
        let noun = *self.pick(&NOUNS);
        let n = if self.rng.random_bool(0.5) { self.range(2, 99) } else { self.range(100, 9999) };
        b.words(lead).token(false, &n.to_string(), &self.cardinal(n)).words(noun).stop();
    }

    fn year(&mut self, b: &mut Builder) {
        let lead = *self.pick(&YEAR_LEADS);
        let tail = *self.pick(&YEAR_TAILS);
        let y = self.range(1900, 2030);
        b.words(lead)
            .token(false, &y.to_string(), &self.words.year(y).expect("in range"))
            .token(true, ",", "")
            .words(tail)
            .stop();
    }

    fn ordinal_place(&mut self, b: &mut Builder) {
        let who = *self.pick(&PLACERS);
        let n = self.range(1, 40);
        b.words(who)
            .words("finished")
            .token(false, &n.to_string(), &self.ordinal(n))
            .token(true, Self::ordinal_suffix(n), "")
            .words("in the race")
            .stop();
    }

    fn price(&mut self, b: &mut Builder) {
        let lead = *self.pick(&PRICE_LEADS);
        let &(symbol, name, has_cents) = self.pick(&CURRENCIES);
        let amount = self.range(2, 999);
        let a = amount.to_string();
        b.words(lead);
        if has_cents && self.rng.random_bool(0.6) {
            let cents = self.range(10, 99);
            let c = cents.to_string();
            b.span(
                &format!("{symbol}{a}.{c}"),
                &[
                    (&a, self.cardinal(amount)),
                    (symbol, name.into()),
                    (&c, self.cardinal(cents)),
                    (".", "cents".into()),
                ],
            );
        } else {
            b.span(&format!("{symbol}{a}"), &[(&a, self.cardinal(amount)), (symbol, name.into())]);
        }
        b.stop();
    }

    fn measure(&mut self, b: &mut Builder) {
        let n = self.range(2, 500);
        let s = n.to_string();
        if self.rng.random_bool(0.3) {
            b.words("The room is")
                .span(&format!("{s} m²"), &[(&s, self.cardinal(n)), ("²", "squared".into()), ("m", "metres".into())]);
            b.words("in size").stop();
        } else {
            let &(unit, name) = self.pick(&UNITS);
            b.words("The trip was").span(&format!("{s} {unit}"), &[(&s, self.cardinal(n)), (unit, name.into())]);
            b.words("long").stop();
        }
    }

    fn title(&mut self, b: &mut Builder) {
        let &(abbr, full) = self.pick(&TITLES);
        let name = *self.pick(&NAMES);
        let verb = *self.pick(&VERBS);
        b.token(false, abbr, full).token(true, ".", "").words(name).words(verb).words("us").stop();
    }

    fn latin(&mut self, b: &mut Builder) {
        let noun = *self.pick(&NOUNS);
        if self.rng.random_bool(0.5) {
            b.words("We need").words(noun).token(true, ",", "").words("bags").token(true, ",", "");
            b.token(false, "etc", "et cetera").stop();
        } else {
            b.words("It was").words(noun).token(false, "vs", "versus").token(true, ".", "").words("birds").stop();
        }
    }

    fn acronym(&mut self, b: &mut Builder) {
        let acr = *self.pick(&ACRONYMS);
        let spoken = acr.chars().map(String::from).collect::<Vec<_>>().join(" ");
        b.words("I read about the").token(false, acr, &spoken).words("today").stop();
    }

    fn phone(&mut self, b: &mut Builder) {
        let a = format!("{:03}", self.range(0, 999));
        let c = format!("{:04}", self.range(0, 9999));
        let da = self.words.digits(&a).expect("digits");
        let dc = self.words.digits(&c).expect("digits");
        b.words("Call").token(false, &a, &da).token(false, &c, &dc).words("now").stop();
    }

    fn roman(&mut self, b: &mut Builder) {
        if self.rng.random_bool(0.3) {
            let y = self.range(1939, 1945);
            b.words("World War")
                .token(false, "II", "two")
                .words("ended in")
                .token(false, &y.to_string(), &self.words.year(y).expect("in range"))
                .stop();
        } else {
            let king = *self.pick(&KINGS);
            let n = self.range(3, 12);
            let roman = to_roman(n);
            let years = self.range(2, 40);
            b.words("King")
                .words(king)
                .token(false, &roman, &self.ordinal(n))
                .words("ruled for")
                .token(false, &years.to_string(), &self.cardinal(years))
                .words("years")
                .stop();
        }
    }

    fn percent(&mut self, b: &mut Builder) {
        let n = self.range(2, 99);
        b.token(false, &n.to_string(), &self.cardinal(n))
            .token(true, "%", "percent")
            .words("of the")
            .words(self.pick(&NOUNS))
            .words("agreed")
            .stop();
    }

    fn clock(&mut self, b: &mut Builder) {
        let h = self.range(1, 12);
        let m = self.range(10, 59);
        b.words("The train leaves at").token(false, &h.to_string(), &self.cardinal(h)).token(true, ":", "").token(
            true,
            &m.to_string(),
            &self.cardinal(m),
        );
        if self.rng.random_bool(0.5) {
            b.token(false, "pm", "p m");
        }
        b.stop();
    }

    fn month_abbrev(&mut self, b: &mut Builder) {
        let &(abbr, full) = self.pick(&MONTH_ABBREV);
        let day = self.range(1, 28);
        b.words("The shop opens on").token(false, abbr, full).token(false, &day.to_string(), &self.ordinal(day)).stop();
    }

    fn address(&mut self, b: &mut Builder) {
        let n = self.range(2, 300);
        let street = *self.pick(&STREETS);
        let &(abbr, full) = self.pick(&STREET_TYPES);
        b.words("They live at").token(false, &n.to_string(), &self.cardinal(n)).words(street).token(false, abbr, full);
        b.stop();
    }

    fn firm(&mut self, b: &mut Builder) {
        let a = *self.pick(&NAMES);
        let c = *self.pick(&NAMES);
        let &(abbr, full) = self.pick(&FIRM_TYPES);
        b.words("She works for").words(a).token(false, "&", "and").words(c).token(false, abbr, full).stop();
    }

    fn approx(&mut self, b: &mut Builder) {
        let n = self.range(2, 90);
        let &(unit, name) = self.pick(&UNITS[..2]);
        let s = n.to_string();
        b.words("It is").token(false, "approx", "approximately").token(true, ".", "");
        b.span(&format!("{s} {unit}"), &[(&s, self.cardinal(n)), (unit, name.into())]);
        b.words("away").stop();
    }

    fn plain(&mut self, b: &mut Builder) {
        let s = *self.pick(&PLAIN);
        b.words(s).stop();
    }

    pub fn sentence(&mut self) -> AnnotatedSentence {
        let mut b = Builder::default();
        match self.rng.random_range(0..21) {
            0 | 1 => self.date(&mut b),
            2 => {
                if self.rng.random_bool(0.5) {
                    self.count(&mut b)
                } else {
                    self.address(&mut b)
                }
            }
            3 => self.year(&mut b),
            4 => self.ordinal_place(&mut b),
            5 | 6 => self.price(&mut b),
            7 => self.measure(&mut b),
            8 | 9 => self.title(&mut b),
            10 => self.latin(&mut b),
            11 => self.acronym(&mut b),
            12 => {
                if self.rng.random_bool(0.5) {
                    self.phone(&mut b)
                } else {
                    self.approx(&mut b)
                }
            }
            13 => self.roman(&mut b),
            14 => {
                if self.rng.random_bool(0.5) {
                    self.percent(&mut b)
                } else {
                    self.month_abbrev(&mut b)
                }
            }
            16 | 17 => self.address(&mut b),
            18 | 19 => self.firm(&mut b),
            20 => self.approx(&mut b),
            _ => {
                if self.rng.random_bool(0.5) {
                    self.clock(&mut b)
                } else {
                    self.plain(&mut b)
                }
            }
        }
        AnnotatedSentence::new(b.source, b.pairs, &self.realigner).expect("generated sentences align")
    }
}

fn to_roman(mut n: u64) -> String {
    let table = [(10, "X"), (9, "IX"), (5, "V"), (4, "IV"), (1, "I")];
    let mut out = String::new();
    for (v, s) in table {
        while n >= v {
            out.push_str(s);
            n -= v;
        }
    }
    out
}

/// `n` generated sentences; identical for identical seeds.
pub fn english_corpus(n: usize, seed: u64) -> AnnotatedCorpus {
    let mut generator = Generator::new(seed);
    AnnotatedCorpus { language: Some("en".into()), sentences: (0..n).map(|_| generator.sentence()).collect() }
}
