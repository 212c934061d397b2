use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fsutil;

const DEFAULT_POSITIVE: &str = include_str!("../../lexicon/positive.txt");
const DEFAULT_NEGATIVE: &str = include_str!("../../lexicon/negative.txt");
const DEFAULT_NEGATORS: &str = include_str!("../../lexicon/negators.txt");

pub const POSITIVE_FILE: &str = "positive.txt";
pub const NEGATIVE_FILE: &str = "negative.txt";
pub const NEGATORS_FILE: &str = "negators.txt";

/// Polarity word lists plus the negators that flip them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    positive: BTreeSet<String>,
    negative: BTreeSet<String>,
    negators: BTreeSet<String>,
}

impl Lexicon {
    pub fn new<I, J, K>(positive: I, negative: J, negators: K) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<String>,
        J: IntoIterator,
        J::Item: Into<String>,
        K: IntoIterator,
        K::Item: Into<String>,
    {
        let positive = collect_terms(positive, "positive")?;
        let negative = collect_terms(negative, "negative")?;
        let negators = collect_terms(negators, "negator")?;
        if let Some(term) = positive.intersection(&negative).next() {
            return Err(Error::schema(format!(
                "lexicon term {term:?} is both positive and negative"
            )));
        }
        Ok(Lexicon {
            positive,
            negative,
            negators,
        })
    }

    /// The lexicon shipped with the crate.
    pub fn default_financial() -> Self {
        Lexicon::from_texts(DEFAULT_POSITIVE, DEFAULT_NEGATIVE, DEFAULT_NEGATORS)
            .expect("bundled lexicon is valid")
    }

    pub fn from_texts(positive: &str, negative: &str, negators: &str) -> Result<Self> {
        Lexicon::new(
            word_lines(positive),
            word_lines(negative),
            word_lines(negators),
        )
    }

    /// Loads `positive.txt`, `negative.txt` and `negators.txt` from `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let read = |name: &str| fsutil::read_to_string(&dir.join(name));
        Lexicon::from_texts(
            &read(POSITIVE_FILE)?,
            &read(NEGATIVE_FILE)?,
            &read(NEGATORS_FILE)?,
        )
        .map_err(|e| Error::schema(format!("{}: {e}", dir.display())))
    }

    pub fn is_positive(&self, token: &str) -> bool {
        self.positive.contains(token)
    }

    pub fn is_negative(&self, token: &str) -> bool {
        self.negative.contains(token)
    }

    pub fn is_negator(&self, token: &str) -> bool {
        self.negators.contains(token)
    }

    pub fn positive_terms(&self) -> impl Iterator<Item = &str> {
        self.positive.iter().map(String::as_str)
    }

    pub fn negative_terms(&self) -> impl Iterator<Item = &str> {
        self.negative.iter().map(String::as_str)
    }

    pub fn negators(&self) -> impl Iterator<Item = &str> {
        self.negators.iter().map(String::as_str)
    }

    /// The same lexicon with positive and negative lists exchanged.
    pub fn swapped(&self) -> Self {
        Lexicon {
            positive: self.negative.clone(),
            negative: self.positive.clone(),
            negators: self.negators.clone(),
        }
    }
}

/// Non-empty, non-comment lines of a word file, trimmed.
fn word_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn collect_terms<I>(terms: I, kind: &str) -> Result<BTreeSet<String>>
where
    I: IntoIterator,
    I::Item: Into<String>,
{
    let mut set = BTreeSet::new();
    for term in terms {
        let term: String = term.into();
        if term.is_empty() || term.chars().any(char::is_whitespace) {
            return Err(Error::schema(format!(
                "{kind} term {term:?} is empty or has whitespace"
            )));
        }
        if term.chars().any(char::is_uppercase) {
            return Err(Error::schema(format!(
                "{kind} term {term:?} is not lowercase"
            )));
        }
        set.insert(term);
    }
    Ok(set)
}
