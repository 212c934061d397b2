//! Sentiment verdicts and composite scores.
//!
//! A [`SentimentVerdict`] is a label plus a score in `[0, 1]`. Its
//! [`CompositeScore`] is the label weight (+1, 0, -1) times the score, a
//! signed polarity value in `[-1, 1]`. Verdicts come either from the native
//! lexicon scorer or from an external classifier via
//! [`import_external_verdicts`].

mod external;
mod lexicon;
mod tokenize;

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{DocKey, Document, Source};
use crate::error::{Error, Result};
use crate::fsutil;

pub use external::{import_external_verdicts, parse_external_verdicts};
pub use lexicon::{Lexicon, NEGATIVE_FILE, NEGATORS_FILE, POSITIVE_FILE};
pub use tokenize::tokenize;

/// How many tokens before a lexicon hit are searched for a negator.
pub const NEGATION_WINDOW: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    Positive,
    Neutral,
    Negative,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 3] = [
        SentimentLabel::Positive,
        SentimentLabel::Neutral,
        SentimentLabel::Negative,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SentimentLabel::Positive => "positive",
            SentimentLabel::Neutral => "neutral",
            SentimentLabel::Negative => "negative",
        }
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SentimentLabel {
    type Err = Error;

    /// Case-insensitive.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" => Ok(SentimentLabel::Positive),
            "neutral" => Ok(SentimentLabel::Neutral),
            "negative" => Ok(SentimentLabel::Negative),
            other => Err(Error::schema(format!("unknown sentiment label {other:?}"))),
        }
    }
}

/// Label weight: positive +1, neutral 0, negative -1.
pub fn weight(label: SentimentLabel) -> i8 {
    match label {
        SentimentLabel::Positive => 1,
        SentimentLabel::Neutral => 0,
        SentimentLabel::Negative => -1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VerdictRepr")]
pub struct SentimentVerdict {
    label: SentimentLabel,
    score: f64,
}

#[derive(Deserialize)]
struct VerdictRepr {
    label: SentimentLabel,
    score: f64,
}

impl TryFrom<VerdictRepr> for SentimentVerdict {
    type Error = Error;

    fn try_from(r: VerdictRepr) -> Result<Self> {
        SentimentVerdict::new(r.label, r.score)
    }
}

impl SentimentVerdict {
    pub fn new(label: SentimentLabel, score: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::schema(format!(
                "sentiment score {score} outside [0, 1]"
            )));
        }
        Ok(SentimentVerdict { label, score })
    }

    pub fn neutral() -> Self {
        SentimentVerdict {
            label: SentimentLabel::Neutral,
            score: 0.0,
        }
    }

    pub fn label(&self) -> SentimentLabel {
        self.label
    }

    pub fn score(&self) -> f64 {
        self.score
    }
}

/// Signed polarity in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CompositeScore(f64);

impl CompositeScore {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn composite(verdict: &SentimentVerdict) -> CompositeScore {
    CompositeScore(f64::from(weight(verdict.label)) * verdict.score)
}

/// Dictionary verdict for a token list.
///
/// Each positive or negative hit counts once per occurrence; a negator in
/// the preceding [`NEGATION_WINDOW`] tokens flips the hit. With `p`
/// positive and `n` negative hits the score is `|p - n| / (p + n)`, and
/// no hits or a tie is neutral with score 0.
pub fn score_tokens<S: AsRef<str>>(tokens: &[S], lexicon: &Lexicon) -> SentimentVerdict {
    let (mut p, mut n) = (0u32, 0u32);
    for (i, token) in tokens.iter().enumerate() {
        let token = token.as_ref();
        let positive = if lexicon.is_positive(token) {
            true
        } else if lexicon.is_negative(token) {
            false
        } else {
            continue;
        };
        let negated = tokens[i.saturating_sub(NEGATION_WINDOW)..i]
            .iter()
            .any(|t| lexicon.is_negator(t.as_ref()));
        if positive != negated {
            p += 1;
        } else {
            n += 1;
        }
    }
    if p == n {
        return SentimentVerdict::neutral();
    }
    let label = if p > n {
        SentimentLabel::Positive
    } else {
        SentimentLabel::Negative
    };
    SentimentVerdict {
        label,
        score: f64::from(p.abs_diff(n)) / f64::from(p + n),
    }
}

pub fn score_text(text: &str, lexicon: &Lexicon) -> SentimentVerdict {
    score_tokens(&tokenize(text), lexicon)
}

/// Where a verdict came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictOrigin {
    Lexicon,
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScoredRepr", into = "ScoredRepr")]
pub struct ScoredDocument {
    pub key: DocKey,
    pub ticker: String,
    pub timestamp: DateTime<Utc>,
    pub verdict: SentimentVerdict,
    pub composite: CompositeScore,
    pub origin: VerdictOrigin,
}

impl ScoredDocument {
    pub fn new(doc: &Document, verdict: SentimentVerdict, origin: VerdictOrigin) -> Self {
        ScoredDocument {
            key: doc.key(),
            ticker: doc.ticker.clone(),
            timestamp: doc.timestamp,
            verdict,
            composite: composite(&verdict),
            origin,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("scored document serializes")
    }
}

/// Flat on-disk layout of a scored line.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScoredRepr {
    id: String,
    source: Source,
    ticker: String,
    timestamp: String,
    label: SentimentLabel,
    score: f64,
    composite: f64,
    origin: VerdictOrigin,
}

impl From<ScoredDocument> for ScoredRepr {
    fn from(s: ScoredDocument) -> Self {
        ScoredRepr {
            id: s.key.id,
            source: s.key.source,
            ticker: s.ticker,
            timestamp: s
                .timestamp
                .to_rfc3339_opts(chrono::SecondsFormat::AutoSi, true),
            label: s.verdict.label,
            score: s.verdict.score,
            composite: s.composite.0,
            origin: s.origin,
        }
    }
}

impl TryFrom<ScoredRepr> for ScoredDocument {
    type Error = Error;

    fn try_from(r: ScoredRepr) -> Result<Self> {
        let verdict = SentimentVerdict::new(r.label, r.score)?;
        let expected = composite(&verdict);
        if r.composite != expected.0 {
            return Err(Error::schema(format!(
                "scored {}/{}: composite {} does not match {} x {}",
                r.source, r.id, r.composite, r.label, r.score
            )));
        }
        let timestamp = DateTime::parse_from_rfc3339(&r.timestamp)
            .map_err(|e| Error::schema(format!("bad timestamp {:?}: {e}", r.timestamp)))?
            .with_timezone(&Utc);
        Ok(ScoredDocument {
            key: DocKey {
                source: r.source,
                id: r.id,
            },
            ticker: r.ticker,
            timestamp,
            verdict,
            composite: expected,
            origin: r.origin,
        })
    }
}

pub fn parse_scored_line(line: &str) -> Result<ScoredDocument> {
    serde_json::from_str(line).map_err(|e| Error::schema(format!("invalid scored line: {e}")))
}

pub fn read_scored(path: &Path) -> Result<Vec<ScoredDocument>> {
    let text = fsutil::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            parse_scored_line(l)
                .map_err(|e| Error::schema(format!("{}:{}: {e}", path.display(), i + 1)))
        })
        .collect()
}

pub fn render_scored(scored: &[ScoredDocument]) -> String {
    let mut out = String::new();
    for s in scored {
        out.push_str(&s.to_json_line());
        out.push('\n');
    }
    out
}

/// Scores every document, preferring an external verdict when one exists
/// for the document's key. Output order matches input order.
pub fn score_corpus(
    docs: &[Document],
    lexicon: &Lexicon,
    external: Option<&HashMap<DocKey, SentimentVerdict>>,
) -> Vec<ScoredDocument> {
    docs.par_iter()
        .map(|doc| match external.and_then(|m| m.get(&doc.key())) {
            Some(v) => ScoredDocument::new(doc, *v, VerdictOrigin::External),
            None => ScoredDocument::new(
                doc,
                score_text(doc.scoring_text(), lexicon),
                VerdictOrigin::Lexicon,
            ),
        })
        .collect()
}
