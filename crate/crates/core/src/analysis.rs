//! Relating daily sentiment to opening-price movements.

use std::collections::BTreeMap;
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::aggregation::{aggregate_by_ticker, Affinity, AffinityThresholds};
use crate::error::{Error, Result};
use crate::market::{daily_open_returns, percent_change_open, split_halves, PriceSeries};
use crate::sentiment::ScoredDocument;

/// Fewest aligned days for which a correlation is reported.
pub const MIN_CORRELATION_DAYS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DailyPoint {
    pub date: NaiveDate,
    pub mean_composite: f64,
    pub n_docs: usize,
}

/// Mean composite per UTC calendar date; days without documents are absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailySentimentIndex {
    pub ticker: String,
    pub points: Vec<DailyPoint>,
}

pub fn daily_index(scored: &[ScoredDocument], ticker: &str) -> DailySentimentIndex {
    let mut docs: Vec<&ScoredDocument> = scored.iter().filter(|s| s.ticker == ticker).collect();
    docs.sort_by(|a, b| {
        (a.timestamp, &a.key.id, a.key.source).cmp(&(b.timestamp, &b.key.id, b.key.source))
    });
    let mut days: BTreeMap<NaiveDate, (f64, usize)> = BTreeMap::new();
    for s in docs {
        let e = days.entry(s.timestamp.date_naive()).or_insert((0.0, 0));
        e.0 += s.composite.value();
        e.1 += 1;
    }
    DailySentimentIndex {
        ticker: ticker.to_string(),
        points: days
            .into_iter()
            .map(|(date, (sum, n))| DailyPoint {
                date,
                mean_composite: sum / n as f64,
                n_docs: n,
            })
            .collect(),
    }
}

/// Sentiment and return values paired on shared dates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Aligned {
    pub dates: Vec<NaiveDate>,
    pub sentiment: Vec<f64>,
    pub returns: Vec<f64>,
}

impl Aligned {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

/// Inner join on date, ordered by date.
pub fn align(index: &DailySentimentIndex, returns: &[(NaiveDate, f64)]) -> Aligned {
    let returns: BTreeMap<NaiveDate, f64> = returns.iter().copied().collect();
    let mut points: Vec<&DailyPoint> = index.points.iter().collect();
    points.sort_by_key(|p| p.date);
    let mut out = Aligned::default();
    for p in points {
        if let Some(r) = returns.get(&p.date) {
            out.dates.push(p.date);
            out.sentiment.push(p.mean_composite);
            out.returns.push(*r);
        }
    }
    out
}

/// Population Pearson correlation, clamped to `[-1, 1]`.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::insufficient(format!(
            "series lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < MIN_CORRELATION_DAYS {
        return Err(Error::insufficient(format!(
            "correlation needs at least {MIN_CORRELATION_DAYS} points, have {}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateSeries("zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignAgreement {
    Concordant,
    Discordant,
    Indeterminate,
}

impl SignAgreement {
    pub fn as_str(self) -> &'static str {
        match self {
            SignAgreement::Concordant => "Concordant",
            SignAgreement::Discordant => "Discordant",
            SignAgreement::Indeterminate => "Indeterminate",
        }
    }
}

impl fmt::Display for SignAgreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn sign_agreement(mean_composite: f64, percent_change: f64) -> SignAgreement {
    if mean_composite == 0.0
        || percent_change == 0.0
        || mean_composite.is_nan()
        || percent_change.is_nan()
    {
        SignAgreement::Indeterminate
    } else if (mean_composite > 0.0) == (percent_change > 0.0) {
        SignAgreement::Concordant
    } else {
        SignAgreement::Discordant
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub ticker: String,
    pub n_docs: usize,
    pub mean_composite: f64,
    pub classification: Affinity,
    pub percent_change: f64,
    /// Opening-price change over the first and second half of the series,
    /// when it has an even number of bars.
    pub first_half_change: Option<f64>,
    pub second_half_change: Option<f64>,
    pub pearson_r: Option<f64>,
    pub n_aligned_days: usize,
    pub sign_agreement: SignAgreement,
    /// Per-day mean composite, including days without a trading session.
    pub daily_index: Vec<DailyPoint>,
}

/// Full per-ticker comparison of sentiment against prices.
///
/// Fails only when the series is too short for a price change; a missing
/// correlation is reported as `pearson_r: None`.
pub fn analyze(
    scored: &[ScoredDocument],
    series: &PriceSeries,
    ticker: &str,
    thresholds: &AffinityThresholds,
) -> Result<AnalysisResult> {
    let percent_change = percent_change_open(series)?;
    let aggregate = aggregate_by_ticker(scored, &[ticker], thresholds)
        .into_iter()
        .find(|a| a.ticker == ticker)
        .expect("configured ticker is always aggregated");

    let index = daily_index(scored, ticker);
    let aligned = align(&index, &daily_open_returns(series)?);
    let pearson_r = pearson(&aligned.sentiment, &aligned.returns).ok();

    let (first_half_change, second_half_change) = match split_halves(series) {
        Ok((a, b)) => (percent_change_open(&a).ok(), percent_change_open(&b).ok()),
        Err(_) => (None, None),
    };

    Ok(AnalysisResult {
        ticker: ticker.to_string(),
        n_docs: aggregate.n_docs,
        mean_composite: aggregate.mean_composite,
        classification: aggregate.classification,
        percent_change,
        first_half_change,
        second_half_change,
        pearson_r,
        n_aligned_days: aligned.len(),
        sign_agreement: sign_agreement(aggregate.mean_composite, percent_change),
        daily_index: index.points,
    })
}

pub fn render_analysis(result: &AnalysisResult) -> String {
    let mut s = serde_json::to_string_pretty(result).expect("analysis serializes");
    s.push('\n');
    s
}
