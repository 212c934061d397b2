//! Per-company aggregation of composite scores and ESG-affinity classes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sentiment::ScoredDocument;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Affinity {
    Averse,
    Neutral,
    Affine,
}

impl Affinity {
    pub fn as_str(self) -> &'static str {
        match self {
            Affinity::Averse => "Averse",
            Affinity::Neutral => "Neutral",
            Affinity::Affine => "Affine",
        }
    }
}

impl fmt::Display for Affinity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Mean-composite cut-offs: `mean >= affine_min` is affine, `mean <= averse_max` is averse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ThresholdsRepr")]
pub struct AffinityThresholds {
    affine_min: f64,
    averse_max: f64,
}

/// Either `"AFFINE,AVERSE"` or `{"affine_min": .., "averse_max": ..}`.
#[derive(Deserialize)]
#[serde(untagged)]
enum ThresholdsRepr {
    Pair(String),
    Fields { affine_min: f64, averse_max: f64 },
}

impl TryFrom<ThresholdsRepr> for AffinityThresholds {
    type Error = Error;

    fn try_from(r: ThresholdsRepr) -> Result<Self> {
        match r {
            ThresholdsRepr::Pair(s) => s.parse(),
            ThresholdsRepr::Fields {
                affine_min,
                averse_max,
            } => AffinityThresholds::new(affine_min, averse_max),
        }
    }
}

impl AffinityThresholds {
    pub fn new(affine_min: f64, averse_max: f64) -> Result<Self> {
        if !(averse_max < 0.0 && 0.0 < affine_min)
            || !affine_min.is_finite()
            || !averse_max.is_finite()
        {
            return Err(Error::Config(format!(
                "thresholds must satisfy averse_max < 0 < affine_min, got affine {affine_min}, averse {averse_max}"
            )));
        }
        Ok(AffinityThresholds {
            affine_min,
            averse_max,
        })
    }

    pub fn affine_min(&self) -> f64 {
        self.affine_min
    }

    pub fn averse_max(&self) -> f64 {
        self.averse_max
    }

    pub fn classify(&self, mean: f64) -> Affinity {
        if mean >= self.affine_min {
            Affinity::Affine
        } else if mean <= self.averse_max {
            Affinity::Averse
        } else {
            Affinity::Neutral
        }
    }
}

impl Default for AffinityThresholds {
    fn default() -> Self {
        AffinityThresholds {
            affine_min: 0.15,
            averse_max: -0.15,
        }
    }
}

impl FromStr for AffinityThresholds {
    type Err = Error;

    /// `AFFINE,AVERSE`, e.g. `0.15,-0.15`.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::Config(format!("thresholds {s:?}: expected AFFINE,AVERSE")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("thresholds {s:?}: {e}")))
        };
        AffinityThresholds::new(parse(a)?, parse(b)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickerAggregate {
    pub ticker: String,
    pub n_docs: usize,
    pub sum_composite: f64,
    pub mean_composite: f64,
    pub classification: Affinity,
}

pub fn classify(aggregate: &TickerAggregate, thresholds: &AffinityThresholds) -> Affinity {
    thresholds.classify(aggregate.mean_composite)
}

/// One aggregate per ticker seen in `scored` or listed in `tickers`,
/// sorted by ticker key. Composites are summed in `(timestamp, id)` order
/// so the result does not depend on input order.
pub fn aggregate_by_ticker<S: AsRef<str>>(
    scored: &[ScoredDocument],
    tickers: &[S],
    thresholds: &AffinityThresholds,
) -> Vec<TickerAggregate> {
    let mut groups: BTreeMap<&str, Vec<&ScoredDocument>> = BTreeMap::new();
    for t in tickers {
        groups.entry(t.as_ref()).or_default();
    }
    for s in scored {
        groups.entry(s.ticker.as_str()).or_default().push(s);
    }
    groups
        .into_iter()
        .map(|(ticker, mut docs)| {
            docs.sort_by(|a, b| {
                (a.timestamp, &a.key.id, a.key.source).cmp(&(b.timestamp, &b.key.id, b.key.source))
            });
            let n_docs = docs.len();
            let sum: f64 = docs.iter().map(|s| s.composite.value()).sum();
            let mean = if n_docs == 0 {
                0.0
            } else {
                sum / n_docs as f64
            };
            TickerAggregate {
                ticker: ticker.to_string(),
                n_docs,
                sum_composite: sum,
                mean_composite: mean,
                classification: thresholds.classify(mean),
            }
        })
        .collect()
}

/// Ticker keys by mean composite, highest first; ties by key.
pub fn rank_affinity(aggregates: &[TickerAggregate]) -> Vec<String> {
    let mut sorted: Vec<&TickerAggregate> = aggregates.iter().collect();
    sorted.sort_by(|a, b| {
        b.mean_composite
            .total_cmp(&a.mean_composite)
            .then_with(|| a.ticker.cmp(&b.ticker))
    });
    sorted.into_iter().map(|a| a.ticker.clone()).collect()
}

/// Six-decimal fixed point, never printing a negative zero.
pub fn fixed6(value: f64) -> String {
    let s = format!("{value:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

pub const AGGREGATE_HEADER: &str = "ticker,n_docs,sum_composite,mean_composite,classification";

pub fn render_aggregates_csv(aggregates: &[TickerAggregate]) -> String {
    let mut out = String::from(AGGREGATE_HEADER);
    out.push('\n');
    for a in aggregates {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            a.ticker,
            a.n_docs,
            fixed6(a.sum_composite),
            fixed6(a.mean_composite),
            a.classification
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{DocKey, Source};
    use crate::sentiment::{composite, SentimentLabel, SentimentVerdict, VerdictOrigin};
    use chrono::{TimeZone, Utc};

    fn scored(ticker: &str, id: &str, value: f64) -> ScoredDocument {
        let label = if value > 0.0 {
            SentimentLabel::Positive
        } else if value < 0.0 {
            SentimentLabel::Negative
        } else {
            SentimentLabel::Neutral
        };
        let verdict = SentimentVerdict::new(label, value.abs()).unwrap();
        ScoredDocument {
            key: DocKey {
                source: Source::Tweet,
                id: id.into(),
            },
            ticker: ticker.into(),
            timestamp: Utc.with_ymd_and_hms(2022, 7, 20, 10, 0, 0).unwrap(),
            verdict,
            composite: composite(&verdict),
            origin: VerdictOrigin::External,
        }
    }

    fn agg(ticker: &str, mean: f64) -> TickerAggregate {
        TickerAggregate {
            ticker: ticker.into(),
            n_docs: 1,
            sum_composite: mean,
            mean_composite: mean,
            classification: AffinityThresholds::default().classify(mean),
        }
    }

    #[test]
    fn sums_and_means() {
        let docs = [
            scored("GS", "a", 0.9),
            scored("GS", "b", -0.4),
            scored("GS", "c", 0.5),
        ];
        let out = aggregate_by_ticker(&docs, &["GS"], &AffinityThresholds::default());
        assert_eq!(out.len(), 1);
        assert!((out[0].sum_composite - 1.0).abs() < 1e-12);
        assert!((out[0].mean_composite - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(out[0].classification, Affinity::Affine);
    }

    #[test]
    fn configured_tickers_without_documents() {
        let out = aggregate_by_ticker(&[], &["TSLA", "AMZN"], &AffinityThresholds::default());
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].ticker, "AMZN");
        for a in &out {
            assert_eq!((a.n_docs, a.sum_composite, a.mean_composite), (0, 0.0, 0.0));
            assert_eq!(a.classification, Affinity::Neutral);
        }
    }

    #[test]
    fn singleton() {
        let out = aggregate_by_ticker::<&str>(
            &[scored("HSBC", "a", -0.8)],
            &[],
            &AffinityThresholds::default(),
        );
        assert_eq!((out[0].sum_composite, out[0].mean_composite), (-0.8, -0.8));
        assert_eq!(out[0].classification, Affinity::Averse);
    }

    #[test]
    fn classification_rule() {
        let t = AffinityThresholds::default();
        assert_eq!(t.classify(0.6), Affinity::Affine);
        assert_eq!(t.classify(-0.5), Affinity::Averse);
        assert_eq!(t.classify(0.0), Affinity::Neutral);
        assert_eq!(t.classify(0.15), Affinity::Affine);
        assert_eq!(t.classify(-0.15), Affinity::Averse);
        assert_eq!(t.classify(0.149), Affinity::Neutral);
        assert_eq!(classify(&agg("X", 0.6), &t), Affinity::Affine);
    }

    #[test]
    fn thresholds_validate() {
        assert!(AffinityThresholds::new(0.1, 0.1).is_err());
        assert!(AffinityThresholds::new(0.0, -0.1).is_err());
        assert!(AffinityThresholds::new(f64::INFINITY, -0.1).is_err());
        let t: AffinityThresholds = "0.2,-0.3".parse().unwrap();
        assert_eq!((t.affine_min(), t.averse_max()), (0.2, -0.3));
        assert!("0.2".parse::<AffinityThresholds>().is_err());
    }

    #[test]
    fn thresholds_deserialize_from_string_or_fields() {
        let a: AffinityThresholds = serde_json::from_str(r#""0.2,-0.3""#).unwrap();
        let b: AffinityThresholds =
            serde_json::from_str(r#"{"affine_min":0.2,"averse_max":-0.3}"#).unwrap();
        assert_eq!(a, b);
        assert!(serde_json::from_str::<AffinityThresholds>(r#""-0.2,0.3""#).is_err());
    }

    #[test]
    fn ranking() {
        let aggs = [
            agg("HSBC", -0.7),
            agg("TSLA", 0.3),
            agg("GS", 0.8),
            agg("AMZN", 0.6),
        ];
        assert_eq!(rank_affinity(&aggs), ["GS", "AMZN", "TSLA", "HSBC"]);
        let ties = [agg("TSLA", 0.1), agg("AMZN", 0.1), agg("GS", 0.1)];
        assert_eq!(rank_affinity(&ties), ["AMZN", "GS", "TSLA"]);
        assert_eq!(rank_affinity(&[agg("GS", 0.0)]), ["GS"]);
    }

    #[test]
    fn csv_layout() {
        let csv = render_aggregates_csv(&[agg("GS", 1.0 / 3.0), agg("HSBC", -1e-9)]);
        assert_eq!(
            csv,
            "ticker,n_docs,sum_composite,mean_composite,classification\n\
             GS,1,0.333333,0.333333,Affine\n\
             HSBC,1,0.000000,0.000000,Neutral\n"
        );
    }
}
