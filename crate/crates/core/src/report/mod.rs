//! Reports and pipeline orchestration.

pub mod config;
pub mod pipeline;
pub mod svg;

use crate::aggregation::{fixed6, rank_affinity, Affinity, TickerAggregate};
use crate::analysis::{AnalysisResult, SignAgreement};

pub use config::{ConfigFile, Overrides, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub ticker: String,
    pub n_docs: usize,
    pub mean_composite: f64,
    pub classification: Affinity,
    /// `None` when the price series was too short.
    pub percent_change: Option<f64>,
    pub sign_agreement: SignAgreement,
}

pub const SUMMARY_HEADER: &str =
    "ticker,n_docs,mean_composite,classification,percent_change,sign_agreement";

/// One row per aggregate, ordered by mean composite (highest first).
pub fn summary_rows(
    aggregates: &[TickerAggregate],
    analyses: &[AnalysisResult],
) -> Vec<SummaryRow> {
    rank_affinity(aggregates)
        .into_iter()
        .map(|key| {
            let agg = aggregates
                .iter()
                .find(|a| a.ticker == key)
                .expect("ranked key exists");
            let analysis = analyses.iter().find(|a| a.ticker == key);
            SummaryRow {
                ticker: key,
                n_docs: agg.n_docs,
                mean_composite: agg.mean_composite,
                classification: agg.classification,
                percent_change: analysis.map(|a| a.percent_change),
                sign_agreement: analysis.map_or(SignAgreement::Indeterminate, |a| a.sign_agreement),
            }
        })
        .collect()
}

pub fn render_summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.ticker,
            r.n_docs,
            fixed6(r.mean_composite),
            r.classification,
            r.percent_change.map(fixed6).unwrap_or_default(),
            r.sign_agreement
        ));
    }
    out
}
