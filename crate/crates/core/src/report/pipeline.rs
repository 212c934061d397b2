//! File-to-file pipeline stages.
//!
//! ```text
//! ingest     fixtures or live feeds  -> corpus.jsonl
//! score      corpus.jsonl            -> scored.jsonl
//! aggregate  scored.jsonl            -> aggregates.csv
//! prices     fixtures or live feeds  -> prices/<KEY>.csv
//! analyze    scored + prices         -> analysis/<KEY>.json
//! report     scored + prices         -> summary.csv, charts/<KEY>.svg, analysis/<KEY>.json
//! ```
//!
//! Per-ticker work runs on the rayon pool; results are always collected in
//! configured ticker order, so outputs do not depend on scheduling.

use std::path::{Path, PathBuf};

use chrono::Duration;
use rayon::prelude::*;

use super::config::RunConfig;
use super::svg::render_candlestick;
use super::{render_summary_csv, summary_rows, SummaryRow};
use crate::aggregation::{aggregate_by_ticker, render_aggregates_csv, TickerAggregate};
use crate::analysis::{analyze as analyze_ticker, render_analysis, AnalysisResult};
use crate::corpus::{
    dedupe, fetch_documents, read_corpus, sort_documents, write_corpus, Document,
    DocumentTransport, PriceTransport, ReplayTransport, TimeWindow,
};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::market::{fetch_prices, load_prices, render_prices, tail_n, PriceSeries};
use crate::sentiment::{
    import_external_verdicts, read_scored, render_scored, score_corpus, Lexicon, ScoredDocument,
};

#[cfg(feature = "live")]
use crate::corpus::{HttpTransport, RecordingTransport};

/// Output file locations under the run's `out` directory.
#[derive(Debug, Clone)]
pub struct OutputPaths {
    root: PathBuf,
}

impl OutputPaths {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        OutputPaths { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn corpus(&self) -> PathBuf {
        self.root.join("corpus.jsonl")
    }

    pub fn scored(&self) -> PathBuf {
        self.root.join("scored.jsonl")
    }

    pub fn aggregates(&self) -> PathBuf {
        self.root.join("aggregates.csv")
    }

    pub fn summary(&self) -> PathBuf {
        self.root.join("summary.csv")
    }

    pub fn prices(&self, key: &str) -> PathBuf {
        self.root.join("prices").join(format!("{key}.csv"))
    }

    pub fn analysis(&self, key: &str) -> PathBuf {
        self.root.join("analysis").join(format!("{key}.json"))
    }

    pub fn chart(&self, key: &str) -> PathBuf {
        self.root.join("charts").join(format!("{key}.svg"))
    }
}

/// A transport that serves both documents and prices.
pub trait Feeds: DocumentTransport + PriceTransport {}

impl<T: DocumentTransport + PriceTransport> Feeds for T {}

/// Live feeds when endpoints are configured, replayed fixtures otherwise.
pub fn open_feeds(cfg: &RunConfig) -> Result<Box<dyn Feeds>> {
    #[cfg(feature = "live")]
    if let Some(endpoints) = &cfg.endpoints {
        let http = HttpTransport::new(endpoints.clone())?;
        return Ok(match (&cfg.fixtures, cfg.record) {
            (Some(dir), true) => Box::new(RecordingTransport::new(http, dir.clone())),
            _ => Box::new(http),
        });
    }
    let dir = cfg
        .fixtures
        .clone()
        .ok_or_else(|| Error::Config("no fixtures directory configured (use --fixtures)".into()))?;
    Ok(Box::new(ReplayTransport::new(dir)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestOutcome {
    pub counts: Vec<(String, usize)>,
    pub total: usize,
}

pub fn ingest(cfg: &RunConfig) -> Result<IngestOutcome> {
    let feeds = open_feeds(cfg)?;
    let mode = cfg.schema_mode();
    let fetched: Vec<Vec<Document>> = cfg
        .tickers
        .par_iter()
        .map(|t| fetch_documents(t, &cfg.window, feeds.as_ref(), mode))
        .collect::<Result<_>>()?;

    let counts = cfg
        .tickers
        .iter()
        .zip(&fetched)
        .map(|(t, docs)| (t.key().to_string(), docs.len()))
        .collect();
    let mut docs = dedupe(fetched.into_iter().flatten().collect());
    sort_documents(&mut docs);
    if docs.is_empty() {
        log::warn!("no documents found in window {}", cfg.window);
    }
    write_corpus(&OutputPaths::new(&cfg.out).corpus(), &docs)?;
    Ok(IngestOutcome {
        counts,
        total: docs.len(),
    })
}

pub fn load_lexicon(cfg: &RunConfig) -> Result<Lexicon> {
    match &cfg.lexicon {
        Some(dir) => Lexicon::load_dir(dir),
        None => Ok(Lexicon::default_financial()),
    }
}

pub fn score(cfg: &RunConfig) -> Result<Vec<ScoredDocument>> {
    let paths = OutputPaths::new(&cfg.out);
    let corpus_path = paths.corpus();
    if !corpus_path.is_file() {
        return Err(Error::Config(format!(
            "corpus not found at {} (run ingest first)",
            corpus_path.display()
        )));
    }
    let docs = read_corpus(&corpus_path, cfg.schema_mode())?;
    let lexicon = load_lexicon(cfg)?;
    let external = cfg
        .external_verdicts
        .as_deref()
        .map(import_external_verdicts)
        .transpose()?;
    let scored = score_corpus(&docs, &lexicon, external.as_ref());
    write_atomic(&paths.scored(), render_scored(&scored).as_bytes())?;
    Ok(scored)
}

fn read_scored_output(paths: &OutputPaths) -> Result<Vec<ScoredDocument>> {
    let path = paths.scored();
    if !path.is_file() {
        return Err(Error::Config(format!(
            "scored file not found at {} (run score first)",
            path.display()
        )));
    }
    read_scored(&path)
}

pub fn aggregate(cfg: &RunConfig) -> Result<Vec<TickerAggregate>> {
    let paths = OutputPaths::new(&cfg.out);
    let scored = read_scored_output(&paths)?;
    let aggregates = aggregate_by_ticker(&scored, &cfg.ticker_keys(), &cfg.thresholds);
    write_atomic(
        &paths.aggregates(),
        render_aggregates_csv(&aggregates).as_bytes(),
    )?;
    Ok(aggregates)
}

/// Calendar lookback requested from price feeds: enough to cover
/// `price_days` trading sessions plus holidays.
pub fn price_window(cfg: &RunConfig) -> TimeWindow {
    let days = cfg.price_days as i64 * 7 / 5 + 14;
    let end = cfg.window.end();
    TimeWindow::new(end - Duration::days(days), end).expect("lookback precedes end")
}

/// Fetches prices, keeps bars up to the document window's end and then the
/// last `price_days` of them.
pub fn prices(cfg: &RunConfig) -> Result<Vec<PriceSeries>> {
    let feeds = open_feeds(cfg)?;
    let paths = OutputPaths::new(&cfg.out);
    let window = price_window(cfg);
    let series: Vec<PriceSeries> = cfg
        .tickers
        .par_iter()
        .map(|t| {
            let full = fetch_prices(t, &window, feeds.as_ref())?;
            Ok(tail_n(&full.until(cfg.window.end()), cfg.price_days))
        })
        .collect::<Result<_>>()?;
    for s in &series {
        if s.len() < cfg.price_days {
            log::warn!(
                "{}: only {} of {} requested trading days available",
                s.ticker(),
                s.len(),
                cfg.price_days
            );
        }
        write_atomic(&paths.prices(s.ticker()), render_prices(s).as_bytes())?;
    }
    Ok(series)
}

fn load_price_outputs(cfg: &RunConfig, paths: &OutputPaths) -> Result<Vec<PriceSeries>> {
    cfg.tickers
        .iter()
        .map(|t| {
            let path = paths.prices(t.key());
            if !path.is_file() {
                return Err(Error::Config(format!(
                    "prices not found at {} (run prices first)",
                    path.display()
                )));
            }
            load_prices(&path, t.key())
        })
        .collect()
}

/// Per-ticker analysis outcome; `None` when the price series was too short.
pub type TickerAnalysis = (String, Option<AnalysisResult>);

fn analyze_all(
    cfg: &RunConfig,
    scored: &[ScoredDocument],
    series: &[PriceSeries],
) -> Result<Vec<TickerAnalysis>> {
    cfg.tickers
        .par_iter()
        .zip(series)
        .map(
            |(t, s)| match analyze_ticker(scored, s, t.key(), &cfg.thresholds) {
                Ok(r) => Ok((t.key().to_string(), Some(r))),
                Err(Error::InsufficientData(msg)) => {
                    log::warn!("{}: skipping analysis: {msg}", t.key());
                    Ok((t.key().to_string(), None))
                }
                Err(e) => Err(e),
            },
        )
        .collect()
}

fn write_analyses(paths: &OutputPaths, analyses: &[TickerAnalysis]) -> Result<()> {
    for (key, result) in analyses {
        if let Some(r) = result {
            write_atomic(&paths.analysis(key), render_analysis(r).as_bytes())?;
        }
    }
    Ok(())
}

pub fn analyze(cfg: &RunConfig) -> Result<Vec<TickerAnalysis>> {
    let paths = OutputPaths::new(&cfg.out);
    let scored = read_scored_output(&paths)?;
    let series = load_price_outputs(cfg, &paths)?;
    let analyses = analyze_all(cfg, &scored, &series)?;
    write_analyses(&paths, &analyses)?;
    Ok(analyses)
}

pub fn report(cfg: &RunConfig) -> Result<Vec<SummaryRow>> {
    let paths = OutputPaths::new(&cfg.out);
    let scored = read_scored_output(&paths)?;
    let series = load_price_outputs(cfg, &paths)?;
    let analyses = analyze_all(cfg, &scored, &series)?;
    write_analyses(&paths, &analyses)?;

    let keys = cfg.ticker_keys();
    let scored_here: Vec<ScoredDocument> = scored
        .into_iter()
        .filter(|s| keys.contains(&s.ticker.as_str()))
        .collect();
    let aggregates = aggregate_by_ticker(&scored_here, &keys, &cfg.thresholds);
    let done: Vec<AnalysisResult> = analyses.into_iter().filter_map(|(_, r)| r).collect();
    let rows = summary_rows(&aggregates, &done);
    write_atomic(&paths.summary(), render_summary_csv(&rows).as_bytes())?;

    for (t, s) in cfg.tickers.iter().zip(&series) {
        let title = format!(
            "{} ({}), daily candles, {} sessions",
            t.display_name(),
            t.key(),
            s.len()
        );
        write_atomic(
            &paths.chart(t.key()),
            render_candlestick(s, &title).as_bytes(),
        )?;
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub ingest: IngestOutcome,
    pub n_scored: usize,
    pub rows: Vec<SummaryRow>,
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let ingest = ingest(cfg)?;
    let n_scored = score(cfg)?.len();
    aggregate(cfg)?;
    prices(cfg)?;
    let rows = report(cfg)?;
    Ok(RunOutcome {
        ingest,
        n_scored,
        rows,
    })
}
