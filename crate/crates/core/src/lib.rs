//! ESG sentiment pipeline.
//!
//! Ingests ticker-tagged tweets and news headlines, scores them against a
//! financial polarity lexicon (or imports verdicts produced by an external
//! classifier), folds the signed composite scores into per-company
//! aggregates and ESG-affinity classes, and relates the daily sentiment
//! index to opening-price movements.
//!
//! Stages communicate through plain files (JSON lines, CSV, SVG), so every
//! stage can be run and tested on its own; see [`report::pipeline`].

pub mod aggregation;
pub mod analysis;
pub mod corpus;
pub mod error;
pub mod fsutil;
pub mod market;
pub mod report;
pub mod sentiment;

pub use error::{Error, Result};
