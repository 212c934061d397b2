//! Run configuration: a JSON file merged with command-line overrides.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::aggregation::AffinityThresholds;
use crate::corpus::{SchemaMode, Ticker, TimeWindow};
use crate::error::{Error, Result};
use crate::fsutil;

#[cfg(feature = "live")]
use crate::corpus::HttpEndpoints;

pub const DEFAULT_PRICE_DAYS: usize = 20;

/// Config file layout. Every field is optional so flags can fill the gaps.
/// Relative paths are resolved against the config file's directory.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub tickers: Option<Vec<Ticker>>,
    pub window: Option<TimeWindow>,
    pub price_days: Option<usize>,
    pub thresholds: Option<AffinityThresholds>,
    pub fixtures: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub external_verdicts: Option<PathBuf>,
    pub strict: Option<bool>,
    /// Live feed URL templates; see `HttpEndpoints`.
    pub endpoints: Option<serde_json::Value>,
    /// Save live payloads into the fixtures directory.
    pub record: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fsutil::read_to_string(path)?;
        let mut cfg: ConfigFile = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.fixtures,
            &mut cfg.out,
            &mut cfg.lexicon,
            &mut cfg.external_verdicts,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Command-line values; `Some` wins over the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub tickers: Option<Vec<Ticker>>,
    pub window: Option<TimeWindow>,
    pub price_days: Option<usize>,
    pub thresholds: Option<AffinityThresholds>,
    pub fixtures: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub external_verdicts: Option<PathBuf>,
    pub strict: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub tickers: Vec<Ticker>,
    pub window: TimeWindow,
    pub price_days: usize,
    pub thresholds: AffinityThresholds,
    pub fixtures: Option<PathBuf>,
    pub out: PathBuf,
    pub lexicon: Option<PathBuf>,
    pub external_verdicts: Option<PathBuf>,
    pub strict: bool,
    #[cfg(feature = "live")]
    pub endpoints: Option<HttpEndpoints>,
    pub record: bool,
}

impl RunConfig {
    pub fn resolve(file: ConfigFile, flags: Overrides) -> Result<Self> {
        let tickers = flags
            .tickers
            .or(file.tickers)
            .ok_or_else(|| Error::Config("no tickers configured (use --tickers)".into()))?;
        let window = flags
            .window
            .or(file.window)
            .ok_or_else(|| Error::Config("no document window configured (use --window)".into()))?;
        let cfg = RunConfig {
            tickers,
            window,
            price_days: flags
                .price_days
                .or(file.price_days)
                .unwrap_or(DEFAULT_PRICE_DAYS),
            thresholds: flags.thresholds.or(file.thresholds).unwrap_or_default(),
            fixtures: flags.fixtures.or(file.fixtures),
            out: flags
                .out
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("out")),
            lexicon: flags.lexicon.or(file.lexicon),
            external_verdicts: flags.external_verdicts.or(file.external_verdicts),
            strict: flags.strict || file.strict.unwrap_or(false),
            #[cfg(feature = "live")]
            endpoints: file
                .endpoints
                .map(serde_json::from_value)
                .transpose()
                .map_err(|e| Error::Config(format!("endpoints: {e}")))?,
            record: file.record.unwrap_or(false),
        };
        #[cfg(not(feature = "live"))]
        if file.endpoints.is_some() {
            return Err(Error::Config(
                "endpoints configured but live transports are not compiled in".into(),
            ));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tickers.is_empty() {
            return Err(Error::Config("at least one ticker is required".into()));
        }
        let mut seen = HashSet::new();
        for t in &self.tickers {
            if !seen.insert(t.key()) {
                return Err(Error::Config(format!("ticker {} listed twice", t.key())));
            }
        }
        if self.price_days < 2 {
            return Err(Error::Config(format!(
                "price_days must be at least 2, got {}",
                self.price_days
            )));
        }
        if self.record && self.fixtures.is_none() {
            return Err(Error::Config("record requires a fixtures directory".into()));
        }
        Ok(())
    }

    pub fn schema_mode(&self) -> SchemaMode {
        if self.strict {
            SchemaMode::Strict
        } else {
            SchemaMode::Lenient
        }
    }

    pub fn ticker_keys(&self) -> Vec<&str> {
        self.tickers.iter().map(Ticker::key).collect()
    }
}
