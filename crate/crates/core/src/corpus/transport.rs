//! Where raw document and price payloads come from.
//!
//! Every transport returns the raw payload text: JSON lines for documents,
//! Yahoo-style CSV for prices. Parsing and validation happen in the caller,
//! so live and replayed data go through exactly the same code.
//!
//! Fixture layout, shared by [`ReplayTransport`] and [`RecordingTransport`]:
//!
//! ```text
//! <dir>/<KEY>/tweets.jsonl
//! <dir>/<KEY>/news.jsonl
//! <dir>/<KEY>/prices.csv
//! ```

use std::path::{Path, PathBuf};

use super::{Source, Ticker, TimeWindow};
use crate::error::{Error, Result};
use crate::fsutil;

pub struct DocumentRequest<'a> {
    pub ticker: &'a Ticker,
    pub source: Source,
    pub window: TimeWindow,
    pub query: &'a str,
}

pub struct PriceRequest<'a> {
    pub ticker: &'a Ticker,
    pub window: TimeWindow,
}

pub trait DocumentTransport: Send + Sync {
    fn fetch_documents(&self, request: &DocumentRequest<'_>) -> Result<String>;
}

pub trait PriceTransport: Send + Sync {
    fn fetch_prices(&self, request: &PriceRequest<'_>) -> Result<String>;
}

fn document_fixture(dir: &Path, ticker: &Ticker, source: Source) -> PathBuf {
    let file = match source {
        Source::Tweet => "tweets.jsonl",
        Source::News => "news.jsonl",
    };
    dir.join(ticker.key()).join(file)
}

fn price_fixture(dir: &Path, ticker: &Ticker) -> PathBuf {
    dir.join(ticker.key()).join("prices.csv")
}

/// Serves recorded payloads from a fixtures directory.
#[derive(Debug, Clone)]
pub struct ReplayTransport {
    dir: PathBuf,
}

impl ReplayTransport {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ReplayTransport { dir: dir.into() }
    }

    fn read(&self, path: &Path) -> Result<String> {
        if !path.is_file() {
            return Err(Error::transport(format!(
                "fixture missing: {}",
                path.display()
            )));
        }
        fsutil::read_to_string(path)
    }
}

impl DocumentTransport for ReplayTransport {
    fn fetch_documents(&self, request: &DocumentRequest<'_>) -> Result<String> {
        self.read(&document_fixture(&self.dir, request.ticker, request.source))
    }
}

impl PriceTransport for ReplayTransport {
    fn fetch_prices(&self, request: &PriceRequest<'_>) -> Result<String> {
        self.read(&price_fixture(&self.dir, request.ticker))
    }
}

/// Passes requests through to `inner` and saves each payload in the fixture
/// layout, so a live session can be replayed later.
pub struct RecordingTransport<T> {
    inner: T,
    dir: PathBuf,
}

impl<T> RecordingTransport<T> {
    pub fn new(inner: T, dir: impl Into<PathBuf>) -> Self {
        RecordingTransport {
            inner,
            dir: dir.into(),
        }
    }
}

impl<T: DocumentTransport> DocumentTransport for RecordingTransport<T> {
    fn fetch_documents(&self, request: &DocumentRequest<'_>) -> Result<String> {
        let payload = self.inner.fetch_documents(request)?;
        let path = document_fixture(&self.dir, request.ticker, request.source);
        fsutil::write_atomic(&path, payload.as_bytes())?;
        Ok(payload)
    }
}

impl<T: PriceTransport> PriceTransport for RecordingTransport<T> {
    fn fetch_prices(&self, request: &PriceRequest<'_>) -> Result<String> {
        let payload = self.inner.fetch_prices(request)?;
        fsutil::write_atomic(
            &price_fixture(&self.dir, request.ticker),
            payload.as_bytes(),
        )?;
        Ok(payload)
    }
}

#[cfg(feature = "live")]
pub use live::{HttpEndpoints, HttpTransport};

#[cfg(feature = "live")]
mod live {
    use std::time::Duration;

    use chrono::{NaiveDate, NaiveTime};
    use serde::{Deserialize, Serialize};

    use super::*;

    /// URL templates for the live feeds.
    ///
    /// Placeholders: `{query}`, `{key}`, `{source}`, `{start}`, `{end}`
    /// (YYYY-MM-DD) and `{period1}`, `{period2}` (Unix seconds, with
    /// `period2` at the end of the last day). Values are percent-encoded.
    #[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct HttpEndpoints {
        pub tweets: String,
        pub news: String,
        pub prices: String,
        /// Name of an environment variable holding a bearer token.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub token_env: Option<String>,
    }

    pub struct HttpTransport {
        endpoints: HttpEndpoints,
        client: reqwest::blocking::Client,
        token: Option<String>,
    }

    impl HttpTransport {
        pub fn new(endpoints: HttpEndpoints) -> Result<Self> {
            let token = match &endpoints.token_env {
                Some(var) => Some(std::env::var(var).map_err(|_| {
                    Error::Config(format!("environment variable {var} is not set"))
                })?),
                None => None,
            };
            let client = reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(30))
                .user_agent(concat!("esg-sentiment/", env!("CARGO_PKG_VERSION")))
                .build()
                .map_err(|e| Error::transport(format!("http client: {e}")))?;
            Ok(HttpTransport {
                endpoints,
                client,
                token,
            })
        }

        fn get(&self, url: &str) -> Result<String> {
            let mut req = self.client.get(url);
            if let Some(token) = &self.token {
                req = req.bearer_auth(token);
            }
            let resp = req
                .send()
                .map_err(|e| Error::transport(format!("GET {url}: {e}")))?;
            let status = resp.status();
            if !status.is_success() {
                return Err(Error::transport(format!("GET {url}: HTTP {status}")));
            }
            resp.text()
                .map_err(|e| Error::transport(format!("GET {url}: reading body: {e}")))
        }
    }

    fn encode(value: &str) -> String {
        url::form_urlencoded::byte_serialize(value.as_bytes()).collect()
    }

    fn unix_seconds(date: NaiveDate, time: NaiveTime) -> i64 {
        date.and_time(time).and_utc().timestamp()
    }

    pub(super) fn expand(template: &str, vars: &[(&str, String)]) -> String {
        let mut out = template.to_string();
        for (name, value) in vars {
            out = out.replace(&format!("{{{name}}}"), &encode(value));
        }
        out
    }

    fn window_vars(ticker: &Ticker, window: &TimeWindow) -> Vec<(&'static str, String)> {
        let last_second = NaiveTime::from_hms_opt(23, 59, 59).expect("valid time");
        vec![
            ("key", ticker.key().to_string()),
            ("start", window.start().to_string()),
            ("end", window.end().to_string()),
            (
                "period1",
                unix_seconds(window.start(), NaiveTime::MIN).to_string(),
            ),
            (
                "period2",
                unix_seconds(window.end(), last_second).to_string(),
            ),
        ]
    }

    impl DocumentTransport for HttpTransport {
        fn fetch_documents(&self, request: &DocumentRequest<'_>) -> Result<String> {
            let template = match request.source {
                Source::Tweet => &self.endpoints.tweets,
                Source::News => &self.endpoints.news,
            };
            let mut vars = window_vars(request.ticker, &request.window);
            vars.push(("query", request.query.to_string()));
            vars.push(("source", request.source.as_str().to_string()));
            self.get(&expand(template, &vars))
        }
    }

    impl PriceTransport for HttpTransport {
        fn fetch_prices(&self, request: &PriceRequest<'_>) -> Result<String> {
            let vars = window_vars(request.ticker, &request.window);
            self.get(&expand(&self.endpoints.prices, &vars))
        }
    }
}
