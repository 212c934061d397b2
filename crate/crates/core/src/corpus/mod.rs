//! Document model and ingestion.
//!
//! A corpus is a list of ticker-tagged [`Document`]s (tweets or news
//! headlines) persisted as one JSON object per line. Documents are fetched
//! through a [`DocumentTransport`], filtered to a closed calendar-date
//! [`TimeWindow`], de-duplicated on `(source, id)` and sorted by
//! `(timestamp, id)` so that re-running an ingest produces the same file.

pub mod transport;

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, Duration, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::fsutil;

pub use transport::{
    DocumentRequest, DocumentTransport, PriceRequest, PriceTransport, RecordingTransport,
    ReplayTransport,
};

#[cfg(feature = "live")]
pub use transport::{HttpEndpoints, HttpTransport};

/// Documents window length used when only an end date is given.
pub const DEFAULT_DOCUMENT_DAYS: u32 = 10;

const QUERY_PREFIX: &str = "ESG Investing ";

/// A company identifier shared by documents, prices and reports.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TickerRepr", into = "TickerRepr")]
pub struct Ticker {
    key: String,
    display_name: String,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TickerRepr {
    Key(String),
    Full {
        key: String,
        #[serde(default)]
        name: Option<String>,
    },
}

impl TryFrom<TickerRepr> for Ticker {
    type Error = Error;

    fn try_from(repr: TickerRepr) -> Result<Self> {
        match repr {
            TickerRepr::Key(key) | TickerRepr::Full { key, name: None } => Ticker::from_key(&key),
            TickerRepr::Full {
                key,
                name: Some(name),
            } => Ticker::new(key, name),
        }
    }
}

impl From<Ticker> for TickerRepr {
    fn from(t: Ticker) -> Self {
        TickerRepr::Full {
            key: t.key,
            name: Some(t.display_name),
        }
    }
}

impl Ticker {
    pub fn new(key: impl Into<String>, display_name: impl Into<String>) -> Result<Self> {
        let key = key.into();
        validate_ticker_key(&key)?;
        let display_name = display_name.into().trim().to_string();
        if display_name.is_empty() {
            return Err(Error::Config(format!("ticker {key}: empty display name")));
        }
        Ok(Ticker { key, display_name })
    }

    /// Builds a ticker from its key, using the well-known company name when
    /// there is one and the key itself otherwise.
    pub fn from_key(key: &str) -> Result<Self> {
        let name = match key {
            "HSBC" => "HSBC",
            "TSLA" => "Tesla",
            "AMZN" => "Amazon",
            "GS" => "Goldman Sachs",
            other => other,
        };
        Ticker::new(key, name)
    }

    /// Parses `KEY` or `KEY=Display Name`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        match spec.split_once('=') {
            Some((key, name)) => Ticker::new(key.trim(), name),
            None => Ticker::from_key(spec.trim()),
        }
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn display_name(&self) -> &str {
        &self.display_name
    }

    pub fn query_label(&self) -> String {
        format!("{QUERY_PREFIX}{}", self.display_name)
    }
}

impl fmt::Display for Ticker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key)
    }
}

fn validate_ticker_key(key: &str) -> Result<()> {
    let ok = !key.is_empty()
        && key
            .chars()
            .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '.' || c == '-');
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "invalid ticker key {key:?}: expected non-empty uppercase identifier"
        )))
    }
}

/// The search query used to collect documents for a ticker.
pub fn build_query(ticker: &Ticker) -> String {
    ticker.query_label()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Tweet,
    News,
}

impl Source {
    pub const ALL: [Source; 2] = [Source::Tweet, Source::News];

    pub fn as_str(self) -> &'static str {
        match self {
            Source::Tweet => "tweet",
            Source::News => "news",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tweet" => Ok(Source::Tweet),
            "news" => Ok(Source::News),
            other => Err(Error::schema(format!("unknown source {other:?}"))),
        }
    }
}

/// Identity of a document across stages.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DocKey {
    pub source: Source,
    pub id: String,
}

/// One tweet or news headline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub source: Source,
    #[serde(with = "rfc3339_utc")]
    pub timestamp: DateTime<Utc>,
    pub ticker: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub followers: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub place: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
}

const DOCUMENT_FIELDS: [&str; 10] = [
    "id",
    "source",
    "timestamp",
    "ticker",
    "text",
    "author",
    "followers",
    "place",
    "url",
    "title",
];

impl Document {
    pub fn key(&self) -> DocKey {
        DocKey {
            source: self.source,
            id: self.id.clone(),
        }
    }

    /// The text the sentiment scorer sees: the headline for news, the body for tweets.
    pub fn scoring_text(&self) -> &str {
        match (self.source, &self.title) {
            (Source::News, Some(title)) if !title.trim().is_empty() => title,
            _ => &self.text,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::schema("document has empty id"));
        }
        if self.text.trim().is_empty() {
            return Err(Error::schema(format!(
                "document {}/{} has empty text",
                self.source, self.id
            )));
        }
        validate_ticker_key(&self.ticker).map_err(|_| {
            Error::schema(format!(
                "document {}: bad ticker {:?}",
                self.id, self.ticker
            ))
        })
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("document serializes")
    }
}

/// How unknown fields in input records are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchemaMode {
    Strict,
    #[default]
    Lenient,
}

/// Parses one corpus line. Unknown fields are an error in strict mode and
/// are dropped with a warning otherwise.
pub fn parse_document_line(line: &str, mode: SchemaMode) -> Result<Document> {
    let value: Value = serde_json::from_str(line)
        .map_err(|e| Error::schema(format!("malformed document JSON: {e}")))?;
    let Value::Object(mut map) = value else {
        return Err(Error::schema("document line is not a JSON object"));
    };
    strip_unknown_fields(&mut map, mode)?;
    let doc: Document = serde_json::from_value(Value::Object(map))
        .map_err(|e| Error::schema(format!("invalid document: {e}")))?;
    doc.validate()?;
    Ok(doc)
}

fn strip_unknown_fields(map: &mut Map<String, Value>, mode: SchemaMode) -> Result<()> {
    let unknown: Vec<String> = map
        .keys()
        .filter(|k| !DOCUMENT_FIELDS.contains(&k.as_str()))
        .cloned()
        .collect();
    if unknown.is_empty() {
        return Ok(());
    }
    match mode {
        SchemaMode::Strict => Err(Error::schema(format!(
            "unknown document field(s): {}",
            unknown.join(", ")
        ))),
        SchemaMode::Lenient => {
            log::warn!("ignoring unknown document field(s): {}", unknown.join(", "));
            for k in unknown {
                map.remove(&k);
            }
            Ok(())
        }
    }
}

/// Parses a JSON-lines payload, skipping blank lines.
pub fn parse_document_lines(payload: &str, mode: SchemaMode) -> Result<Vec<Document>> {
    payload
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            parse_document_line(l, mode).map_err(|e| Error::schema(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn read_corpus(path: &Path, mode: SchemaMode) -> Result<Vec<Document>> {
    let text = fsutil::read_to_string(path)?;
    parse_document_lines(&text, mode).map_err(|e| Error::schema(format!("{}: {e}", path.display())))
}

pub fn render_corpus(docs: &[Document]) -> String {
    let mut out = String::new();
    for doc in docs {
        out.push_str(&doc.to_json_line());
        out.push('\n');
    }
    out
}

pub fn write_corpus(path: &Path, docs: &[Document]) -> Result<()> {
    fsutil::write_atomic(path, render_corpus(docs).as_bytes())
}

/// A closed range of UTC calendar dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TimeWindow {
    start: NaiveDate,
    end: NaiveDate,
}

impl TimeWindow {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if start > end {
            return Err(Error::Config(format!(
                "window start {start} is after end {end}"
            )));
        }
        Ok(TimeWindow { start, end })
    }

    /// The `days` calendar days ending at (and including) `end`.
    pub fn ending(end: NaiveDate, days: u32) -> Result<Self> {
        if days == 0 {
            return Err(Error::Config(
                "window length must be at least one day".into(),
            ));
        }
        TimeWindow::new(end - Duration::days(i64::from(days) - 1), end)
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn end(&self) -> NaiveDate {
        self.end
    }

    pub fn contains_date(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }

    pub fn contains(&self, ts: &DateTime<Utc>) -> bool {
        self.contains_date(ts.date_naive())
    }
}

impl fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}

impl FromStr for TimeWindow {
    type Err = Error;

    /// Accepts `START:END`, or `:END` for the default-length window ending at END.
    fn from_str(s: &str) -> Result<Self> {
        let (start, end) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("window {s:?}: expected START:END")))?;
        let parse = |d: &str| {
            NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d")
                .map_err(|e| Error::Config(format!("window {s:?}: bad date {d:?}: {e}")))
        };
        let end = parse(end)?;
        if start.trim().is_empty() {
            TimeWindow::ending(end, DEFAULT_DOCUMENT_DAYS)
        } else {
            TimeWindow::new(parse(start)?, end)
        }
    }
}

impl TryFrom<String> for TimeWindow {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TimeWindow> for String {
    fn from(w: TimeWindow) -> Self {
        w.to_string()
    }
}

/// Sorts by `(timestamp, id)`, with source as the final tie-breaker.
pub fn sort_documents(docs: &mut [Document]) {
    docs.sort_by(|a, b| (a.timestamp, &a.id, a.source).cmp(&(b.timestamp, &b.id, b.source)));
}

/// Removes repeated `(source, id)` records. The earliest record by
/// `(timestamp, id)` wins (first in input order on a full tie); survivors
/// keep their input order.
pub fn dedupe(docs: Vec<Document>) -> Vec<Document> {
    let mut winner: HashMap<DocKey, usize> = HashMap::with_capacity(docs.len());
    for (i, doc) in docs.iter().enumerate() {
        winner
            .entry(doc.key())
            .and_modify(|w| {
                if doc.timestamp < docs[*w].timestamp {
                    *w = i;
                }
            })
            .or_insert(i);
    }
    docs.into_iter()
        .enumerate()
        .filter(|(i, doc)| winner[&doc.key()] == *i)
        .map(|(_, doc)| doc)
        .collect()
}

/// Keeps documents whose UTC date lies in the window, preserving order.
pub fn filter_window(docs: Vec<Document>, window: &TimeWindow) -> Vec<Document> {
    docs.into_iter()
        .filter(|d| window.contains(&d.timestamp))
        .collect()
}

/// Fetches tweets and news for one ticker, then filters to the window,
/// de-duplicates and sorts.
pub fn fetch_documents<T: DocumentTransport + ?Sized>(
    ticker: &Ticker,
    window: &TimeWindow,
    transport: &T,
    mode: SchemaMode,
) -> Result<Vec<Document>> {
    let query = build_query(ticker);
    let mut docs = Vec::new();
    for source in Source::ALL {
        let request = DocumentRequest {
            ticker,
            source,
            window: *window,
            query: &query,
        };
        let payload = transport.fetch_documents(&request)?;
        for doc in parse_document_lines(&payload, mode)? {
            if doc.ticker != ticker.key() || doc.source != source {
                let msg = format!(
                    "{} feed for {ticker} returned {}/{} tagged {}",
                    source, doc.source, doc.id, doc.ticker
                );
                match mode {
                    SchemaMode::Strict => return Err(Error::schema(msg)),
                    SchemaMode::Lenient => {
                        log::warn!("dropping record: {msg}");
                        continue;
                    }
                }
            }
            docs.push(doc);
        }
    }
    let mut docs = dedupe(filter_window(docs, window));
    sort_documents(&mut docs);
    Ok(docs)
}

mod rfc3339_utc {
    use chrono::{DateTime, SecondsFormat, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ts: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&ts.to_rfc3339_opts(SecondsFormat::AutoSi, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let raw = String::deserialize(d)?;
        DateTime::parse_from_rfc3339(raw.trim())
            .map(|t| t.with_timezone(&Utc))
            .map_err(|e| serde::de::Error::custom(format!("bad timestamp {raw:?}: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn doc(id: &str, day: u32, hour: u32) -> Document {
        Document {
            id: id.into(),
            source: Source::Tweet,
            timestamp: Utc.with_ymd_and_hms(2022, 7, day, hour, 0, 0).unwrap(),
            ticker: "HSBC".into(),
            text: format!("text {id}"),
            author: None,
            followers: None,
            place: None,
            url: None,
            title: None,
        }
    }

    fn date(d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2022, 7, d).unwrap()
    }

    #[test]
    fn query_labels() {
        let t = |k, n| build_query(&Ticker::new(k, n).unwrap());
        assert_eq!(t("HSBC", "HSBC"), "ESG Investing HSBC");
        assert_eq!(t("TSLA", "Tesla"), "ESG Investing Tesla");
        assert_eq!(t("GS", "Goldman Sachs"), "ESG Investing Goldman Sachs");
        assert_eq!(
            build_query(&Ticker::from_key("GS").unwrap()),
            "ESG Investing Goldman Sachs"
        );
    }

    #[test]
    fn ticker_key_rules() {
        assert!(Ticker::new("", "x").is_err());
        assert!(Ticker::new("hsbc", "HSBC").is_err());
        assert!(Ticker::new("BRK.B", "Berkshire").is_ok());
        let t = Ticker::parse_spec("NVDA=Nvidia").unwrap();
        assert_eq!((t.key(), t.display_name()), ("NVDA", "Nvidia"));
        assert_eq!(Ticker::parse_spec("XYZ").unwrap().display_name(), "XYZ");
    }

    #[test]
    fn parses_tweet_line() {
        let line = r#"{"id":"t1","source":"tweet","timestamp":"2022-07-18T09:30:00Z","ticker":"HSBC","text":"ESG push","author":"u1","followers":12,"place":"London"}"#;
        let d = parse_document_line(line, SchemaMode::Strict).unwrap();
        assert_eq!(d.source, Source::Tweet);
        assert_eq!(d.followers, Some(12));
        assert_eq!(d.to_json_line(), line);
    }

    #[test]
    fn parses_news_line() {
        let line = r#"{"id":"n1","source":"news","timestamp":"2022-07-18T09:30:00+02:00","ticker":"GS","text":"Headline","url":"https://example.com/a","title":"Headline"}"#;
        let d = parse_document_line(line, SchemaMode::Strict).unwrap();
        assert_eq!(d.source, Source::News);
        assert_eq!(
            d.timestamp,
            Utc.with_ymd_and_hms(2022, 7, 18, 7, 30, 0).unwrap()
        );
        assert_eq!(d.url.as_deref(), Some("https://example.com/a"));
    }

    #[test]
    fn rejects_bad_lines() {
        let empty_text = r#"{"id":"t1","source":"tweet","timestamp":"2022-07-18T09:30:00Z","ticker":"HSBC","text":"   "}"#;
        assert!(matches!(
            parse_document_line(empty_text, SchemaMode::Lenient),
            Err(Error::Schema(_))
        ));
        let no_ts = r#"{"id":"t1","source":"tweet","ticker":"HSBC","text":"x"}"#;
        assert!(matches!(
            parse_document_line(no_ts, SchemaMode::Lenient),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            parse_document_line("{not json", SchemaMode::Lenient),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            parse_document_line("[1,2]", SchemaMode::Lenient),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn unknown_fields_depend_on_mode() {
        let line = r#"{"id":"t1","source":"tweet","timestamp":"2022-07-18T09:30:00Z","ticker":"HSBC","text":"x","lang":"en"}"#;
        assert!(matches!(
            parse_document_line(line, SchemaMode::Strict),
            Err(Error::Schema(_))
        ));
        let d = parse_document_line(line, SchemaMode::Lenient).unwrap();
        assert!(!d.to_json_line().contains("lang"));
    }

    #[test]
    fn news_scores_on_title() {
        let mut d = doc("n1", 18, 9);
        d.source = Source::News;
        d.title = Some("Bank fined".into());
        assert_eq!(d.scoring_text(), "Bank fined");
        d.source = Source::Tweet;
        assert_eq!(d.scoring_text(), "text n1");
    }

    #[test]
    fn dedupe_cases() {
        let d1 = doc("a", 18, 9);
        let mut d1_dup = doc("a", 19, 9);
        d1_dup.text = "later copy".into();
        let d2 = doc("b", 18, 10);
        assert_eq!(
            dedupe(vec![d1.clone(), d1_dup.clone(), d2.clone()]),
            vec![d1.clone(), d2.clone()]
        );
        // the earlier record wins even when it arrives second
        assert_eq!(dedupe(vec![d1_dup, d1.clone()]), vec![d1.clone()]);
        assert!(dedupe(vec![]).is_empty());
        let unique = vec![d2.clone(), d1.clone()];
        assert_eq!(dedupe(unique.clone()), unique);
        // same id in a different source is a different document
        let mut news = d1.clone();
        news.source = Source::News;
        assert_eq!(dedupe(vec![d1.clone(), news.clone()]).len(), 2);
    }

    #[test]
    fn window_is_closed_on_dates() {
        let w = TimeWindow::new(date(18), date(27)).unwrap();
        let start = doc("s", 18, 0);
        let end_late = Document {
            timestamp: Utc.with_ymd_and_hms(2022, 7, 27, 23, 59, 59).unwrap(),
            ..doc("e", 27, 0)
        };
        let after = doc("x", 28, 0);
        let kept = filter_window(vec![start.clone(), after, end_late.clone()], &w);
        assert_eq!(kept, vec![start, end_late]);
    }

    #[test]
    fn filter_window_mixed_list() {
        let w = TimeWindow::new(date(20), date(22)).unwrap();
        let docs = vec![
            doc("a", 17, 1),
            doc("b", 22, 1),
            doc("c", 25, 1),
            doc("d", 20, 5),
            doc("e", 23, 0),
        ];
        let ids: Vec<_> = filter_window(docs, &w).into_iter().map(|d| d.id).collect();
        assert_eq!(ids, ["b", "d"]);
    }

    #[test]
    fn window_parsing() {
        let w: TimeWindow = "2022-07-18:2022-07-29".parse().unwrap();
        assert_eq!((w.start(), w.end()), (date(18), date(29)));
        let w: TimeWindow = ":2022-07-29".parse().unwrap();
        assert_eq!(w.start(), date(20));
        assert!("2022-07-29:2022-07-18".parse::<TimeWindow>().is_err());
        assert!("2022-07-18".parse::<TimeWindow>().is_err());
        assert_eq!(w.to_string(), "2022-07-20:2022-07-29");
    }

    #[test]
    fn sort_breaks_timestamp_ties_by_id() {
        let mut docs = vec![doc("b", 18, 9), doc("a", 18, 9), doc("c", 17, 9)];
        sort_documents(&mut docs);
        let ids: Vec<_> = docs.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["c", "a", "b"]);
    }
}
