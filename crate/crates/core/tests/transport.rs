use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::{Arc, Mutex};
use std::thread;

use chrono::NaiveDate;

use esg_sentiment::corpus::{
    build_query, fetch_documents, DocumentRequest, DocumentTransport, HttpEndpoints, HttpTransport,
    PriceRequest, PriceTransport, SchemaMode, Source, Ticker, TimeWindow,
};
use esg_sentiment::{Error, Result};

fn golden() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/golden")
}

fn window() -> TimeWindow {
    TimeWindow::new(
        NaiveDate::from_ymd_opt(2022, 7, 18).unwrap(),
        NaiveDate::from_ymd_opt(2022, 7, 29).unwrap(),
    )
    .unwrap()
}

/// Request targets with their Authorization header, in arrival order.
type RequestLog = Arc<Mutex<Vec<(String, Option<String>)>>>;

struct Server {
    base: String,
    requests: RequestLog,
}

/// Serves `/<kind>?key=<KEY>...` from the golden fixtures, one response per
/// connection. `/fail...` answers 500.
fn serve() -> Server {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let requests = Arc::new(Mutex::new(Vec::new()));
    let log = Arc::clone(&requests);
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            let mut auth = None;
            loop {
                let mut header = String::new();
                if reader.read_line(&mut header).unwrap() == 0 || header == "\r\n" {
                    break;
                }
                if let Some((name, value)) = header.split_once(':') {
                    if name.eq_ignore_ascii_case("authorization") {
                        auth = Some(value.trim().to_string());
                    }
                }
            }
            let target = request_line
                .split_whitespace()
                .nth(1)
                .unwrap_or("/")
                .to_string();
            log.lock().unwrap().push((target.clone(), auth));

            let (path, query) = target.split_once('?').unwrap_or((&target, ""));
            let key = query
                .split('&')
                .find_map(|kv| kv.strip_prefix("key="))
                .unwrap_or("");
            let file = match path {
                "/tweets" => Some("tweets.jsonl"),
                "/news" => Some("news.jsonl"),
                "/prices" => Some("prices.csv"),
                _ => None,
            };
            let body = file.and_then(|f| fs::read_to_string(golden().join(key).join(f)).ok());
            let response = match body {
                Some(body) => format!(
                    "HTTP/1.1 200 OK\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                ),
                None => "HTTP/1.1 500 Internal Server Error\r\nContent-Length: 0\r\nConnection: close\r\n\r\n"
                    .to_string(),
            };
            let _ = stream.write_all(response.as_bytes());
        }
    });
    Server { base, requests }
}

fn endpoints(base: &str) -> HttpEndpoints {
    HttpEndpoints {
        tweets: format!("{base}/tweets?key={{key}}&q={{query}}&since={{start}}&until={{end}}"),
        news: format!("{base}/news?key={{key}}&q={{query}}&source={{source}}"),
        prices: format!("{base}/prices?key={{key}}&period1={{period1}}&period2={{period2}}"),
        token_env: None,
    }
}

#[test]
fn http_transport_expands_templates() {
    let server = serve();
    let http = HttpTransport::new(endpoints(&server.base)).unwrap();
    let t = Ticker::from_key("GS").unwrap();
    let query = build_query(&t);
    let req = DocumentRequest {
        ticker: &t,
        source: Source::Tweet,
        window: window(),
        query: &query,
    };
    let body = http.fetch_documents(&req).unwrap();
    assert_eq!(
        body,
        fs::read_to_string(golden().join("GS/tweets.jsonl")).unwrap()
    );

    let prices = http
        .fetch_prices(&PriceRequest {
            ticker: &t,
            window: window(),
        })
        .unwrap();
    assert!(prices.starts_with("Date,Open,High,Low,Close,Adj Close,Volume\n"));

    let log = server.requests.lock().unwrap();
    assert_eq!(
        log[0].0,
        "/tweets?key=GS&q=ESG+Investing+Goldman+Sachs&since=2022-07-18&until=2022-07-29"
    );
    assert_eq!(
        log[1].0,
        "/prices?key=GS&period1=1658102400&period2=1659139199"
    );
    assert_eq!(log[0].1, None);
}

#[test]
fn http_errors_are_transport_errors() {
    let server = serve();
    let mut eps = endpoints(&server.base);
    eps.news = format!("{}/fail?key={{key}}", server.base);
    let http = HttpTransport::new(eps).unwrap();
    let t = Ticker::from_key("HSBC").unwrap();
    let err = fetch_documents(&t, &window(), &http, SchemaMode::Lenient).unwrap_err();
    assert!(matches!(err, Error::Transport(_)), "{err}");

    let closed = HttpTransport::new(endpoints("http://127.0.0.1:9")).unwrap();
    let err = closed
        .fetch_prices(&PriceRequest {
            ticker: &t,
            window: window(),
        })
        .unwrap_err();
    assert!(matches!(err, Error::Transport(_)));
}

#[test]
fn bearer_token_comes_from_the_environment() {
    let server = serve();
    let mut eps = endpoints(&server.base);
    eps.token_env = Some("ESG_SENTIMENT_TEST_TOKEN".into());
    std::env::set_var("ESG_SENTIMENT_TEST_TOKEN", "s3cret");
    let http = HttpTransport::new(eps.clone()).unwrap();
    let t = Ticker::from_key("AMZN").unwrap();
    http.fetch_prices(&PriceRequest {
        ticker: &t,
        window: window(),
    })
    .unwrap();
    assert_eq!(
        server.requests.lock().unwrap()[0].1.as_deref(),
        Some("Bearer s3cret")
    );

    eps.token_env = Some("ESG_SENTIMENT_TEST_TOKEN_UNSET".into());
    assert!(matches!(HttpTransport::new(eps), Err(Error::Config(_))));
}

#[test]
fn live_run_with_recording_matches_replay() {
    let server = serve();
    let dir = tempfile::tempdir().unwrap();
    let recorded = dir.path().join("recorded");
    let config = dir.path().join("live.json");
    let eps = endpoints(&server.base);
    fs::write(
        &config,
        serde_json::json!({
            "tickers": ["GS", "AMZN", "TSLA", "HSBC"],
            "window": "2022-07-18:2022-07-29",
            "fixtures": "recorded",
            "record": true,
            "endpoints": eps,
        })
        .to_string(),
    )
    .unwrap();

    let bin = env!("CARGO_BIN_EXE_esg-sentiment");
    let live_out = dir.path().join("live");
    let o = Command::new(bin)
        .args([
            "--config",
            config.to_str().unwrap(),
            "--out",
            live_out.to_str().unwrap(),
            "run",
        ])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(recorded.join("TSLA/prices.csv").is_file());

    let replay_out = dir.path().join("replay");
    let o = Command::new(bin)
        .args([
            "--tickers",
            "GS,AMZN,TSLA,HSBC",
            "--window",
            "2022-07-18:2022-07-29",
            "--fixtures",
            recorded.to_str().unwrap(),
            "--out",
            replay_out.to_str().unwrap(),
            "run",
        ])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    for f in [
        "corpus.jsonl",
        "scored.jsonl",
        "summary.csv",
        "charts/HSBC.svg",
        "analysis/GS.json",
    ] {
        let live = fs::read(live_out.join(f)).unwrap();
        assert_eq!(live, fs::read(replay_out.join(f)).unwrap(), "{f}");
        let expected = Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden/expected")
            .join(f);
        assert_eq!(live, fs::read(expected).unwrap(), "{f}");
    }
}

struct Fixed(String);

impl DocumentTransport for Fixed {
    fn fetch_documents(&self, r: &DocumentRequest<'_>) -> Result<String> {
        Ok(match r.source {
            Source::Tweet => self.0.clone(),
            Source::News => String::new(),
        })
    }
}

#[test]
fn fetch_keeps_documents_inside_the_window() {
    let line = |id: &str, ts: &str| {
        format!(
            r#"{{"id":"{id}","source":"tweet","timestamp":"{ts}","ticker":"HSBC","text":"ESG Investing HSBC"}}"#
        )
    };
    let payload = [
        line("1", "2022-07-18T09:00:00Z"),
        line("2", "2022-07-22T12:00:00Z"),
        line("3", "2022-07-29T23:59:59Z"),
        line("4", "2022-07-30T00:00:00Z"),
    ]
    .join("\n");
    let t = Ticker::from_key("HSBC").unwrap();
    let docs = fetch_documents(&t, &window(), &Fixed(payload), SchemaMode::Strict).unwrap();
    let ids: Vec<&str> = docs.iter().map(|d| d.id.as_str()).collect();
    assert_eq!(ids, ["1", "2", "3"]);
}

#[test]
fn fetch_with_no_results_is_empty() {
    let t = Ticker::from_key("GS").unwrap();
    let docs = fetch_documents(&t, &window(), &Fixed(String::new()), SchemaMode::Strict).unwrap();
    assert!(docs.is_empty());
}

#[test]
fn fetch_handles_other_tickers_by_mode() {
    let payload = r#"{"id":"1","source":"tweet","timestamp":"2022-07-20T09:00:00Z","ticker":"TSLA","text":"x"}"#;
    let t = Ticker::from_key("GS").unwrap();
    let lenient =
        fetch_documents(&t, &window(), &Fixed(payload.into()), SchemaMode::Lenient).unwrap();
    assert!(lenient.is_empty());
    let strict = fetch_documents(&t, &window(), &Fixed(payload.into()), SchemaMode::Strict);
    assert!(matches!(strict, Err(Error::Schema(_))));
}
