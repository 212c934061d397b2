//! Daily OHLCV history and opening-price changes.
//!
//! "Days" are trading rows: weekends and holidays are simply absent from a
//! series. All price movements are measured on opening prices.

use std::path::Path;

use chrono::NaiveDate;

use crate::corpus::{PriceRequest, PriceTransport, Ticker, TimeWindow};
use crate::error::{Error, Result};
use crate::fsutil;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceBar {
    pub date: NaiveDate,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub volume: u64,
}

impl PriceBar {
    pub fn validate(&self) -> Result<()> {
        let prices = [self.open, self.high, self.low, self.close];
        if prices.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err(Error::invariant(format!(
                "{}: prices must be positive and finite",
                self.date
            )));
        }
        if !(self.low <= self.open && self.open <= self.high) {
            return Err(Error::invariant(format!(
                "{}: open {} outside low {} .. high {}",
                self.date, self.open, self.low, self.high
            )));
        }
        if !(self.low <= self.close && self.close <= self.high) {
            return Err(Error::invariant(format!(
                "{}: close {} outside low {} .. high {}",
                self.date, self.close, self.low, self.high
            )));
        }
        Ok(())
    }

    pub fn is_rising(&self) -> bool {
        self.close >= self.open
    }
}

/// Bars for one ticker, strictly increasing by date.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    ticker: String,
    bars: Vec<PriceBar>,
}

impl PriceSeries {
    /// Validates every bar and sorts by date; a repeated date is an error.
    pub fn new(ticker: impl Into<String>, mut bars: Vec<PriceBar>) -> Result<Self> {
        let ticker = ticker.into();
        for bar in &bars {
            bar.validate()
                .map_err(|e| Error::invariant(format!("{ticker}: {e}")))?;
        }
        bars.sort_by_key(|b| b.date);
        if let Some(w) = bars.windows(2).find(|w| w[0].date == w[1].date) {
            return Err(Error::invariant(format!(
                "{ticker}: duplicate price row for {}",
                w[0].date
            )));
        }
        Ok(PriceSeries { ticker, bars })
    }

    pub fn ticker(&self) -> &str {
        &self.ticker
    }

    pub fn bars(&self) -> &[PriceBar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    fn with_bars(&self, bars: &[PriceBar]) -> PriceSeries {
        PriceSeries {
            ticker: self.ticker.clone(),
            bars: bars.to_vec(),
        }
    }

    /// Bars dated on or before `date`.
    pub fn until(&self, date: NaiveDate) -> PriceSeries {
        let cut = self.bars.partition_point(|b| b.date <= date);
        self.with_bars(&self.bars[..cut])
    }
}

/// The last `n` bars (all of them when the series is shorter).
pub fn tail_n(series: &PriceSeries, n: usize) -> PriceSeries {
    let start = series.bars.len().saturating_sub(n);
    series.with_bars(&series.bars[start..])
}

fn require_bars(series: &PriceSeries, min: usize) -> Result<()> {
    if series.len() < min {
        return Err(Error::insufficient(format!(
            "{}: need at least {min} price bars, have {}",
            series.ticker,
            series.len()
        )));
    }
    Ok(())
}

/// `100 * (last open - first open) / first open`.
pub fn percent_change_open(series: &PriceSeries) -> Result<f64> {
    require_bars(series, 2)?;
    let first = series.bars[0].open;
    let last = series.bars[series.len() - 1].open;
    Ok(100.0 * (last - first) / first)
}

/// Splits an even-length series into its first and second halves.
pub fn split_halves(series: &PriceSeries) -> Result<(PriceSeries, PriceSeries)> {
    require_bars(series, 2)?;
    if !series.len().is_multiple_of(2) {
        return Err(Error::insufficient(format!(
            "{}: cannot halve an odd series of {} bars",
            series.ticker,
            series.len()
        )));
    }
    let (a, b) = series.bars.split_at(series.len() / 2);
    Ok((series.with_bars(a), series.with_bars(b)))
}

/// Open-to-open percentage returns, dated at the later bar.
pub fn daily_open_returns(series: &PriceSeries) -> Result<Vec<(NaiveDate, f64)>> {
    require_bars(series, 2)?;
    Ok(series
        .bars
        .windows(2)
        .map(|w| (w[1].date, 100.0 * (w[1].open - w[0].open) / w[0].open))
        .collect())
}

pub const PRICE_HEADER: &str = "Date,Open,High,Low,Close,Adj Close,Volume";

const REQUIRED_COLUMNS: [&str; 6] = ["Date", "Open", "High", "Low", "Close", "Volume"];

/// Parses a Yahoo-style CSV. `Adj Close` may be present and is ignored.
pub fn parse_prices(ticker: &str, text: &str) -> Result<PriceSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| Error::schema(format!("{ticker} prices: {e}")))?
        .clone();
    let mut idx = [0usize; 6];
    for (slot, name) in idx.iter_mut().zip(REQUIRED_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::schema(format!("{ticker} prices: missing column {name:?}")))?;
    }

    let mut bars = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let record =
            record.map_err(|e| Error::schema(format!("{ticker} prices row {line}: {e}")))?;
        let field = |k: usize| record.get(idx[k]).unwrap_or("");
        let price = |k: usize| -> Result<f64> {
            field(k).parse::<f64>().map_err(|_| {
                Error::schema(format!(
                    "{ticker} prices row {line}: bad {} value {:?}",
                    REQUIRED_COLUMNS[k],
                    field(k)
                ))
            })
        };
        let date = NaiveDate::parse_from_str(field(0), "%Y-%m-%d").map_err(|_| {
            Error::schema(format!(
                "{ticker} prices row {line}: bad date {:?}",
                field(0)
            ))
        })?;
        let volume = field(5).parse::<u64>().map_err(|_| {
            Error::schema(format!(
                "{ticker} prices row {line}: bad volume {:?}",
                field(5)
            ))
        })?;
        bars.push(PriceBar {
            date,
            open: price(1)?,
            high: price(2)?,
            low: price(3)?,
            close: price(4)?,
            volume,
        });
    }
    PriceSeries::new(ticker, bars)
}

pub fn load_prices(path: &Path, ticker: &str) -> Result<PriceSeries> {
    parse_prices(ticker, &fsutil::read_to_string(path)?)
}

/// Writes the Yahoo layout back out; `Adj Close` repeats the close since no
/// adjustment is applied.
pub fn render_prices(series: &PriceSeries) -> String {
    let mut out = String::from(PRICE_HEADER);
    out.push('\n');
    for b in &series.bars {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            b.date, b.open, b.high, b.low, b.close, b.close, b.volume
        ));
    }
    out
}

pub fn fetch_prices<T: PriceTransport + ?Sized>(
    ticker: &Ticker,
    window: &TimeWindow,
    transport: &T,
) -> Result<PriceSeries> {
    let payload = transport.fetch_prices(&PriceRequest {
        ticker,
        window: *window,
    })?;
    parse_prices(ticker.key(), &payload)
}
