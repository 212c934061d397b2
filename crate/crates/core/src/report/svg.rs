//! Candlestick charts as standalone SVG.
//!
//! Fixed 800x400 viewBox, one `<g>` per trading day in date order. Each
//! group holds a high-low wick and an open-close body; rising days
//! (`close >= open`) get a hollow green body, falling days a filled red one.
//! Coordinates are printed with two decimals so output is byte-stable.

use std::fmt::Write;

use crate::market::PriceSeries;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 400.0;

const LEFT: f64 = 64.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 40.0;

const STYLE: &str = ".wick{stroke:#555;stroke-width:1}\
.rising .body{fill:none;stroke:#2e7d32;stroke-width:1.5}\
.falling .body{fill:#c62828;stroke:#c62828;stroke-width:1.5}\
.axis{stroke:#999;stroke-width:1}\
text{font-family:sans-serif;font-size:12px;fill:#333}\
.title{font-size:15px}";

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render_candlestick(series: &PriceSeries, title: &str) -> String {
    let bars = series.bars();
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;

    let (mut lo, mut hi) = bars
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), b| {
            (lo.min(b.low), hi.max(b.high))
        });
    if bars.is_empty() {
        (lo, hi) = (0.0, 1.0);
    } else if hi - lo <= f64::EPSILON * hi.abs() {
        (lo, hi) = (lo - 1.0, hi + 1.0);
    }
    let y = |price: f64| TOP + (hi - price) / (hi - lo) * plot_h;
    let slot = plot_w / bars.len().max(1) as f64;
    let body_w = slot * 0.6;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">"#
    );
    let _ = writeln!(out, "<style>{STYLE}</style>");
    let _ = writeln!(
        out,
        r#"<text class="title" x="{LEFT:.2}" y="24.00">{}</text>"#,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{:.2}"/>"#,
        TOP + plot_h
    );
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{LEFT:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    );
    if !bars.is_empty() {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{hi:.2}</text>"#,
            LEFT - 6.0,
            TOP + 4.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{lo:.2}</text>"#,
            LEFT - 6.0,
            TOP + plot_h + 4.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{LEFT:.2}" y="{:.2}">{}</text>"#,
            HEIGHT - 14.0,
            bars[0].date
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT + plot_w,
            HEIGHT - 14.0,
            bars[bars.len() - 1].date
        );
    }

    for (i, bar) in bars.iter().enumerate() {
        let cx = LEFT + slot * (i as f64 + 0.5);
        let class = if bar.is_rising() { "rising" } else { "falling" };
        let body_top = y(bar.open.max(bar.close));
        let body_h = (y(bar.open.min(bar.close)) - body_top).max(1.0);
        let _ = writeln!(
            out,
            r#"<g class="candle {class}" data-date="{}">"#,
            bar.date
        );
        let _ = writeln!(
            out,
            "<title>{} O {} H {} L {} C {} V {}</title>",
            bar.date, bar.open, bar.high, bar.low, bar.close, bar.volume
        );
        let _ = writeln!(
            out,
            r#"<line class="wick" x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}"/>"#,
            y(bar.high),
            y(bar.low)
        );
        let _ = writeln!(
            out,
            r#"<rect class="body" x="{:.2}" y="{body_top:.2}" width="{body_w:.2}" height="{body_h:.2}"/>"#,
            cx - body_w / 2.0
        );
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}
