use chrono::{Duration, NaiveDate, TimeZone, Utc};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use esg_sentiment::aggregation::{aggregate_by_ticker, AffinityThresholds};
use esg_sentiment::analysis::{align, daily_index, pearson, DailyPoint, DailySentimentIndex};
use esg_sentiment::corpus::{dedupe, parse_document_line, Document, SchemaMode, Source};
use esg_sentiment::market::{
    daily_open_returns, parse_prices, percent_change_open, render_prices, split_halves, tail_n,
    PriceBar, PriceSeries,
};
use esg_sentiment::sentiment::{
    composite, parse_scored_line, score_tokens, weight, Lexicon, ScoredDocument, SentimentLabel,
    SentimentVerdict, VerdictOrigin,
};

const WORDS: [&str; 12] = [
    "strong", "growth", "green", "weak", "fraud", "loss", "bank", "climate", "report", "the",
    "record", "fund",
];

fn label() -> impl Strategy<Value = SentimentLabel> {
    prop_oneof![
        Just(SentimentLabel::Positive),
        Just(SentimentLabel::Neutral),
        Just(SentimentLabel::Negative),
    ]
}

fn document() -> impl Strategy<Value = Document> {
    (
        0u32..40,
        any::<bool>(),
        0i64..20 * 24 * 60,
        prop::sample::select(vec!["GS", "AMZN", "TSLA", "HSBC"]),
        "[a-zA-Z #@]{1,40}",
        prop::option::of("[a-z_]{1,12}"),
        prop::option::of(0u64..1_000_000),
    )
        .prop_map(
            |(id, news, minutes, ticker, text, author, followers)| Document {
                id: id.to_string(),
                source: if news { Source::News } else { Source::Tweet },
                timestamp: Utc.with_ymd_and_hms(2022, 7, 15, 0, 0, 0).unwrap()
                    + Duration::minutes(minutes),
                ticker: ticker.to_string(),
                text: if text.trim().is_empty() {
                    "x".into()
                } else {
                    text
                },
                author,
                followers,
                place: None,
                url: news.then(|| format!("https://news.example.com/{id}")),
                title: None,
            },
        )
}

fn scored() -> impl Strategy<Value = ScoredDocument> {
    (document(), label(), 0.0f64..=1.0).prop_map(|(doc, label, score)| {
        ScoredDocument::new(
            &doc,
            SentimentVerdict::new(label, score).unwrap(),
            VerdictOrigin::Lexicon,
        )
    })
}

fn series(min: usize, max: usize) -> impl Strategy<Value = PriceSeries> {
    prop::collection::vec((1.0f64..500.0, -0.05f64..0.05, 0u64..1_000_000), min..=max).prop_map(
        |rows| {
            let start = NaiveDate::from_ymd_opt(2022, 1, 3).unwrap();
            let bars = rows
                .into_iter()
                .enumerate()
                .map(|(i, (open, move_, volume))| {
                    let close = open * (1.0 + move_);
                    PriceBar {
                        date: start + Duration::days(i as i64),
                        open,
                        high: open.max(close),
                        low: open.min(close),
                        close,
                        volume,
                    }
                })
                .collect();
            PriceSeries::new("P", bars).unwrap()
        },
    )
}

fn vectors(min: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (min..40usize).prop_flat_map(|n| {
        (
            prop::collection::vec(-100.0f64..100.0, n),
            prop::collection::vec(-100.0f64..100.0, n),
        )
    })
}

fn varied(v: &[f64]) -> bool {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() > 1e-6
}

fn date_values() -> impl Strategy<Value = Vec<(NaiveDate, f64)>> {
    prop::collection::btree_map(0i64..60, -5.0f64..5.0, 0..30).prop_map(|m| {
        let start = NaiveDate::from_ymd_opt(2022, 7, 1).unwrap();
        m.into_iter()
            .map(|(d, v)| (start + Duration::days(d), v))
            .collect()
    })
}

fn index_from(points: &[(NaiveDate, f64)]) -> DailySentimentIndex {
    DailySentimentIndex {
        ticker: "GS".into(),
        points: points
            .iter()
            .map(|&(date, mean_composite)| DailyPoint {
                date,
                mean_composite,
                n_docs: 1,
            })
            .collect(),
    }
}

proptest! {
    #[test]
    fn dedupe_is_idempotent(docs in prop::collection::vec(document(), 0..40)) {
        let once = dedupe(docs);
        prop_assert_eq!(dedupe(once.clone()), once);
    }

    #[test]
    fn dedupe_keeps_unique_lists(docs in prop::collection::vec(document(), 0..40)) {
        let unique = dedupe(docs);
        let mut keys: Vec<_> = unique.iter().map(|d| d.key()).collect();
        let n = keys.len();
        keys.sort_by(|a, b| (&a.id, a.source).cmp(&(&b.id, b.source)));
        keys.dedup();
        prop_assert_eq!(keys.len(), n);
    }

    #[test]
    fn document_lines_round_trip(doc in document()) {
        let line = doc.to_json_line();
        prop_assert_eq!(parse_document_line(&line, SchemaMode::Strict).unwrap(), doc);
    }

    #[test]
    fn scored_lines_round_trip(s in scored()) {
        prop_assert_eq!(parse_scored_line(&s.to_json_line()).unwrap(), s);
    }

    #[test]
    fn composite_law(label in label(), score in 0.0f64..=1.0) {
        let v = SentimentVerdict::new(label, score).unwrap();
        let c = composite(&v).value();
        prop_assert_eq!(c, f64::from(weight(label)) * score);
        prop_assert!(c.abs() <= 1.0);
    }

    #[test]
    fn verdict_scores_outside_unit_interval_are_rejected(score in prop_oneof![-10.0f64..-1e-9, 1.0000001f64..10.0]) {
        prop_assert!(SentimentVerdict::new(SentimentLabel::Positive, score).is_err());
    }

    #[test]
    fn scoring_ignores_order_without_negators(
        tokens in prop::collection::vec(prop::sample::select(WORDS.to_vec()), 0..20),
        seed in any::<u64>(),
    ) {
        let lexicon = Lexicon::default_financial();
        let mut shuffled = tokens.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(score_tokens(&tokens, &lexicon), score_tokens(&shuffled, &lexicon));
    }

    #[test]
    fn swapping_the_lexicon_mirrors_labels(
        tokens in prop::collection::vec(prop::sample::select(WORDS.to_vec()), 0..20),
    ) {
        let lexicon = Lexicon::default_financial();
        let a = score_tokens(&tokens, &lexicon);
        let b = score_tokens(&tokens, &lexicon.swapped());
        prop_assert_eq!(a.score(), b.score());
        prop_assert_eq!(weight(a.label()), -weight(b.label()));
    }

    #[test]
    fn aggregation_concatenates(
        left in prop::collection::vec(scored(), 0..30),
        right in prop::collection::vec(scored(), 0..30),
    ) {
        let t = AffinityThresholds::default();
        let all: Vec<ScoredDocument> = left.iter().chain(&right).cloned().collect();
        let whole = aggregate_by_ticker(&all, &["GS"], &t);
        let a = aggregate_by_ticker(&left, &["GS"], &t);
        let b = aggregate_by_ticker(&right, &["GS"], &t);
        for w in &whole {
            let n = |v: &[esg_sentiment::aggregation::TickerAggregate]| {
                v.iter().find(|x| x.ticker == w.ticker).map_or((0, 0.0), |x| (x.n_docs, x.sum_composite))
            };
            let (na, sa) = n(&a);
            let (nb, sb) = n(&b);
            prop_assert_eq!(w.n_docs, na + nb);
            prop_assert!((w.sum_composite - (sa + sb)).abs() < 1e-9);
        }
    }

    #[test]
    fn aggregation_ignores_order(mut docs in prop::collection::vec(scored(), 0..40)) {
        let t = AffinityThresholds::default();
        let before = aggregate_by_ticker(&docs, &["GS", "HSBC"], &t);
        docs.reverse();
        prop_assert_eq!(aggregate_by_ticker(&docs, &["GS", "HSBC"], &t), before);
    }

    #[test]
    fn classification_is_monotone(a in -1.0f64..=1.0, b in -1.0f64..=1.0) {
        let t = AffinityThresholds::default();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(t.classify(lo) <= t.classify(hi));
    }

    #[test]
    fn tail_is_idempotent(s in series(0, 40), n in 0usize..50) {
        let once = tail_n(&s, n);
        prop_assert_eq!(tail_n(&once, n), once.clone());
        prop_assert_eq!(once.len(), n.min(s.len()));
    }

    #[test]
    fn halves_concatenate(s in series(1, 20)) {
        let even = tail_n(&s, s.len() / 2 * 2);
        prop_assume!(even.len() >= 2);
        let (a, b) = split_halves(&even).unwrap();
        prop_assert_eq!(a.len(), b.len());
        let joined: Vec<PriceBar> = a.bars().iter().chain(b.bars()).copied().collect();
        prop_assert_eq!(joined.as_slice(), even.bars());
    }

    #[test]
    fn returns_compound_to_total(s in series(2, 60)) {
        let total = percent_change_open(&s).unwrap() / 100.0;
        let compounded = daily_open_returns(&s)
            .unwrap()
            .iter()
            .fold(1.0, |acc, (_, r)| acc * (1.0 + r / 100.0)) - 1.0;
        prop_assert!((compounded - total).abs() <= 1e-9 * total.abs().max(1.0));
    }

    #[test]
    fn price_rows_round_trip(s in series(0, 30)) {
        let text = render_prices(&s);
        let again = parse_prices("P", &text).unwrap();
        prop_assert_eq!(render_prices(&again), text);
    }

    #[test]
    fn pearson_is_symmetric_and_bounded((x, y) in vectors(3)) {
        prop_assume!(varied(&x) && varied(&y));
        let r = pearson(&x, &y).unwrap();
        prop_assert!((-1.0..=1.0).contains(&r));
        prop_assert!((r - pearson(&y, &x).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn pearson_of_a_line_is_its_sign(
        (x, _) in vectors(3),
        a in prop_oneof![-10.0f64..-0.1, 0.1f64..10.0],
        b in -50.0f64..50.0,
    ) {
        prop_assume!(varied(&x));
        let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let r = pearson(&x, &y).unwrap();
        prop_assert!((r - a.signum()).abs() <= 1e-9, "r={}", r);
    }

    #[test]
    fn pearson_ignores_positive_affine_maps(
        (x, y) in vectors(3),
        a in 0.1f64..10.0,
        b in -50.0f64..50.0,
    ) {
        prop_assume!(varied(&x) && varied(&y));
        let xs: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        prop_assert!((pearson(&x, &y).unwrap() - pearson(&xs, &y).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn align_is_a_subset_and_idempotent(sent in date_values(), rets in date_values()) {
        let aligned = align(&index_from(&sent), &rets);
        for d in &aligned.dates {
            prop_assert!(sent.iter().any(|(s, _)| s == d));
            prop_assert!(rets.iter().any(|(r, _)| r == d));
        }
        let own: Vec<(NaiveDate, f64)> = aligned.dates.iter().copied().zip(aligned.sentiment.iter().copied()).collect();
        let own_returns: Vec<(NaiveDate, f64)> = aligned.dates.iter().copied().zip(aligned.returns.iter().copied()).collect();
        prop_assert_eq!(align(&index_from(&own), &own_returns), aligned);
    }

    #[test]
    fn daily_means_recombine_to_the_ticker_mean(docs in prop::collection::vec(scored(), 1..40)) {
        let index = daily_index(&docs, "GS");
        let n: usize = index.points.iter().map(|p| p.n_docs).sum();
        let agg = aggregate_by_ticker(&docs, &["GS"], &AffinityThresholds::default());
        let gs = agg.iter().find(|a| a.ticker == "GS").unwrap();
        prop_assert_eq!(n, gs.n_docs);
        let weighted: f64 = index.points.iter().map(|p| p.mean_composite * p.n_docs as f64).sum();
        prop_assert!((weighted - gs.sum_composite).abs() <= 1e-9);
    }
}
