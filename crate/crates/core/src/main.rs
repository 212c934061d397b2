use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use esg_sentiment::aggregation::{fixed6, AffinityThresholds};
use esg_sentiment::corpus::{Ticker, TimeWindow};
use esg_sentiment::report::pipeline;
use esg_sentiment::report::{ConfigFile, Overrides, RunConfig};
use esg_sentiment::{Error, Result};

#[derive(Parser)]
#[command(
    name = "esg-sentiment",
    version,
    about = "Score ESG news and tweets and compare them with stock prices"
)]
struct Cli {
    #[command(flatten)]
    flags: Flags,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Flags {
    /// JSON run configuration; flags override its fields
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Comma-separated ticker keys, optionally KEY=Display Name
    #[arg(long, global = true, value_name = "K1,K2", value_delimiter = ',')]
    tickers: Option<Vec<String>>,

    /// Document window START:END (YYYY-MM-DD), or :END for the last 10 days
    #[arg(long, global = true, value_name = "START:END")]
    window: Option<String>,

    /// Trading days of prices to keep (default 20)
    #[arg(long, global = true, value_name = "N")]
    price_days: Option<usize>,

    /// Directory with positive.txt, negative.txt and negators.txt
    #[arg(long, global = true, value_name = "DIR")]
    lexicon: Option<PathBuf>,

    /// CSV of externally produced verdicts (id,source,label,score)
    #[arg(long, global = true, value_name = "PATH")]
    external_verdicts: Option<PathBuf>,

    /// Affinity thresholds AFFINE,AVERSE (default 0.15,-0.15)
    #[arg(
        long,
        global = true,
        value_name = "AFFINE,AVERSE",
        allow_hyphen_values = true
    )]
    thresholds: Option<String>,

    /// Recorded fixtures directory (<KEY>/tweets.jsonl, news.jsonl, prices.csv)
    #[arg(long, global = true, value_name = "DIR")]
    fixtures: Option<PathBuf>,

    /// Output directory (default ./out)
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Reject unknown fields in input records
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Fetch documents into corpus.jsonl
    Ingest,
    /// Score corpus.jsonl into scored.jsonl
    Score,
    /// Per-ticker aggregates into aggregates.csv
    Aggregate,
    /// Fetch and window daily prices into prices/<KEY>.csv
    Prices,
    /// Compare daily sentiment with price moves into analysis/<KEY>.json
    Analyze,
    /// Write summary.csv, charts/<KEY>.svg and analysis/<KEY>.json
    Report,
    /// Run every stage in order
    Run,
}

impl Flags {
    fn into_config(self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let tickers = self
            .tickers
            .map(|list| {
                list.iter()
                    .map(|s| Ticker::parse_spec(s))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        let overrides = Overrides {
            tickers,
            window: self
                .window
                .as_deref()
                .map(str::parse::<TimeWindow>)
                .transpose()?,
            price_days: self.price_days,
            thresholds: self
                .thresholds
                .as_deref()
                .map(str::parse::<AffinityThresholds>)
                .transpose()?,
            fixtures: self.fixtures,
            out: self.out,
            lexicon: self.lexicon,
            external_verdicts: self.external_verdicts,
            strict: self.strict,
        };
        RunConfig::resolve(file, overrides)
    }
}

fn execute(command: Command, cfg: &RunConfig) -> Result<()> {
    match command {
        Command::Ingest => {
            let outcome = pipeline::ingest(cfg)?;
            for (key, n) in &outcome.counts {
                println!("{key}\t{n}");
            }
            println!("total\t{}", outcome.total);
        }
        Command::Score => {
            let scored = pipeline::score(cfg)?;
            println!("scored\t{}", scored.len());
        }
        Command::Aggregate => {
            for a in pipeline::aggregate(cfg)? {
                println!(
                    "{}\t{}\t{}\t{}",
                    a.ticker,
                    a.n_docs,
                    fixed6(a.mean_composite),
                    a.classification
                );
            }
        }
        Command::Prices => {
            for s in pipeline::prices(cfg)? {
                println!("{}\t{}", s.ticker(), s.len());
            }
        }
        Command::Analyze => {
            for (key, result) in pipeline::analyze(cfg)? {
                match result {
                    Some(r) => println!(
                        "{key}\t{}\t{}\t{}",
                        fixed6(r.percent_change),
                        r.pearson_r.map(fixed6).unwrap_or_else(|| "-".into()),
                        r.sign_agreement
                    ),
                    None => println!("{key}\tinsufficient-data"),
                }
            }
        }
        Command::Report => print_rows(&pipeline::report(cfg)?),
        Command::Run => {
            let outcome = pipeline::run(cfg)?;
            println!("documents\t{}", outcome.ingest.total);
            println!("scored\t{}", outcome.n_scored);
            print_rows(&outcome.rows);
        }
    }
    Ok(())
}

fn print_rows(rows: &[esg_sentiment::report::SummaryRow]) {
    for r in rows {
        println!(
            "{}\t{}\t{}\t{}\t{}",
            r.ticker,
            fixed6(r.mean_composite),
            r.classification,
            r.percent_change.map(fixed6).unwrap_or_else(|| "-".into()),
            r.sign_agreement
        );
    }
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    let one_line = message.split_whitespace().collect::<Vec<_>>().join(" ");
    eprintln!("error[{kind}]: {one_line}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            return fail("usage", first.trim_start_matches("error: "), 1);
        }
    };

    let result = cli
        .flags
        .into_config()
        .and_then(|cfg| execute(cli.command, &cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string(), exit_code(&e)),
    }
}

fn exit_code(e: &Error) -> u8 {
    e.exit_code().clamp(1, 255) as u8
}
