//! C ABI for esg-sentiment.
//!
//! Every fallible function returns an [`EsgStatus`]; on failure a message is
//! available from [`esg_last_error_message`] on the same thread. Objects are
//! opaque handles released with their matching `*_free` function. Strings
//! returned through `char **` out-parameters are released with
//! [`esg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use esg_sentiment::aggregation::{Affinity, AffinityThresholds};
use esg_sentiment::analysis::pearson;
use esg_sentiment::corpus::{build_query, Ticker};
use esg_sentiment::market::{
    parse_prices, percent_change_open, render_prices, tail_n, PriceSeries,
};
use esg_sentiment::report::pipeline;
use esg_sentiment::report::{render_summary_csv, ConfigFile, Overrides, RunConfig};
use esg_sentiment::sentiment::{
    composite, score_text, weight, Lexicon, SentimentLabel, SentimentVerdict,
};
use esg_sentiment::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Schema = 3,
    Transport = 4,
    Invariant = 5,
    InsufficientData = 6,
    DegenerateSeries = 7,
    Config = 8,
    Io = 9,
    Panic = 10,
}

/// Label values equal their composite weight.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsgLabel {
    Negative = -1,
    Neutral = 0,
    Positive = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsgAffinity {
    Averse = -1,
    Neutral = 0,
    Affine = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsgVerdict {
    pub label: EsgLabel,
    pub score: f64,
}

pub struct EsgLexicon(Lexicon);

pub struct EsgPriceSeries(PriceSeries);

pub struct EsgRunConfig(RunConfig);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> EsgStatus {
    match err {
        Error::Schema(_) => EsgStatus::Schema,
        Error::Transport(_) => EsgStatus::Transport,
        Error::Invariant(_) => EsgStatus::Invariant,
        Error::InsufficientData(_) => EsgStatus::InsufficientData,
        Error::DegenerateSeries(_) => EsgStatus::DegenerateSeries,
        Error::Config(_) => EsgStatus::Config,
        Error::Io { .. } => EsgStatus::Io,
    }
}

struct Failure(EsgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

type FfiResult = Result<(), Failure>;

/// Runs `body`, recording any error or panic for `esg_last_error_message`.
fn guard(body: impl FnOnce() -> FfiResult) -> EsgStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => EsgStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {message}"));
            EsgStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(EsgStatus::NullArgument, format!("{name} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(EsgStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn to_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(EsgStatus::InvalidUtf8, "string contains a nul byte".into()))
}

fn label_from(label: SentimentLabel) -> EsgLabel {
    match label {
        SentimentLabel::Positive => EsgLabel::Positive,
        SentimentLabel::Neutral => EsgLabel::Neutral,
        SentimentLabel::Negative => EsgLabel::Negative,
    }
}

fn label_to(label: EsgLabel) -> SentimentLabel {
    match label {
        EsgLabel::Positive => SentimentLabel::Positive,
        EsgLabel::Neutral => SentimentLabel::Neutral,
        EsgLabel::Negative => SentimentLabel::Negative,
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn esg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn esg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn esg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Composite weight of a label: +1, 0 or -1.
#[no_mangle]
pub extern "C" fn esg_label_weight(label: EsgLabel) -> i32 {
    i32::from(weight(label_to(label)))
}

/// `weight(label) * score`; fails with `Schema` when score is outside [0, 1].
///
/// # Safety
/// `out` must be a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn esg_composite(verdict: EsgVerdict, out: *mut f64) -> EsgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let v = SentimentVerdict::new(label_to(verdict.label), verdict.score)?;
        *out = composite(&v).value();
        Ok(())
    })
}

/// The bundled financial lexicon.
///
/// # Safety
/// `out` must be a valid pointer; the handle is released with `esg_lexicon_free`.
#[no_mangle]
pub unsafe extern "C" fn esg_lexicon_default(out: *mut *mut EsgLexicon) -> EsgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(EsgLexicon(Lexicon::default_financial())));
        Ok(())
    })
}

/// Loads positive.txt, negative.txt and negators.txt from `dir`.
///
/// # Safety
/// `dir` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esg_lexicon_load_dir(
    dir: *const c_char,
    out: *mut *mut EsgLexicon,
) -> EsgStatus {
    guard(|| {
        let dir = str_arg(dir, "dir")?;
        let out = out_arg(out, "out")?;
        let lexicon = Lexicon::load_dir(&PathBuf::from(dir))?;
        *out = Box::into_raw(Box::new(EsgLexicon(lexicon)));
        Ok(())
    })
}

/// # Safety
/// `lexicon` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn esg_lexicon_free(lexicon: *mut EsgLexicon) {
    if !lexicon.is_null() {
        drop(Box::from_raw(lexicon));
    }
}

/// Scores one document text against the lexicon.
///
/// # Safety
/// Pointers must be valid; `text` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn esg_score_text(
    lexicon: *const EsgLexicon,
    text: *const c_char,
    out: *mut EsgVerdict,
) -> EsgStatus {
    guard(|| {
        let lexicon = ref_arg(lexicon, "lexicon")?;
        let text = str_arg(text, "text")?;
        let out = out_arg(out, "out")?;
        let v = score_text(text, &lexicon.0);
        *out = EsgVerdict {
            label: label_from(v.label()),
            score: v.score(),
        };
        Ok(())
    })
}

/// Search query for a ticker key, e.g. "ESG Investing Goldman Sachs" for GS.
///
/// # Safety
/// `key` must be nul-terminated and `out` valid; free the result with
/// `esg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn esg_build_query(key: *const c_char, out: *mut *mut c_char) -> EsgStatus {
    guard(|| {
        let key = str_arg(key, "key")?;
        let out = out_arg(out, "out")?;
        let ticker = Ticker::parse_spec(key)?;
        *out = to_c_string(build_query(&ticker))?;
        Ok(())
    })
}

/// Classifies a mean composite against the affine and averse thresholds.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esg_classify(
    mean: f64,
    affine_min: f64,
    averse_max: f64,
    out: *mut EsgAffinity,
) -> EsgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let thresholds = AffinityThresholds::new(affine_min, averse_max)?;
        *out = match thresholds.classify(mean) {
            Affinity::Affine => EsgAffinity::Affine,
            Affinity::Neutral => EsgAffinity::Neutral,
            Affinity::Averse => EsgAffinity::Averse,
        };
        Ok(())
    })
}

/// Population Pearson correlation of two arrays of length `len` (at least 3).
///
/// # Safety
/// `x` and `y` must point to `len` doubles each; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn esg_pearson(
    x: *const f64,
    y: *const f64,
    len: usize,
    out: *mut f64,
) -> EsgStatus {
    guard(|| {
        let x = slice_arg(x, len, "x")?;
        let y = slice_arg(y, len, "y")?;
        let out = out_arg(out, "out")?;
        *out = pearson(x, y)?;
        Ok(())
    })
}

/// Parses a Yahoo-style daily price CSV.
///
/// # Safety
/// `ticker` and `csv` must be nul-terminated; `out` valid. Release the
/// series with `esg_prices_free`.
#[no_mangle]
pub unsafe extern "C" fn esg_prices_parse_csv(
    ticker: *const c_char,
    csv: *const c_char,
    out: *mut *mut EsgPriceSeries,
) -> EsgStatus {
    guard(|| {
        let ticker = str_arg(ticker, "ticker")?;
        let csv = str_arg(csv, "csv")?;
        let out = out_arg(out, "out")?;
        let series = parse_prices(ticker, csv)?;
        *out = Box::into_raw(Box::new(EsgPriceSeries(series)));
        Ok(())
    })
}

/// # Safety
/// `series` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn esg_prices_free(series: *mut EsgPriceSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of bars, or 0 for a null handle.
///
/// # Safety
/// `series` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn esg_prices_len(series: *const EsgPriceSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.len())
}

/// New series holding the last `n` bars.
///
/// # Safety
/// `series` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esg_prices_tail(
    series: *const EsgPriceSeries,
    n: usize,
    out: *mut *mut EsgPriceSeries,
) -> EsgStatus {
    guard(|| {
        let series = ref_arg(series, "series")?;
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(EsgPriceSeries(tail_n(&series.0, n))));
        Ok(())
    })
}

/// Opening-price change over the series in percent.
///
/// # Safety
/// `series` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esg_prices_percent_change_open(
    series: *const EsgPriceSeries,
    out: *mut f64,
) -> EsgStatus {
    guard(|| {
        let series = ref_arg(series, "series")?;
        let out = out_arg(out, "out")?;
        *out = percent_change_open(&series.0)?;
        Ok(())
    })
}

/// The series as CSV text.
///
/// # Safety
/// `series` must be a valid handle; free the result with `esg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn esg_prices_to_csv(
    series: *const EsgPriceSeries,
    out: *mut *mut c_char,
) -> EsgStatus {
    guard(|| {
        let series = ref_arg(series, "series")?;
        let out = out_arg(out, "out")?;
        *out = to_c_string(render_prices(&series.0))?;
        Ok(())
    })
}

/// Loads a JSON run configuration. Relative paths in the file resolve
/// against its directory.
///
/// # Safety
/// `path` must be nul-terminated and `out` valid. Release with
/// `esg_config_free`.
#[no_mangle]
pub unsafe extern "C" fn esg_config_load(
    path: *const c_char,
    out: *mut *mut EsgRunConfig,
) -> EsgStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let out = out_arg(out, "out")?;
        let file = ConfigFile::load(&PathBuf::from(path))?;
        let cfg = RunConfig::resolve(file, Overrides::default())?;
        *out = Box::into_raw(Box::new(EsgRunConfig(cfg)));
        Ok(())
    })
}

/// Replaces the output directory.
///
/// # Safety
/// `config` must be a valid handle and `dir` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn esg_config_set_out(
    config: *mut EsgRunConfig,
    dir: *const c_char,
) -> EsgStatus {
    guard(|| {
        let config = out_arg(config, "config")?;
        config.0.out = PathBuf::from(str_arg(dir, "dir")?);
        Ok(())
    })
}

/// # Safety
/// `config` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn esg_config_free(config: *mut EsgRunConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs every pipeline stage. When `summary_csv` is not null it receives
/// the summary CSV text, to be freed with `esg_string_free`.
///
/// # Safety
/// `config` must be a valid handle; `summary_csv` null or valid.
#[no_mangle]
pub unsafe extern "C" fn esg_run(
    config: *const EsgRunConfig,
    summary_csv: *mut *mut c_char,
) -> EsgStatus {
    guard(|| {
        let config = ref_arg(config, "config")?;
        let outcome = pipeline::run(&config.0)?;
        if let Some(out) = summary_csv.as_mut() {
            *out = to_c_string(render_summary_csv(&outcome.rows))?;
        }
        Ok(())
    })
}
