//! Verdicts produced outside this crate, e.g. by a transformer classifier.
//!
//! CSV with header `id,source,label,score`. Scores are taken as given, so
//! any `[0, 1]` confidence works whether it is a class probability or a
//! margin.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use super::{SentimentLabel, SentimentVerdict};
use crate::corpus::{DocKey, Source};
use crate::error::{Error, Result};

#[derive(Deserialize)]
struct Row {
    id: String,
    source: String,
    label: String,
    score: f64,
}

pub fn import_external_verdicts(path: &Path) -> Result<HashMap<DocKey, SentimentVerdict>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_external_verdicts(file).map_err(|e| Error::schema(format!("{}: {e}", path.display())))
}

pub fn parse_external_verdicts<R: Read>(reader: R) -> Result<HashMap<DocKey, SentimentVerdict>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::schema(format!("external verdicts: {e}")))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["id", "source", "label", "score"] {
        return Err(Error::schema(format!(
            "external verdicts: expected header id,source,label,score, got {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut out = HashMap::new();
    for (i, row) in rdr.deserialize::<Row>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::schema(format!("row {line}: {e}")))?;
        let at = |e: Error| Error::schema(format!("row {line}: {e}"));
        let source: Source = row.source.parse().map_err(at)?;
        let label: SentimentLabel = row.label.parse().map_err(at)?;
        let verdict = SentimentVerdict::new(label, row.score).map_err(at)?;
        if row.id.is_empty() {
            return Err(Error::schema(format!("row {line}: empty id")));
        }
        let key = DocKey { source, id: row.id };
        if out.insert(key.clone(), verdict).is_some() {
            return Err(Error::schema(format!(
                "row {line}: duplicate verdict for {}/{}",
                key.source, key.id
            )));
        }
    }
    Ok(out)
}
