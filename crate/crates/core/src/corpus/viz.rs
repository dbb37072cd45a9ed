use std::collections::BTreeSet;
use std::io::BufRead;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::CorpusError;

/// Metadata record of one pre-authored visualization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VizDocument {
    pub id: String,
    pub title: String,
    #[serde(default)]
    pub caption: String,
    #[serde(default)]
    pub tags: Vec<String>,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub author_name: String,
    pub created_date: NaiveDate,
    #[serde(default)]
    pub chart_types: Vec<String>,
    #[serde(default)]
    pub mark_types: Vec<String>,
    #[serde(default)]
    pub source_url: String,
    #[serde(default)]
    pub thumbnail_ref: String,
}

impl VizDocument {
    /// Text fields that feed the search index.
    pub fn index_text(&self) -> String {
        let mut parts = vec![self.title.as_str(), self.caption.as_str()];
        parts.extend(self.tags.iter().map(String::as_str));
        parts.push(self.description.as_str());
        parts.push(self.author_name.as_str());
        parts.join(" \n ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct VizCorpus {
    pub docs: Vec<VizDocument>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Loads a newline-delimited JSON visualization corpus. Invalid records are
/// skipped and reported as diagnostics; only an unreadable file is an error.
///
/// When `known_chart_types` is given, records naming other chart types are
/// rejected.
pub fn load_viz_corpus(
    path: &Path,
    known_chart_types: Option<&BTreeSet<String>>,
) -> Result<VizCorpus, CorpusError> {
    let file = std::fs::File::open(path).map_err(|e| CorpusError::io(path, e))?;
    parse_viz_corpus(std::io::BufReader::new(file), known_chart_types)
        .map_err(|e| CorpusError::io(path, e))
}

pub fn parse_viz_corpus<R: BufRead>(
    reader: R,
    known_chart_types: Option<&BTreeSet<String>>,
) -> std::io::Result<VizCorpus> {
    let mut corpus = VizCorpus::default();
    let mut ids = BTreeSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        match validate(&line, known_chart_types, &ids) {
            Ok(doc) => {
                ids.insert(doc.id.clone());
                corpus.docs.push(doc);
            }
            Err(message) => {
                tracing::warn!(line = line_no, %message, "skipping visualization record");
                corpus.diagnostics.push(Diagnostic { line: line_no, message });
            }
        }
    }
    Ok(corpus)
}

fn validate(
    line: &str,
    known: Option<&BTreeSet<String>>,
    ids: &BTreeSet<String>,
) -> Result<VizDocument, String> {
    let value: serde_json::Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    let title = value.get("title").and_then(|t| t.as_str()).unwrap_or("");
    if title.trim().is_empty() {
        return Err("missing title".into());
    }
    let doc: VizDocument = serde_json::from_value(value).map_err(|e| format!("invalid record: {e}"))?;
    if doc.id.trim().is_empty() {
        return Err("missing id".into());
    }
    if ids.contains(&doc.id) {
        return Err(format!("duplicate id {:?}", doc.id));
    }
    if let Some(known) = known {
        if let Some(bad) = doc.chart_types.iter().find(|c| !known.contains(*c)) {
            return Err(format!("unknown chart type {bad:?}"));
        }
    }
    Ok(doc)
}
