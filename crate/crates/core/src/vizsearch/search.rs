use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::VizDocument;
use crate::index::{Analyzer, Bm25Params, IndexError, IndexInput, RankedResults, SearchIndex, TokenSet};
use crate::vizsearch::ChartTypeLexicon;

/// Default number of pre-authored results returned.
pub const DEFAULT_RESULT_LIMIT: usize = 50;

/// How design search treats documents without a detected chart type.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignMode {
    /// Chart-type matches rank first; other content hits follow.
    #[default]
    Boost,
    /// Only chart-type matches are returned.
    Strict,
}

/// Index input for a visualization: its text fields are searchable and the
/// whole record is stored.
pub fn viz_index_input(doc: &VizDocument) -> IndexInput {
    IndexInput {
        id: doc.id.clone(),
        fields: vec![doc.index_text()],
        stored: serde_json::to_value(doc).expect("viz document serializes"),
    }
}

pub fn build_viz_index(
    docs: &[VizDocument],
    analyzer: Analyzer,
    params: Bm25Params,
) -> Result<SearchIndex, IndexError> {
    SearchIndex::build(docs.iter().map(viz_index_input).collect(), analyzer, params)
}

/// Chart types stored with an indexed visualization.
pub fn stored_chart_types(index: &SearchIndex, id: &str) -> Vec<String> {
    index
        .stored(id)
        .and_then(|v| v.get("chartTypes"))
        .and_then(|v| v.as_array())
        .map(|a| a.iter().filter_map(|t| t.as_str().map(str::to_string)).collect())
        .unwrap_or_default()
}

fn rank_all(index: &SearchIndex, tokens: &TokenSet) -> RankedResults {
    if index.doc_count() == 0 || tokens.is_empty() {
        return RankedResults::default();
    }
    let candidates = index.retrieve(tokens, index.doc_count()).expect("positive r");
    index.rank(tokens, &candidates)
}

/// Keyword search: every document overlapping the query, ranked by BM25,
/// truncated to `limit`.
pub fn exploratory_search(query: &str, index: &SearchIndex, limit: usize) -> RankedResults {
    let mut results = rank_all(index, &index.analyzer().encode(query));
    results.truncate(limit);
    results
}

/// Search keyed on chart types named in the query. Documents of a detected
/// type rank above all others; the query tokens that are not chart-type
/// triggers drive relevance within each group. Without a detected type this
/// is exactly [`exploratory_search`].
pub fn design_search(
    query: &str,
    index: &SearchIndex,
    lexicon: &ChartTypeLexicon,
    limit: usize,
    mode: DesignMode,
) -> RankedResults {
    let tokens = index.analyzer().encode(query);
    let detected = lexicon.detect(&tokens);
    if detected.is_empty() {
        return exploratory_search(query, index, limit);
    }
    let triggers = lexicon.trigger_words(&tokens);
    let content: TokenSet = tokens
        .iter()
        .filter(|(t, _)| !t.split(' ').any(|w| triggers.contains(w)))
        .flat_map(|(t, n)| std::iter::repeat_n(t.to_string(), n as usize))
        .collect();

    let typed: BTreeSet<String> = index
        .ids()
        .filter(|id| stored_chart_types(index, id).iter().any(|t| detected.contains(t)))
        .map(str::to_string)
        .collect();
    let mut candidates: BTreeSet<String> = typed.clone();
    if mode == DesignMode::Boost && !content.is_empty() {
        candidates.extend(index.retrieve(&content, index.doc_count()).expect("positive r"));
    }
    let candidates: Vec<String> = candidates.into_iter().collect();
    let ranked = index.rank(&content, &candidates);
    let (mut first, rest): (Vec<_>, Vec<_>) =
        ranked.entries.into_iter().partition(|e| typed.contains(&e.id));
    first.extend(rest);
    first.truncate(limit);
    RankedResults { entries: first }
}
