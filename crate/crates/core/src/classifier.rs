//! Query routing between Q&A over curated data sources and general search.

use serde::{Deserialize, Serialize};

use crate::corpus::DataSource;
use crate::index::{Analyzer, Bm25Params, IndexError, IndexInput, SearchIndex};
use crate::parser::{field_match_count, ParsedQuery};

/// Dimensions with at most this many distinct values contribute their
/// values to the data-source index.
pub const MAX_INDEXED_DIMENSION_VALUES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct Thresholds {
    /// Minimum distinct attributes/values the top source must match.
    pub field_match: usize,
    /// Minimum normalized score of the top source.
    pub norm_match: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { field_match: 2, norm_match: 0.3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DataSourceScore {
    pub source_id: String,
    pub field_match_count: usize,
    pub raw_score: f64,
    pub norm_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchPlan {
    pub has_analytical_intent: bool,
    #[serde(rename = "hasDSMatch")]
    pub has_ds_match: bool,
    #[serde(rename = "invokeQA")]
    pub invoke_qa: bool,
    pub ranked_sources: Vec<DataSourceScore>,
    pub thresholds: Thresholds,
}

impl SearchPlan {
    pub fn top_source(&self) -> Option<&DataSourceScore> {
        self.ranked_sources.first()
    }
}

/// Index text of a data source: name, description, attribute names with
/// their synonyms and related terms, and the values of low-cardinality
/// dimensions.
pub fn source_index_text(source: &DataSource) -> String {
    let mut parts = vec![source.name.clone(), source.description.clone()];
    for (idx, attr) in source.attributes.iter().enumerate() {
        parts.push(attr.name.clone());
        parts.extend(attr.synonyms.iter().cloned());
        parts.extend(attr.related_terms.iter().cloned());
        if attr.is_dimension() && !attr.data_type.is_temporal() {
            let values = source.distinct_values(idx);
            if values.len() <= MAX_INDEXED_DIMENSION_VALUES {
                parts.extend(values);
            }
        }
    }
    parts.join(" \n ")
}

pub fn build_source_index(
    sources: &[DataSource],
    analyzer: Analyzer,
    params: Bm25Params,
) -> Result<SearchIndex, IndexError> {
    let inputs = sources
        .iter()
        .map(|s| IndexInput {
            id: s.id.clone(),
            fields: vec![source_index_text(s)],
            stored: serde_json::json!({ "name": s.name, "description": s.description }),
        })
        .collect();
    SearchIndex::build(inputs, analyzer, params)
}

/// Share-of-total normalization. All-zero input yields all-zero scores;
/// order is preserved.
pub fn normalize_scores(mut scores: Vec<DataSourceScore>) -> Vec<DataSourceScore> {
    let total: f64 = scores.iter().map(|s| s.raw_score.max(0.0)).sum();
    for s in &mut scores {
        s.norm_score = if total > 0.0 { s.raw_score.max(0.0) / total } else { 0.0 };
    }
    scores
}

/// Scores every data source sharing a token with the query, in rank order.
pub fn score_sources(parsed: &ParsedQuery, ds_index: &SearchIndex) -> Vec<DataSourceScore> {
    if ds_index.doc_count() == 0 || parsed.tokens.is_empty() {
        return Vec::new();
    }
    let candidates = ds_index.retrieve(&parsed.tokens, ds_index.doc_count()).expect("positive r");
    let ranked = ds_index.rank(&parsed.tokens, &candidates);
    let scores = ranked
        .entries
        .into_iter()
        .map(|e| DataSourceScore {
            field_match_count: field_match_count(&parsed.field_matches, &e.id),
            source_id: e.id,
            raw_score: e.raw_score,
            norm_score: 0.0,
        })
        .collect();
    normalize_scores(scores)
}

/// Decides whether a query invokes Q&A search in addition to general search.
pub fn classify(parsed: &ParsedQuery, ds_index: &SearchIndex, thresholds: Thresholds) -> SearchPlan {
    let ranked_sources = score_sources(parsed, ds_index);
    let has_analytical_intent = !parsed.intents.is_empty();
    let has_ds_match = ranked_sources.first().is_some_and(|top| {
        top.raw_score > 0.0
            && top.field_match_count >= thresholds.field_match
            && top.norm_score >= thresholds.norm_match
    });
    tracing::debug!(query = %parsed.raw, has_analytical_intent, has_ds_match, "classified query");
    SearchPlan {
        has_analytical_intent,
        has_ds_match,
        invoke_qa: has_analytical_intent && has_ds_match,
        ranked_sources,
        thresholds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn score(id: &str, raw: f64) -> DataSourceScore {
        DataSourceScore { source_id: id.into(), field_match_count: 0, raw_score: raw, norm_score: 0.0 }
    }

    #[test]
    fn share_of_total() {
        let n = normalize_scores(vec![score("a", 5.0)]);
        assert_eq!(n[0].norm_score, 1.0);
        let n = normalize_scores(vec![score("a", 3.0), score("b", 1.0)]);
        assert_eq!((n[0].norm_score, n[1].norm_score), (0.75, 0.25));
        let n = normalize_scores(vec![score("a", 0.0), score("b", 0.0)]);
        assert!(n.iter().all(|s| s.norm_score == 0.0));
        assert!(normalize_scores(vec![]).is_empty());
    }

    #[test]
    fn plan_serializes_with_flag_names() {
        let plan = SearchPlan {
            has_analytical_intent: true,
            has_ds_match: false,
            invoke_qa: false,
            ranked_sources: vec![],
            thresholds: Thresholds::default(),
        };
        let v = serde_json::to_value(&plan).unwrap();
        assert_eq!(v["hasDSMatch"], false);
        assert_eq!(v["invokeQA"], false);
        assert_eq!(v["thresholds"]["fieldMatch"], 2);
    }
}
