use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::lexicon::{singular_phrases, Lexicon};
use crate::corpus::DataSource;
use crate::parser::similarity::{normalized_levenshtein, wu_palmer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchKind {
    Exact,
    Synonym,
    Fuzzy,
    Related,
    Taxonomy,
}

/// A query n-gram bound to an attribute (or one of its values) of a source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FieldMatch {
    pub query_ngram: String,
    pub source_id: String,
    pub attribute: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    pub match_kind: MatchKind,
    pub score: f64,
}

impl FieldMatch {
    pub fn is_value(&self) -> bool {
        self.value.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct MatchSettings {
    /// Maximum normalized edit distance for a fuzzy match.
    pub fuzzy_threshold: f64,
    /// Minimum Wu-Palmer similarity for a taxonomy match.
    pub taxonomy_threshold: f64,
    /// Score of a declared related term when either side lacks a taxonomy
    /// concept.
    pub related_score: f64,
    /// Cap on distinct dimension values indexed per source.
    pub max_values: usize,
}

impl Default for MatchSettings {
    fn default() -> Self {
        Self { fuzzy_threshold: 0.2, taxonomy_threshold: 0.85, related_score: 0.5, max_values: 10_000 }
    }
}

#[derive(Debug, Clone)]
struct AttrEntry {
    name: String,
    norm: String,
    synonyms: Vec<String>,
    related: Vec<String>,
    anchor: Option<String>,
}

/// Normalized attribute names, synonyms, related terms and dimension values
/// of one source, prepared for matching.
#[derive(Debug, Clone)]
pub struct SourceCatalog {
    pub source_id: String,
    attrs: Vec<AttrEntry>,
    /// normalized value → (attribute index, original value)
    values: HashMap<String, Vec<(usize, String)>>,
    values_by_len: BTreeMap<usize, Vec<String>>,
}

impl SourceCatalog {
    pub fn build(source: &DataSource, lexicon: &Lexicon, settings: &MatchSettings) -> Self {
        let attrs = source
            .attributes
            .iter()
            .map(|a| AttrEntry {
                name: a.name.clone(),
                norm: lexicon.normalize(&a.name),
                synonyms: a.synonyms.iter().map(|s| lexicon.normalize(s)).filter(|s| !s.is_empty()).collect(),
                related: a.related_terms.iter().map(|s| lexicon.normalize(s)).filter(|s| !s.is_empty()).collect(),
                anchor: a.taxonomy_node.clone().filter(|n| lexicon.taxonomy.contains(n)),
            })
            .collect();
        let mut values: HashMap<String, Vec<(usize, String)>> = HashMap::new();
        let mut count = 0;
        'cols: for (idx, attr) in source.attributes.iter().enumerate() {
            if !attr.is_dimension() || attr.data_type.is_temporal() {
                continue;
            }
            for v in source.distinct_values(idx) {
                if count >= settings.max_values {
                    tracing::warn!(source = %source.id, cap = settings.max_values, "dimension value cap reached");
                    break 'cols;
                }
                let key = lexicon.normalize(&v);
                if key.is_empty() {
                    continue;
                }
                count += 1;
                values.entry(key).or_default().push((idx, v));
            }
        }
        let mut values_by_len: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for key in values.keys() {
            values_by_len.entry(key.chars().count()).or_default().push(key.clone());
        }
        for list in values_by_len.values_mut() {
            list.sort();
        }
        Self { source_id: source.id.clone(), attrs, values, values_by_len }
    }

    /// Whether `ngram` exactly names one of the indexed values.
    pub fn has_value(&self, ngram: &str) -> bool {
        self.values.contains_key(ngram)
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    kind: MatchKind,
    score: f64,
    attr: usize,
    value: Option<String>,
}

impl Candidate {
    /// Higher score first, then kind, attribute-level before value-level,
    /// then column order and value.
    fn better_than(&self, other: &Candidate) -> bool {
        let key = |c: &Candidate| (c.kind, c.value.is_some(), c.attr, c.value.clone());
        match self.score.total_cmp(&other.score) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => key(self) < key(other),
        }
    }
}

/// Matches each n-gram against one source and keeps the single best match
/// per n-gram. Results follow the n-gram order given.
pub fn match_fields<'a>(
    ngrams: impl IntoIterator<Item = &'a str>,
    catalog: &SourceCatalog,
    lexicon: &Lexicon,
    settings: &MatchSettings,
) -> Vec<FieldMatch> {
    let mut out = Vec::new();
    for ngram in ngrams {
        if let Some(best) = best_match(ngram, catalog, lexicon, settings) {
            out.push(FieldMatch {
                query_ngram: ngram.to_string(),
                source_id: catalog.source_id.clone(),
                attribute: catalog.attrs[best.attr].name.clone(),
                value: best.value,
                match_kind: best.kind,
                score: best.score,
            });
        }
    }
    out
}

fn best_match(
    ngram: &str,
    catalog: &SourceCatalog,
    lexicon: &Lexicon,
    settings: &MatchSettings,
) -> Option<Candidate> {
    if ngram.is_empty() {
        return None;
    }
    let t = settings.fuzzy_threshold;
    let has_digit = ngram.chars().any(|c| c.is_ascii_digit());
    let singles = singular_phrases(ngram);
    let variant = |s: &String| s == ngram || singles.contains(s);
    let concept = lexicon.concept_for(ngram);
    let mut best: Option<Candidate> = None;
    let mut offer = |c: Candidate| {
        if best.as_ref().is_none_or(|b| c.better_than(b)) {
            best = Some(c);
        }
    };

    for (i, a) in catalog.attrs.iter().enumerate() {
        if ngram == a.norm {
            offer(Candidate { kind: MatchKind::Exact, score: 1.0, attr: i, value: None });
            continue;
        }
        if a.synonyms.iter().any(variant) {
            offer(Candidate { kind: MatchKind::Synonym, score: 1.0, attr: i, value: None });
            continue;
        }
        if !has_digit {
            let d = normalized_levenshtein(ngram, &a.norm);
            if d <= t {
                offer(Candidate { kind: MatchKind::Fuzzy, score: 1.0 - d, attr: i, value: None });
                continue;
            }
        }
        let similarity = match (concept, a.anchor.as_deref()) {
            (Some(c), Some(anchor)) => wu_palmer(c, anchor, &lexicon.taxonomy).ok(),
            _ => None,
        };
        if a.related.iter().any(variant) {
            let score = similarity.unwrap_or(settings.related_score);
            offer(Candidate { kind: MatchKind::Related, score, attr: i, value: None });
            continue;
        }
        if let Some(s) = similarity {
            if s >= settings.taxonomy_threshold {
                offer(Candidate { kind: MatchKind::Taxonomy, score: s, attr: i, value: None });
            }
        }
    }

    if let Some(hits) = catalog.values.get(ngram) {
        for (attr, v) in hits {
            offer(Candidate { kind: MatchKind::Exact, score: 1.0, attr: *attr, value: Some(v.clone()) });
        }
    } else if !has_digit {
        let len = ngram.chars().count();
        let lo = ((len as f64) * (1.0 - t)).floor() as usize;
        let hi = ((len as f64) / (1.0 - t).max(f64::EPSILON)).ceil() as usize;
        for key in catalog.values_by_len.range(lo.max(1)..=hi).flat_map(|(_, k)| k) {
            let d = normalized_levenshtein(ngram, key);
            if d <= t {
                for (attr, v) in &catalog.values[key] {
                    offer(Candidate { kind: MatchKind::Fuzzy, score: 1.0 - d, attr: *attr, value: Some(v.clone()) });
                }
            }
        }
    }
    best
}

/// Distinct attributes and attribute values matched for one source.
pub fn field_match_count<'a>(matches: impl IntoIterator<Item = &'a FieldMatch>, source_id: &str) -> usize {
    let mut seen = std::collections::BTreeSet::new();
    for m in matches.into_iter().filter(|m| m.source_id == source_id) {
        seen.insert((m.attribute.as_str(), m.value.as_deref()));
    }
    seen.len()
}
