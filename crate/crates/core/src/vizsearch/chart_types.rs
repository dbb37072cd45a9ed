use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::index::analyzer::normalize_with;
use crate::index::TokenSet;
use crate::parser::similarity::normalized_levenshtein;
use crate::resources::ResourceError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartType {
    #[serde(default)]
    pub label: String,
    pub concepts: Vec<String>,
}

/// Chart-type ids with their trigger concepts (normalized at load).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChartTypeLexicon {
    entries: BTreeMap<String, ChartType>,
    fuzzy_threshold: f64,
}

impl ChartTypeLexicon {
    pub fn from_json(json: &str, stopwords: &BTreeSet<String>) -> Result<Self, ResourceError> {
        let raw: BTreeMap<String, ChartType> =
            serde_json::from_str(json).map_err(|e| ResourceError::invalid("chart types", e))?;
        let mut entries = BTreeMap::new();
        for (id, mut ct) in raw {
            let mut concepts = Vec::new();
            for c in ct.concepts.iter().chain(std::iter::once(&id)) {
                let norm = normalize_with(c, stopwords);
                if !norm.is_empty() && !concepts.contains(&norm) {
                    concepts.push(norm);
                }
            }
            ct.concepts = concepts;
            entries.insert(id, ct);
        }
        Ok(Self { entries, fuzzy_threshold: 0.2 })
    }

    pub fn with_fuzzy_threshold(mut self, t: f64) -> Self {
        self.fuzzy_threshold = t;
        self
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn id_set(&self) -> BTreeSet<String> {
        self.entries.keys().cloned().collect()
    }

    pub fn get(&self, id: &str) -> Option<&ChartType> {
        self.entries.get(id)
    }

    /// Chart types with a concept equal to, or within the fuzzy threshold
    /// of, a normalized phrase.
    pub fn types_for_phrase(&self, phrase: &str) -> Vec<&str> {
        if phrase.is_empty() {
            return Vec::new();
        }
        let digits = phrase.chars().any(|c| c.is_ascii_digit());
        self.entries
            .iter()
            .filter(|(_, ct)| {
                ct.concepts.iter().any(|c| {
                    c == phrase || (!digits && normalized_levenshtein(c, phrase) <= self.fuzzy_threshold)
                })
            })
            .map(|(id, _)| id.as_str())
            .collect()
    }

    pub fn is_trigger(&self, phrase: &str) -> bool {
        !self.types_for_phrase(phrase).is_empty()
    }

    /// Every chart type triggered by some n-gram of the query.
    pub fn detect(&self, tokens: &TokenSet) -> BTreeSet<String> {
        tokens.tokens().flat_map(|t| self.types_for_phrase(t)).map(str::to_string).collect()
    }

    /// Query tokens that act as chart-type triggers, including every word of
    /// a multi-word trigger.
    pub fn trigger_words(&self, tokens: &TokenSet) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for t in tokens.tokens().filter(|t| self.is_trigger(t)) {
            out.extend(t.split(' ').map(str::to_string));
        }
        out
    }
}
