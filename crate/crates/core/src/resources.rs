//! Lexical resources bundled with the crate and their loaders.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::corpus::{Gazetteer, Lexicon};
use crate::parser::Grammar;
use crate::vizsearch::ChartTypeLexicon;

pub const STOPWORDS: &str = include_str!("../../../data/stopwords.txt");
pub const LEXICON_JSON: &str = include_str!("../../../data/lexicon.json");
pub const GRAMMAR_JSON: &str = include_str!("../../../data/grammar.json");
pub const CHART_TYPES_JSON: &str = include_str!("../../../data/chart_types.json");
pub const GAZETTEER_JSON: &str = include_str!("../../../data/gazetteer.json");
pub const US_STATES_GEOJSON: &str = include_str!("../../../data/geometry/us-states.json");

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid {what}: {message}")]
    Invalid { what: &'static str, message: String },
}

impl ResourceError {
    pub(crate) fn invalid(what: &'static str, message: impl std::fmt::Display) -> Self {
        ResourceError::Invalid { what, message: message.to_string() }
    }
}

/// Parses a stopword list: one word per line, `#` starts a comment line.
pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn bundled_stopwords() -> BTreeSet<String> {
    parse_stopwords(STOPWORDS)
}

/// Everything the analyzer, parser and design search need besides the corpora.
#[derive(Debug, Clone)]
pub struct Resources {
    pub stopwords: BTreeSet<String>,
    pub lexicon: Lexicon,
    pub grammar: Grammar,
    pub chart_types: ChartTypeLexicon,
    pub gazetteer: Gazetteer,
}

impl Resources {
    /// The resources compiled into the crate.
    pub fn bundled() -> Self {
        Self::from_strs(STOPWORDS, LEXICON_JSON, GRAMMAR_JSON, CHART_TYPES_JSON, GAZETTEER_JSON)
            .expect("bundled resources are valid")
    }

    pub fn from_strs(
        stopwords: &str,
        lexicon: &str,
        grammar: &str,
        chart_types: &str,
        gazetteer: &str,
    ) -> Result<Self, ResourceError> {
        let stopwords = parse_stopwords(stopwords);
        Ok(Self {
            lexicon: Lexicon::from_json(lexicon, &stopwords)?,
            grammar: Grammar::from_json(grammar)?,
            chart_types: ChartTypeLexicon::from_json(chart_types, &stopwords)?,
            gazetteer: Gazetteer::from_json(gazetteer, &stopwords)?,
            stopwords,
        })
    }

    /// Loads resources from a directory. Files that are absent fall back to
    /// the bundled copy.
    pub fn load_dir(dir: &Path) -> Result<Self, ResourceError> {
        let read = |name: &str, fallback: &'static str| -> Result<String, ResourceError> {
            let path = dir.join(name);
            if path.exists() {
                std::fs::read_to_string(&path).map_err(|source| ResourceError::Io { path, source })
            } else {
                Ok(fallback.to_string())
            }
        };
        Self::from_strs(
            &read("stopwords.txt", STOPWORDS)?,
            &read("lexicon.json", LEXICON_JSON)?,
            &read("grammar.json", GRAMMAR_JSON)?,
            &read("chart_types.json", CHART_TYPES_JSON)?,
            &read("gazetteer.json", GAZETTEER_JSON)?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_resources_parse() {
        let r = Resources::bundled();
        assert!(r.stopwords.contains("the"));
        assert!(!r.stopwords.contains("top"));
        assert!(r.chart_types.ids().count() >= 12);
    }

    #[test]
    fn stopword_comments_are_ignored() {
        let s = parse_stopwords("# header\nThe\n\n a \n");
        assert_eq!(s.into_iter().collect::<Vec<_>>(), ["a", "the"]);
    }
}
