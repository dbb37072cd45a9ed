//! Token encoding, inverted index and BM25 ranking.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod analyzer;
pub mod bm25;

pub use analyzer::{lex, ngram_order, singular, singular_candidates, Analyzer, TokenSet};
pub use bm25::{idf, Bm25Params};

use crate::parser::similarity::normalized_levenshtein;

pub const INDEX_FORMAT: &str = "chartseek-search-index";
pub const INDEX_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("duplicate document id {0:?}")]
    DuplicateId(String),
    #[error("unknown document id {0:?}")]
    UnknownDoc(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid index file: {0}")]
    Format(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A document to index: its id, the text of each searchable field, and
/// arbitrary stored fields returned with hits.
#[derive(Debug, Clone)]
pub struct IndexInput {
    pub id: String,
    pub fields: Vec<String>,
    pub stored: serde_json::Value,
}

impl IndexInput {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self { id: id.into(), fields: vec![text.into()], stored: serde_json::Value::Null }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StoredDoc {
    id: String,
    /// Document vector length: number of terms over all fields.
    length: usize,
    tokens: TokenSet,
    #[serde(default)]
    stored: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RankedEntry {
    pub id: String,
    pub raw_score: f64,
    pub norm_score: f64,
}

/// Hits in descending raw score, ties by ascending id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RankedResults {
    pub entries: Vec<RankedEntry>,
}

impl RankedResults {
    /// Sorts `(id, raw)` pairs and normalizes by the maximum raw score.
    pub fn from_scores(mut scores: Vec<(String, f64)>) -> Self {
        scores.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let max = scores.first().map(|s| s.1).unwrap_or(0.0);
        let entries = scores
            .into_iter()
            .map(|(id, raw)| RankedEntry {
                norm_score: if max > 0.0 { raw / max } else { 0.0 },
                raw_score: raw,
                id,
            })
            .collect();
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.id.as_str())
    }

    pub fn truncate(&mut self, n: usize) {
        self.entries.truncate(n);
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct IndexFile {
    format: String,
    format_version: u32,
    analyzer: Analyzer,
    params: Bm25Params,
    documents: Vec<StoredDoc>,
}

/// Immutable inverted index over one repository.
#[derive(Debug, Clone)]
pub struct SearchIndex {
    analyzer: Analyzer,
    params: Bm25Params,
    /// Sorted by id; a document's ordinal is its position here.
    docs: Vec<StoredDoc>,
    ordinals: HashMap<String, u32>,
    /// token → (ordinal, term frequency), ordinals ascending.
    postings: HashMap<String, Vec<(u32, u32)>>,
    /// Indexed unigrams grouped by character length, for fuzzy lookup.
    unigrams_by_len: BTreeMap<usize, Vec<String>>,
    avgdl: f64,
}

impl SearchIndex {
    /// Builds an index. Fails on duplicate ids or invalid parameters.
    pub fn build(
        inputs: Vec<IndexInput>,
        analyzer: Analyzer,
        params: Bm25Params,
    ) -> Result<Self, IndexError> {
        params.validate()?;
        let mut docs = Vec::with_capacity(inputs.len());
        for input in inputs {
            let mut tokens = TokenSet::new();
            let mut length = 0;
            for field in &input.fields {
                let (t, n) = analyzer.encode_document(field);
                tokens.merge(&t);
                length += n;
            }
            docs.push(StoredDoc { id: input.id, length, tokens, stored: input.stored });
        }
        Self::from_docs(docs, analyzer, params)
    }

    fn from_docs(
        mut docs: Vec<StoredDoc>,
        analyzer: Analyzer,
        params: Bm25Params,
    ) -> Result<Self, IndexError> {
        docs.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = docs.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(IndexError::DuplicateId(w[0].id.clone()));
        }
        let mut ordinals = HashMap::with_capacity(docs.len());
        let mut postings: HashMap<String, Vec<(u32, u32)>> = HashMap::new();
        let mut total_len = 0usize;
        for (ord, doc) in docs.iter().enumerate() {
            ordinals.insert(doc.id.clone(), ord as u32);
            total_len += doc.length;
            for (tok, tf) in doc.tokens.iter() {
                postings.entry(tok.to_string()).or_default().push((ord as u32, tf));
            }
        }
        let mut unigrams_by_len: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for tok in postings.keys().filter(|t| !t.contains(' ')) {
            unigrams_by_len.entry(tok.chars().count()).or_default().push(tok.clone());
        }
        for list in unigrams_by_len.values_mut() {
            list.sort();
        }
        let avgdl = if docs.is_empty() { 0.0 } else { total_len as f64 / docs.len() as f64 };
        Ok(Self { analyzer, params, docs, ordinals, postings, unigrams_by_len, avgdl })
    }

    pub fn analyzer(&self) -> &Analyzer {
        &self.analyzer
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    pub fn avgdl(&self) -> f64 {
        self.avgdl
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.docs.iter().map(|d| d.id.as_str())
    }

    pub fn contains(&self, id: &str) -> bool {
        self.ordinals.contains_key(id)
    }

    pub fn doc_len(&self, id: &str) -> Option<usize> {
        self.ordinals.get(id).map(|&o| self.docs[o as usize].length)
    }

    pub fn doc_tokens(&self, id: &str) -> Option<&TokenSet> {
        self.ordinals.get(id).map(|&o| &self.docs[o as usize].tokens)
    }

    pub fn stored(&self, id: &str) -> Option<&serde_json::Value> {
        self.ordinals.get(id).map(|&o| &self.docs[o as usize].stored)
    }

    /// Number of documents containing `token`.
    pub fn df(&self, token: &str) -> usize {
        self.postings.get(token).map_or(0, Vec::len)
    }

    /// `(doc id, term frequency)` pairs for a token, ids ascending.
    pub fn postings(&self, token: &str) -> Vec<(&str, u32)> {
        self.postings
            .get(token)
            .into_iter()
            .flatten()
            .map(|&(o, tf)| (self.docs[o as usize].id.as_str(), tf))
            .collect()
    }

    pub fn has_token(&self, token: &str) -> bool {
        self.postings.contains_key(token)
    }

    /// Indexed unigrams within the fuzzy threshold of `word`, ascending.
    pub fn fuzzy_unigrams(&self, word: &str) -> Vec<&str> {
        let t = self.analyzer.fuzzy_threshold;
        let len = word.chars().count();
        if len == 0 || t <= 0.0 {
            return Vec::new();
        }
        // |la - lb| / max(la, lb) <= t bounds the candidate lengths
        let lo = ((len as f64) * (1.0 - t)).floor() as usize;
        let hi = ((len as f64) / (1.0 - t).max(f64::EPSILON)).ceil() as usize;
        let mut out: Vec<&str> = self
            .unigrams_by_len
            .range(lo.max(1)..=hi)
            .flat_map(|(_, words)| words.iter())
            .filter(|v| normalized_levenshtein(word, v) <= t + 1e-12)
            .map(String::as_str)
            .collect();
        out.sort_unstable();
        out
    }

    /// Adds fuzzy matches for query unigrams absent from the index. Unigrams
    /// containing digits are never expanded. Idempotent.
    pub fn expand_query(&self, query: &TokenSet) -> TokenSet {
        let mut out = query.clone();
        for word in query.unigrams() {
            if self.has_token(word) || word.chars().any(|c| c.is_ascii_digit()) {
                continue;
            }
            for v in self.fuzzy_unigrams(word) {
                if !out.contains(v) {
                    out.insert(v);
                }
            }
        }
        out
    }

    /// Up to `r` ids sharing at least one (fuzzy-expanded) token with the
    /// query, largest distinct-token overlap first, ties by ascending id.
    pub fn retrieve(&self, query: &TokenSet, r: usize) -> Result<Vec<String>, IndexError> {
        if r == 0 {
            return Err(IndexError::InvalidArgument("r must be positive".into()));
        }
        let expanded = self.expand_query(query);
        let mut overlap: HashMap<u32, u32> = HashMap::new();
        for tok in expanded.tokens() {
            for &(ord, _) in self.postings.get(tok).into_iter().flatten() {
                *overlap.entry(ord).or_insert(0) += 1;
            }
        }
        let mut hits: Vec<(u32, u32)> = overlap.into_iter().collect();
        hits.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        Ok(hits.into_iter().take(r).map(|(o, _)| self.docs[o as usize].id.clone()).collect())
    }

    /// BM25 score of one document over the distinct tokens of `query`, taken
    /// as given (no fuzzy expansion).
    pub fn bm25_score(&self, query: &TokenSet, id: &str) -> Result<f64, IndexError> {
        let &ord = self.ordinals.get(id).ok_or_else(|| IndexError::UnknownDoc(id.to_string()))?;
        let weights = self.query_weights(query);
        Ok(self.score_ordinal(&weights, ord))
    }

    fn query_weights<'q>(&self, query: &'q TokenSet) -> Vec<(&'q str, f64)> {
        let n = self.docs.len();
        query
            .tokens()
            .filter_map(|t| {
                let df = self.df(t);
                (df > 0).then(|| (t, bm25::idf(n, df).expect("df <= docCnt")))
            })
            .collect()
    }

    fn score_ordinal(&self, weights: &[(&str, f64)], ord: u32) -> f64 {
        let doc = &self.docs[ord as usize];
        let len = doc.length as f64;
        weights
            .iter()
            .map(|&(tok, w)| {
                bm25::term_score(w, doc.tokens.count(tok) as f64, len, self.avgdl, self.params)
            })
            .sum()
    }

    /// Scores candidates against the fuzzy-expanded query and orders them.
    /// Unknown candidate ids are ignored.
    pub fn rank<S: AsRef<str>>(&self, query: &TokenSet, candidates: &[S]) -> RankedResults {
        let expanded = self.expand_query(query);
        let weights = self.query_weights(&expanded);
        let scores = candidates
            .iter()
            .filter_map(|c| {
                let ord = *self.ordinals.get(c.as_ref())?;
                Some((c.as_ref().to_string(), self.score_ordinal(&weights, ord)))
            })
            .collect();
        RankedResults::from_scores(scores)
    }

    /// Encodes `text`, retrieves up to `r` candidates and ranks them.
    pub fn search(&self, text: &str, r: usize) -> Result<RankedResults, IndexError> {
        let query = self.analyzer.encode(text);
        let candidates = self.retrieve(&query, r)?;
        Ok(self.rank(&query, &candidates))
    }

    pub fn to_json(&self) -> Vec<u8> {
        let file = IndexFile {
            format: INDEX_FORMAT.to_string(),
            format_version: INDEX_FORMAT_VERSION,
            analyzer: self.analyzer.clone(),
            params: self.params,
            documents: self.docs.clone(),
        };
        serde_json::to_vec(&file).expect("index serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, IndexError> {
        let file: IndexFile =
            serde_json::from_slice(bytes).map_err(|e| IndexError::Format(e.to_string()))?;
        if file.format != INDEX_FORMAT {
            return Err(IndexError::Format(format!("unexpected format {:?}", file.format)));
        }
        if file.format_version != INDEX_FORMAT_VERSION {
            return Err(IndexError::Format(format!(
                "unsupported format version {}",
                file.format_version
            )));
        }
        file.params.validate()?;
        Self::from_docs(file.documents, file.analyzer, file.params)
    }

    pub fn save(&self, path: &Path) -> Result<(), IndexError> {
        std::fs::write(path, self.to_json())
            .map_err(|source| IndexError::Io { path: path.display().to_string(), source })
    }

    pub fn load(path: &Path) -> Result<Self, IndexError> {
        let bytes = std::fs::read(path)
            .map_err(|source| IndexError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&bytes)
    }
}
