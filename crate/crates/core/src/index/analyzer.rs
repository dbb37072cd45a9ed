use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::resources;

/// A multiset of lowercase string tokens (unigrams through `max_ngram`-grams).
///
/// N-gram tokens are stored as their words joined by a single space, so the
/// order of a token is `1 + number of spaces`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenSet(BTreeMap<String, u32>);

impl TokenSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, token: impl Into<String>) {
        *self.0.entry(token.into()).or_insert(0) += 1;
    }

    pub fn insert_n(&mut self, token: impl Into<String>, n: u32) {
        if n > 0 {
            *self.0.entry(token.into()).or_insert(0) += n;
        }
    }

    pub fn merge(&mut self, other: &TokenSet) {
        for (tok, n) in &other.0 {
            self.insert_n(tok.clone(), *n);
        }
    }

    /// Occurrences of `token`; zero when absent.
    pub fn count(&self, token: &str) -> u32 {
        self.0.get(token).copied().unwrap_or(0)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains_key(token)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of distinct tokens.
    pub fn distinct_len(&self) -> usize {
        self.0.len()
    }

    /// Multiset cardinality.
    pub fn total(&self) -> u64 {
        self.0.values().map(|&n| n as u64).sum()
    }

    /// Distinct tokens in ascending order.
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn unigrams(&self) -> impl Iterator<Item = &str> {
        self.tokens().filter(|t| !t.contains(' '))
    }
}

impl<S: Into<String>> FromIterator<S> for TokenSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut set = TokenSet::new();
        for tok in iter {
            set.insert(tok);
        }
        set
    }
}

/// Order of an n-gram token (1 for unigrams).
pub fn ngram_order(token: &str) -> usize {
    token.matches(' ').count() + 1
}

/// Splits text into lowercase words.
///
/// Words are maximal runs of alphanumeric characters. A `.` between two digits
/// is kept (`5.5`), a `,` between two digits is dropped (`1,000` → `1000`) and
/// apostrophes inside a word are removed (`women's` → `womens`).
pub fn lex(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut words = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let next = chars.get(i + 1).copied();
        let prev_digit = current.chars().last().is_some_and(|p| p.is_ascii_digit());
        let next_digit = next.is_some_and(|n| n.is_ascii_digit());
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else if c == '.' && prev_digit && next_digit {
            current.push('.');
        } else if c == ',' && prev_digit && next_digit {
            continue;
        } else if (c == '\'' || c == '\u{2019}')
            && !current.is_empty()
            && next.is_some_and(char::is_alphabetic)
        {
            continue;
        } else if !current.is_empty() {
            words.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        words.push(current);
    }
    words
}

/// Lowercased words of `text` minus stopwords, joined by single spaces.
pub fn normalize_with(text: &str, stopwords: &BTreeSet<String>) -> String {
    lex(text).into_iter().filter(|w| !stopwords.contains(w)).collect::<Vec<_>>().join(" ")
}

/// Candidate singular forms of a word, most likely first. Empty when the
/// word does not look plural.
pub fn singular_candidates(word: &str) -> Vec<String> {
    let n = word.len();
    if n <= 3 || !word.is_ascii() {
        return Vec::new();
    }
    if let Some(stem) = word.strip_suffix("ies") {
        return vec![format!("{stem}y"), word[..n - 1].to_string()];
    }
    for suffix in ["sses", "xes", "ches", "shes"] {
        if word.ends_with(suffix) {
            return vec![word[..n - 2].to_string(), word[..n - 1].to_string()];
        }
    }
    if word.ends_with('s') && !word.ends_with("ss") && !word.ends_with("us") && !word.ends_with("is")
    {
        return vec![word[..n - 1].to_string()];
    }
    Vec::new()
}

/// Crude English singularization: the first singular candidate, or the word
/// itself.
pub fn singular(word: &str) -> Cow<'_, str> {
    match singular_candidates(word).into_iter().next() {
        Some(s) => Cow::Owned(s),
        None => Cow::Borrowed(word),
    }
}

/// Tokenizer and filter configuration shared by indexing and querying.
///
/// Serialized next to every persisted index so a reloaded index analyzes
/// queries exactly as it analyzed documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Analyzer {
    pub stopwords: BTreeSet<String>,
    pub max_ngram: usize,
    /// Index-time synonym table, keyed by normalized term.
    #[serde(default)]
    pub synonyms: BTreeMap<String, Vec<String>>,
    /// Maximum normalized edit distance for a fuzzy unigram match.
    pub fuzzy_threshold: f64,
}

impl Default for Analyzer {
    fn default() -> Self {
        Self {
            stopwords: resources::bundled_stopwords(),
            max_ngram: 3,
            synonyms: BTreeMap::new(),
            fuzzy_threshold: 0.2,
        }
    }
}

impl Analyzer {
    pub fn with_synonyms(mut self, synonyms: BTreeMap<String, Vec<String>>) -> Self {
        self.synonyms = synonyms;
        self
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(word)
    }

    /// Lowercased words with stopwords and conjunctions removed, in order.
    pub fn terms(&self, text: &str) -> Vec<String> {
        lex(text).into_iter().filter(|w| !self.is_stopword(w)).collect()
    }

    /// Canonical form of a phrase: its terms joined by single spaces.
    pub fn normalize(&self, text: &str) -> String {
        self.terms(text).join(" ")
    }

    /// All n-grams of orders `1..=max_ngram` over a term sequence.
    pub fn ngrams(&self, terms: &[String]) -> TokenSet {
        let mut set = TokenSet::new();
        for order in 1..=self.max_ngram.max(1) {
            for window in terms.windows(order) {
                set.insert(window.join(" "));
            }
        }
        set
    }

    /// Query-side encoding: n-grams over the stopword-stripped terms.
    pub fn encode(&self, text: &str) -> TokenSet {
        self.ngrams(&self.terms(text))
    }

    /// Index-side encoding. Adds lexicon synonyms of every unigram and returns
    /// the token multiset together with the number of terms (the document
    /// vector length contributed by `text`).
    pub fn encode_document(&self, text: &str) -> (TokenSet, usize) {
        let terms = self.terms(text);
        let mut set = self.ngrams(&terms);
        for term in &terms {
            for syn in self.synonyms_of(term) {
                let syn = self.normalize(syn);
                if !syn.is_empty() && syn != *term {
                    set.insert(syn);
                }
            }
        }
        (set, terms.len())
    }

    /// Synonyms for a term, trying its singular form when the term itself
    /// has no entry.
    pub fn synonyms_of(&self, term: &str) -> &[String] {
        if let Some(s) = self.synonyms.get(term) {
            return s;
        }
        singular_candidates(term)
            .iter()
            .find_map(|c| self.synonyms.get(c))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}
