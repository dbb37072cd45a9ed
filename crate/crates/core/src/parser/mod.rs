//! Query parsing: n-grams, intent detection and field matching.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub mod grammar;
pub mod matcher;
pub mod similarity;

pub use grammar::{Derivation, Grammar, IntentKind, Terminal};
pub use matcher::{field_match_count, match_fields, FieldMatch, MatchKind, MatchSettings, SourceCatalog};
pub use similarity::{levenshtein, normalized_levenshtein, wu_palmer};

use crate::corpus::{DataSource, Gazetteer, Lexicon};
use crate::index::analyzer::lex;
use crate::index::{Analyzer, TokenSet};
use crate::resources::Resources;
use crate::vizsearch::ChartTypeLexicon;

/// Limit used when a top/bottom phrase carries no usable count.
pub const DEFAULT_LIMIT: u32 = 10;

/// Argument of an intent, taken from the leaves of its derivation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum IntentArg {
    Attribute { text: String },
    Value { text: String },
    Place { text: String },
    Word { text: String },
    Number { value: f64 },
}

impl IntentArg {
    pub fn text(&self) -> Option<&str> {
        match self {
            IntentArg::Attribute { text }
            | IntentArg::Value { text }
            | IntentArg::Place { text }
            | IntentArg::Word { text } => Some(text),
            IntentArg::Number { .. } => None,
        }
    }

    pub fn number(&self) -> Option<f64> {
        match self {
            IntentArg::Number { value } => Some(*value),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Intent {
    pub kind: IntentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<String>,
    pub arguments: Vec<IntentArg>,
    /// The query words the intent spans.
    pub text: String,
}

impl Intent {
    /// The limit count of a top/bottom intent.
    pub fn limit(&self) -> Option<u32> {
        matches!(self.operator.as_deref(), Some("top" | "bottom"))
            .then(|| self.arguments.iter().find_map(IntentArg::number))
            .flatten()
            .map(|n| n as u32)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ParsedQuery {
    pub raw: String,
    pub tokens: TokenSet,
    pub terminals: Vec<Terminal>,
    pub intents: Vec<Intent>,
    pub field_matches: Vec<FieldMatch>,
}

impl ParsedQuery {
    pub fn has_intent(&self, kind: IntentKind) -> bool {
        self.intents.iter().any(|i| i.kind == kind)
    }

    pub fn matches_for<'a>(&'a self, source_id: &'a str) -> impl Iterator<Item = &'a FieldMatch> + 'a {
        self.field_matches.iter().filter(move |m| m.source_id == source_id)
    }
}

enum Segment<'g> {
    Keyword { words: Vec<String>, entry: &'g grammar::LexiconEntry },
    Content(Vec<String>),
}

/// Query parser over fixed grammar, gazetteer, chart-type and lexicon
/// snapshots.
#[derive(Debug, Clone)]
pub struct Parser {
    pub analyzer: Analyzer,
    pub grammar: Grammar,
    pub gazetteer: Gazetteer,
    pub chart_types: ChartTypeLexicon,
    pub lexicon: Lexicon,
    pub settings: MatchSettings,
}

impl Parser {
    pub fn new(resources: &Resources, analyzer: Analyzer, settings: MatchSettings) -> Self {
        Self {
            analyzer,
            grammar: resources.grammar.clone(),
            gazetteer: resources.gazetteer.clone(),
            chart_types: resources.chart_types.clone(),
            lexicon: resources.lexicon.clone(),
            settings,
        }
    }

    pub fn catalog(&self, source: &DataSource) -> SourceCatalog {
        SourceCatalog::build(source, &self.lexicon, &self.settings)
    }

    /// Parses a query against prepared source catalogs.
    pub fn parse(&self, query: &str, catalogs: &[SourceCatalog]) -> ParsedQuery {
        let tokens = self.analyzer.encode(query);
        let segments = self.segment(query);

        // multi-word keyword phrases act as operators and are kept out of
        // field matching
        let mut match_ngrams = BTreeSet::new();
        let mut run: Vec<String> = Vec::new();
        let flush = |run: &mut Vec<String>, out: &mut BTreeSet<String>| {
            out.extend(self.analyzer.ngrams(run).tokens().map(str::to_string));
            run.clear();
        };
        for seg in &segments {
            match seg {
                Segment::Keyword { words, .. } if words.len() > 1 => flush(&mut run, &mut match_ngrams),
                Segment::Keyword { words, .. } => {
                    run.extend(words.iter().filter(|w| !self.analyzer.is_stopword(w)).cloned())
                }
                Segment::Content(terms) => run.extend(terms.iter().cloned()),
            }
        }
        flush(&mut run, &mut match_ngrams);

        let mut field_matches = Vec::new();
        for cat in catalogs {
            field_matches.extend(match_fields(
                match_ngrams.iter().map(String::as_str),
                cat,
                &self.lexicon,
                &self.settings,
            ));
        }

        let terminals = self.terminals(&segments, &field_matches);
        let intents = self
            .grammar
            .derive(&terminals)
            .into_iter()
            .map(|d| self.intent(&d, &terminals))
            .collect();
        ParsedQuery { raw: query.to_string(), tokens, terminals, intents, field_matches }
    }

    /// Splits raw words into keyword phrases (longest match first) and runs
    /// of stopword-free content terms.
    fn segment(&self, query: &str) -> Vec<Segment<'_>> {
        let words = lex(query);
        let mut out = Vec::new();
        let mut content = Vec::new();
        let mut i = 0;
        while i < words.len() {
            let longest = self.grammar.max_phrase_words().min(words.len() - i);
            let hit = (1..=longest)
                .rev()
                .find_map(|len| self.grammar.phrase(&words[i..i + len]).map(|e| (len, e)));
            if let Some((len, entry)) = hit {
                if !content.is_empty() {
                    out.push(Segment::Content(std::mem::take(&mut content)));
                }
                out.push(Segment::Keyword { words: words[i..i + len].to_vec(), entry });
                i += len;
                continue;
            }
            if !self.analyzer.is_stopword(&words[i]) {
                content.push(words[i].clone());
            }
            i += 1;
        }
        if !content.is_empty() {
            out.push(Segment::Content(content));
        }
        out
    }

    fn field_classes(&self, text: &str, matches: &[FieldMatch]) -> Vec<String> {
        let mut classes = Vec::new();
        let hits: Vec<&FieldMatch> = matches.iter().filter(|m| m.query_ngram == text).collect();
        if hits.iter().any(|m| !m.is_value()) {
            classes.push("ATTRIBUTE".to_string());
        }
        if hits.iter().any(|m| m.is_value()) {
            classes.push("VALUE".to_string());
        }
        if self.gazetteer.get(text).is_some() {
            classes.push("PLACE".to_string());
        }
        classes
    }

    fn terminals(&self, segments: &[Segment<'_>], matches: &[FieldMatch]) -> Vec<Terminal> {
        let mut out = Vec::new();
        let upper = self.analyzer.max_ngram.max(self.gazetteer.max_words()).max(1);
        for seg in segments {
            match seg {
                Segment::Keyword { words, entry } => {
                    let mut classes = vec![entry.class.clone()];
                    if words.len() == 1 {
                        classes.extend(self.field_classes(&words[0], matches));
                    }
                    out.push(Terminal {
                        text: words.join(" "),
                        classes,
                        operator: Some(entry.operator.clone()),
                    });
                }
                Segment::Content(terms) => {
                    let mut p = 0;
                    while p < terms.len() {
                        let mut len = upper.min(terms.len() - p);
                        while len > 1 {
                            let text = terms[p..p + len].join(" ");
                            let special = self.gazetteer.get(&text).is_some()
                                || matches.iter().any(|m| m.query_ngram == text)
                                || self.chart_types.is_trigger(&text);
                            if special {
                                break;
                            }
                            len -= 1;
                        }
                        let text = terms[p..p + len].join(" ");
                        out.push(Terminal { classes: self.content_classes(&text, matches), text, operator: None });
                        p += len;
                    }
                }
            }
        }
        out
    }

    fn content_classes(&self, text: &str, matches: &[FieldMatch]) -> Vec<String> {
        if let Ok(v) = text.parse::<f64>() {
            let mut classes = vec!["NUMBER".to_string()];
            if v.fract() == 0.0 && (1800.0..=2100.0).contains(&v) {
                classes.push("YEAR".to_string());
            }
            return classes;
        }
        let mut classes = self.field_classes(text, matches);
        if self.chart_types.is_trigger(text) {
            classes.push("CHART_WORD".to_string());
        }
        if classes.is_empty() {
            classes.push("WORD".to_string());
        }
        classes
    }

    fn intent(&self, d: &Derivation, terminals: &[Terminal]) -> Intent {
        let mut operator = None;
        let mut arguments = Vec::new();
        for leaf in &d.leaves {
            let t = &terminals[leaf.position];
            if operator.is_none() && t.operator.is_some() && leaf.class != "CONJ" {
                operator = t.operator.clone();
            }
            let text = t.text.clone();
            match leaf.class.as_str() {
                "ATTRIBUTE" => arguments.push(IntentArg::Attribute { text }),
                "VALUE" => arguments.push(IntentArg::Value { text }),
                "PLACE" => arguments.push(IntentArg::Place { text }),
                "WORD" => arguments.push(IntentArg::Word { text }),
                "NUMBER" | "YEAR" => {
                    if let Ok(value) = text.parse() {
                        arguments.push(IntentArg::Number { value });
                    }
                }
                _ => {}
            }
        }
        if matches!(operator.as_deref(), Some("top" | "bottom")) {
            let n = arguments.iter().position(|a| a.number().is_some());
            let valid = |v: f64| v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64;
            match n {
                Some(i) if valid(arguments[i].number().unwrap()) => {}
                Some(i) => arguments[i] = IntentArg::Number { value: DEFAULT_LIMIT as f64 },
                None => arguments.insert(0, IntentArg::Number { value: DEFAULT_LIMIT as f64 }),
            }
        }
        let text = terminals[d.start..d.end].iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ");
        Intent { kind: d.kind, operator, arguments, text }
    }
}

/// Convenience wrapper: parses `query` against `sources` with the given
/// resources and default settings.
pub fn parse(query: &str, sources: &[DataSource], resources: &Resources) -> ParsedQuery {
    let mut analyzer = Analyzer::default();
    analyzer.stopwords = resources.stopwords.clone();
    let parser = Parser::new(resources, analyzer, MatchSettings::default());
    let catalogs: Vec<SourceCatalog> = sources.iter().map(|s| parser.catalog(s)).collect();
    parser.parse(query, &catalogs)
}
