use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::index::analyzer::lex;
use crate::resources::ResourceError;

/// Terminal classes a query chunk can carry.
pub const TERMINAL_CLASSES: [&str; 16] = [
    "AGG_WORD",
    "GROUP_MARKER",
    "CORR_WORD",
    "FILTER_OP",
    "LIMIT_OP",
    "TIME_WORD",
    "GEO_MARKER",
    "GEO_WORD",
    "CONJ",
    "NUMBER",
    "YEAR",
    "ATTRIBUTE",
    "VALUE",
    "PLACE",
    "CHART_WORD",
    "WORD",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IntentKind {
    Grouping,
    Aggregation,
    Correlation,
    FilterLimit,
    Temporal,
    Geospatial,
}

impl IntentKind {
    pub const ALL: [IntentKind; 6] = [
        IntentKind::Grouping,
        IntentKind::Aggregation,
        IntentKind::Correlation,
        IntentKind::FilterLimit,
        IntentKind::Temporal,
        IntentKind::Geospatial,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IntentKind::Grouping => "Grouping",
            IntentKind::Aggregation => "Aggregation",
            IntentKind::Correlation => "Correlation",
            IntentKind::FilterLimit => "FilterLimit",
            IntentKind::Temporal => "Temporal",
            IntentKind::Geospatial => "Geospatial",
        }
    }
}

impl fmt::Display for IntentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub phrase: String,
    pub class: String,
    pub operator: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexicalRule {
    pub lhs: String,
    pub terminal: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryRule {
    pub lhs: String,
    pub rhs: [String; 2],
}

#[derive(Debug, Deserialize)]
struct GrammarFile {
    version: u32,
    lexicon: Vec<LexiconEntry>,
    lexical: Vec<LexicalRule>,
    binary: Vec<BinaryRule>,
    intents: BTreeMap<String, IntentKind>,
}

/// Intent grammar in Chomsky normal form over terminal classes, plus the
/// keyword lexicon that assigns classes to query phrases.
#[derive(Debug, Clone)]
pub struct Grammar {
    pub version: u32,
    pub lexicon: Vec<LexiconEntry>,
    pub lexical: Vec<LexicalRule>,
    pub binary: Vec<BinaryRule>,
    pub intents: BTreeMap<String, IntentKind>,
    phrases: HashMap<Vec<String>, usize>,
    max_phrase_words: usize,
}

/// One input position for the chart parser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Terminal {
    pub text: String,
    pub classes: Vec<String>,
    /// Operator carried by a keyword-lexicon phrase.
    pub operator: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum Back {
    Leaf { class: String },
    Split { mid: usize, left: String, right: String },
}

/// A leaf of an intent derivation.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedLeaf {
    pub position: usize,
    pub class: String,
}

/// One intent derivation selected from the chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub kind: IntentKind,
    pub nonterminal: String,
    pub start: usize,
    pub end: usize,
    pub leaves: Vec<DerivedLeaf>,
}

impl Grammar {
    pub fn from_json(json: &str) -> Result<Self, ResourceError> {
        let file: GrammarFile =
            serde_json::from_str(json).map_err(|e| ResourceError::invalid("grammar", e))?;
        let known = |c: &str| TERMINAL_CLASSES.contains(&c);
        for e in &file.lexicon {
            if !known(&e.class) {
                return Err(ResourceError::invalid("grammar", format!("unknown class {:?}", e.class)));
            }
        }
        for r in &file.lexical {
            if !known(&r.terminal) {
                return Err(ResourceError::invalid("grammar", format!("unknown terminal {:?}", r.terminal)));
            }
        }
        let mut phrases = HashMap::new();
        let mut max_phrase_words = 0;
        for (i, e) in file.lexicon.iter().enumerate() {
            let words = lex(&e.phrase);
            if words.is_empty() {
                return Err(ResourceError::invalid("grammar", format!("empty phrase {:?}", e.phrase)));
            }
            max_phrase_words = max_phrase_words.max(words.len());
            phrases.entry(words).or_insert(i);
        }
        Ok(Self {
            version: file.version,
            lexicon: file.lexicon,
            lexical: file.lexical,
            binary: file.binary,
            intents: file.intents,
            phrases,
            max_phrase_words,
        })
    }

    pub fn max_phrase_words(&self) -> usize {
        self.max_phrase_words
    }

    /// Keyword-lexicon entry for an exact word sequence.
    pub fn phrase(&self, words: &[String]) -> Option<&LexiconEntry> {
        self.phrases.get(words).map(|&i| &self.lexicon[i])
    }

    /// Operators the keyword lexicon can emit.
    pub fn operators(&self) -> impl Iterator<Item = &str> {
        self.lexicon.iter().map(|e| e.operator.as_str())
    }

    /// Runs CKY over the terminals and returns non-overlapping intent
    /// derivations, preferring longer spans and then earlier starts. The
    /// result is ordered by start position.
    pub fn derive(&self, input: &[Terminal]) -> Vec<Derivation> {
        let n = input.len();
        if n == 0 {
            return Vec::new();
        }
        // chart[start][len - 1]: nonterminal → first backpointer found
        let mut chart: Vec<Vec<Vec<(String, Back)>>> = vec![vec![Vec::new(); n]; n];
        let add = |cell: &mut Vec<(String, Back)>, lhs: &str, back: Back| {
            if !cell.iter().any(|(nt, _)| nt == lhs) {
                cell.push((lhs.to_string(), back));
            }
        };
        for (i, t) in input.iter().enumerate() {
            for class in &t.classes {
                for rule in self.lexical.iter().filter(|r| &r.terminal == class) {
                    add(&mut chart[i][0], &rule.lhs, Back::Leaf { class: class.clone() });
                }
            }
        }
        for len in 2..=n {
            for start in 0..=n - len {
                let mut cell = Vec::new();
                for split in 1..len {
                    let left = &chart[start][split - 1];
                    let right = &chart[start + split][len - split - 1];
                    if left.is_empty() || right.is_empty() {
                        continue;
                    }
                    for rule in &self.binary {
                        let [b, c] = &rule.rhs;
                        if left.iter().any(|(nt, _)| nt == b) && right.iter().any(|(nt, _)| nt == c) {
                            add(
                                &mut cell,
                                &rule.lhs,
                                Back::Split { mid: start + split, left: b.clone(), right: c.clone() },
                            );
                        }
                    }
                }
                chart[start][len - 1] = cell;
            }
        }

        let mut taken = vec![false; n];
        let mut out = Vec::new();
        for len in (1..=n).rev() {
            for start in 0..=n - len {
                if taken[start..start + len].iter().any(|&t| t) {
                    continue;
                }
                let found = chart[start][len - 1]
                    .iter()
                    .find_map(|(nt, _)| self.intents.get(nt).map(|k| (nt.clone(), *k)));
                if let Some((nt, kind)) = found {
                    let mut leaves = Vec::new();
                    collect_leaves(&chart, start, start + len, &nt, &mut leaves);
                    taken[start..start + len].iter_mut().for_each(|t| *t = true);
                    out.push(Derivation { kind, nonterminal: nt, start, end: start + len, leaves });
                }
            }
        }
        out.sort_by_key(|d| d.start);
        out
    }
}

fn collect_leaves(
    chart: &[Vec<Vec<(String, Back)>>],
    start: usize,
    end: usize,
    nt: &str,
    out: &mut Vec<DerivedLeaf>,
) {
    let cell = &chart[start][end - start - 1];
    let Some((_, back)) = cell.iter().find(|(n, _)| n == nt) else {
        return;
    };
    match back {
        Back::Leaf { class } => out.push(DerivedLeaf { position: start, class: class.clone() }),
        Back::Split { mid, left, right } => {
            collect_leaves(chart, start, *mid, left, out);
            collect_leaves(chart, *mid, end, right, out);
        }
    }
}
