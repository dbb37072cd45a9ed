//! Ranking checked against a brute-force BM25 evaluation written out here
//! independently of the index.

use std::collections::{BTreeMap, BTreeSet};

use chartseek_core::index::{idf, Analyzer, Bm25Params, IndexInput, SearchIndex};
use chartseek_core::parser::normalized_levenshtein;
use proptest::prelude::*;

/// Words far apart in edit distance, so no fuzzy expansion applies.
const VOCAB: [&str; 30] = [
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel", "india", "juliet", "kilo",
    "lima", "mike", "november", "oscar", "papa", "quebec", "romeo", "sierra", "tango", "uniform", "victor",
    "whiskey", "xray", "yankee", "zulu", "apple", "banana", "cherry", "grape",
];

fn ngrams(words: &[&str], max: usize) -> BTreeMap<String, u32> {
    let mut out = BTreeMap::new();
    for n in 1..=max {
        for w in words.windows(n) {
            *out.entry(w.join(" ")).or_insert(0) += 1;
        }
    }
    out
}

/// ln(1 + (N - df + 0.5) / (df + 0.5)) and the saturated term frequency,
/// summed over distinct query tokens in sorted order.
fn oracle_rank(docs: &[Vec<&str>], query: &[&str], k1: f64, b: f64) -> Vec<(String, f64)> {
    let n = docs.len() as f64;
    let doc_tokens: Vec<BTreeMap<String, u32>> = docs.iter().map(|d| ngrams(d, 3)).collect();
    let avgdl = docs.iter().map(|d| d.len() as f64).sum::<f64>() / n;
    let q: BTreeSet<String> = ngrams(query, 3).into_keys().collect();
    let mut scored = Vec::new();
    for (i, toks) in doc_tokens.iter().enumerate() {
        if !q.iter().any(|t| toks.contains_key(t)) {
            continue;
        }
        let len = docs[i].len() as f64;
        let mut s = 0.0;
        for t in &q {
            let df = doc_tokens.iter().filter(|d| d.contains_key(t)).count() as f64;
            if df == 0.0 {
                continue;
            }
            let f = *toks.get(t).unwrap_or(&0) as f64;
            let w = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
            s += w * f * (k1 + 1.0) / (f + k1 * (1.0 - b + b * len / avgdl));
        }
        scored.push((format!("d{i:02}"), s));
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored
}

fn build(docs: &[Vec<&str>], params: Bm25Params) -> SearchIndex {
    let inputs = docs.iter().enumerate().map(|(i, d)| IndexInput::new(format!("d{i:02}"), d.join(" "))).collect();
    SearchIndex::build(inputs, Analyzer::default(), params).unwrap()
}

fn corpus() -> impl Strategy<Value = (Vec<Vec<&'static str>>, Vec<Vec<&'static str>>)> {
    let word = prop::sample::select(VOCAB.to_vec());
    let docs = prop::collection::vec(prop::collection::vec(word.clone(), 1..12), 1..=50);
    let queries = prop::collection::vec(prop::collection::vec(word, 1..4), 20);
    (docs, queries)
}

#[test]
fn vocabulary_avoids_stopwords_and_fuzzy_neighbours() {
    let a = Analyzer::default();
    for (i, x) in VOCAB.iter().enumerate() {
        assert!(!a.is_stopword(x), "{x}");
        for y in &VOCAB[i + 1..] {
            assert!(normalized_levenshtein(x, y) > a.fuzzy_threshold, "{x} {y}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn retrieve_and_rank_match_brute_force((docs, queries) in corpus()) {
        let params = Bm25Params::default();
        let index = build(&docs, params);
        for q in &queries {
            let tokens = index.analyzer().encode(&q.join(" "));
            let candidates = index.retrieve(&tokens, docs.len()).unwrap();
            let ranked = index.rank(&tokens, &candidates);
            let expected = oracle_rank(&docs, q, params.k1, params.b);
            let got: Vec<&str> = ranked.ids().collect();
            let want: Vec<&str> = expected.iter().map(|e| e.0.as_str()).collect();
            prop_assert_eq!(got, want);
            for (e, (_, s)) in ranked.entries.iter().zip(&expected) {
                prop_assert!((e.raw_score - s).abs() <= 1e-9 * s.max(1.0));
            }
        }
    }

    #[test]
    fn save_and_load_preserve_ranking((docs, queries) in corpus()) {
        let index = build(&docs, Bm25Params::default());
        let reloaded = SearchIndex::from_json(&index.to_json()).unwrap();
        prop_assert_eq!(reloaded.to_json(), index.to_json());
        for q in &queries {
            let text = q.join(" ");
            prop_assert_eq!(index.search(&text, docs.len()).unwrap(), reloaded.search(&text, docs.len()).unwrap());
        }
    }

    #[test]
    fn idf_strictly_decreasing_in_df(n in 1usize..500, df in 0usize..499) {
        prop_assume!(df < n);
        prop_assert!(idf(n, df).unwrap() > idf(n, df + 1).unwrap());
    }

    #[test]
    fn score_increases_with_term_frequency(f in 1u32..6, filler in 1usize..6) {
        // same length, one more occurrence of the query term
        let mut low = vec!["alpha"; f as usize];
        low.extend(std::iter::repeat_n("bravo", filler + 1));
        let mut high = vec!["alpha"; f as usize + 1];
        high.extend(std::iter::repeat_n("bravo", filler));
        let index = build(&[low, high, vec!["charlie"]], Bm25Params::default());
        let q = index.analyzer().encode("alpha");
        prop_assert!(index.bm25_score(&q, "d01").unwrap() > index.bm25_score(&q, "d00").unwrap());
    }

    #[test]
    fn without_length_normalization_length_is_irrelevant(extra in 1usize..10) {
        let mut long = vec!["alpha"];
        long.extend(std::iter::repeat_n("bravo", extra));
        let index = build(&[vec!["alpha"], long], Bm25Params::new(1.2, 0.0).unwrap());
        let q = index.analyzer().encode("alpha");
        prop_assert_eq!(index.bm25_score(&q, "d00").unwrap(), index.bm25_score(&q, "d01").unwrap());
    }
}

#[test]
fn two_document_hand_example() {
    let index = SearchIndex::build(
        vec![IndexInput::new("d1", "sales region"), IndexInput::new("d2", "profit")],
        Analyzer::default(),
        Bm25Params::new(1.2, 0.75).unwrap(),
    )
    .unwrap();
    assert_eq!(index.doc_count(), 2);
    assert_eq!(index.avgdl(), 1.5);
    let q = index.analyzer().encode("sales");
    let expected = std::f64::consts::LN_2 * 2.2 / 2.5;
    assert!((index.bm25_score(&q, "d1").unwrap() - expected).abs() < 1e-9);
    assert!((expected - 0.6100).abs() < 1e-4);
    assert_eq!(index.bm25_score(&q, "d2").unwrap(), 0.0);
    let typo = index.analyzer().encode("salez");
    assert_eq!(index.retrieve(&typo, 10).unwrap(), ["d1"]);
}

#[test]
fn reindexing_is_byte_identical() {
    let docs = vec![vec!["alpha", "bravo"], vec!["charlie"], vec!["alpha", "alpha", "delta"]];
    assert_eq!(build(&docs, Bm25Params::default()).to_json(), build(&docs, Bm25Params::default()).to_json());
}
