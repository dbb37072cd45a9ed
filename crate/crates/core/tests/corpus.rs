use std::path::PathBuf;

use chartseek_core::corpus::{enrich_attribute, enrich_source, load_source_dir, load_viz_corpus, Attribute, DataType, Role};
use chartseek_core::engine::analyzer_for;
use chartseek_core::index::ngram_order;
use chartseek_core::Resources;
use proptest::prelude::*;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

const WORDS: [&str; 16] = [
    "Sales", "by", "REGION", "the", "Average", "price", "of", "homes", "in", "Texas", "and", "Movie", "budgets",
    "over", "time", "2020",
];

proptest! {
    #[test]
    fn encoding_is_idempotent_on_unigrams(words in prop::collection::vec(prop::sample::select(WORDS.to_vec()), 0..12)) {
        let r = Resources::bundled();
        let analyzer = analyzer_for(&r);
        let text = words.join(" ");
        let first = analyzer.encode(&text);
        for t in first.tokens() {
            prop_assert_eq!(t.to_lowercase(), t);
            prop_assert!(t.split(' ').all(|w| !analyzer.is_stopword(w)));
            prop_assert!(ngram_order(t) <= analyzer.max_ngram);
        }
        let unigrams: Vec<&str> = first.unigrams().collect();
        let again = analyzer.encode(&unigrams.join(" "));
        prop_assert_eq!(again.unigrams().collect::<Vec<_>>(), unigrams);
    }

    #[test]
    fn enrichment_is_idempotent(
        name in prop::sample::select(vec!["Sales", "Price", "Revenue", "State", "Order Date", "Genre", "Budget", "Cases", "Team", "Units", "Widgets"]),
        data_type in prop::sample::select(vec![DataType::Numeric, DataType::Text, DataType::Temporal, DataType::Geospatial]),
    ) {
        let r = Resources::bundled();
        let role = if data_type == DataType::Numeric { Role::Measure } else { Role::Dimension };
        let once = enrich_attribute(&Attribute::new(name, data_type, role), &r.lexicon);
        let twice = enrich_attribute(&once, &r.lexicon);
        prop_assert_eq!(once, twice);
    }
}

#[test]
fn bundled_corpus_loads() {
    let r = Resources::bundled();
    let sources = load_source_dir(&data("sources"), &r.gazetteer, &r.lexicon).unwrap();
    let ids: Vec<&str> = sources.iter().map(|s| s.id.as_str()).collect();
    assert_eq!(ids, ["coffee", "covid", "crimes", "housing", "movies", "nba", "sales", "superstore"]);
    let housing = sources.iter().find(|s| s.id == "housing").unwrap();
    assert!(housing.attributes.iter().any(|a| a.data_type == DataType::Geospatial));
    for s in &sources {
        let mut again = s.clone();
        enrich_source(&mut again, &r.lexicon);
        assert_eq!(&again, s, "{}", s.id);
    }

    let viz = load_viz_corpus(&data("viz_corpus.jsonl"), Some(&r.chart_types.id_set())).unwrap();
    assert_eq!(viz.docs.len(), 1000);
    assert!(viz.diagnostics.is_empty());
}

#[test]
fn missing_source_dir_names_the_path() {
    let r = Resources::bundled();
    let err = load_source_dir(&data("no-such-dir"), &r.gazetteer, &r.lexicon).unwrap_err();
    assert!(err.to_string().contains("no-such-dir"), "{err}");
}
