use std::path::PathBuf;
use std::sync::{Arc, OnceLock};

use chartseek_core::corpus::{build_data_source, load_source_dir, load_viz_corpus, DataSource};
use chartseek_core::parser::IntentKind;
use chartseek_core::qa::{
    choose_encoding, execute_spec, numbers_in, rephrase_summary, AnalyticalSpec, Channel, GenerationError, KeyStats,
    Mark, MeasureRef, QaError, TextGenerator,
};
use chartseek_core::corpus::Aggregate;
use chartseek_core::{Engine, EngineSettings, Resources, SearchRequest};
use proptest::prelude::*;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn corpus() -> (Resources, Vec<DataSource>, Vec<chartseek_core::corpus::VizDocument>) {
    let r = Resources::bundled();
    let sources = load_source_dir(&data("sources"), &r.gazetteer, &r.lexicon).unwrap();
    let viz = load_viz_corpus(&data("viz_corpus.jsonl"), Some(&r.chart_types.id_set())).unwrap();
    (r, sources, viz.docs)
}

fn engine() -> &'static Engine {
    static ENGINE: OnceLock<Engine> = OnceLock::new();
    ENGINE.get_or_init(|| {
        let (r, sources, docs) = corpus();
        Engine::build(r, sources, docs, EngineSettings::default()).unwrap()
    })
}

const TREND_QUERY: &str = "How has the trend of movie budgets changed over time for different genres?";

/// (query, routed source when the query goes to Q&A)
const ROUTING: [(&str, Option<&str>); 12] = [
    (TREND_QUERY, Some("movies")),
    ("elections", None),
    ("treemap stocks", None),
    ("sales by region", Some("sales")),
    ("housing prices usa", Some("housing")),
    ("correlate budget and gross", Some("movies")),
    ("average price by home type", Some("housing")),
    ("covid cases in canada", Some("covid")),
    ("top 5 teams by wins", Some("nba")),
    ("incidents by crime over time", Some("crimes")),
    ("crime in usa", None),
    ("bar and line charts", None),
];

#[test]
fn routing_suite() {
    for (q, expected) in ROUTING {
        let r = engine().search(&SearchRequest::new(q)).unwrap();
        assert_eq!(r.plan.invoke_qa, expected.is_some(), "{q}");
        assert_eq!(r.qa.as_ref().map(|a| a.source_id.as_str()), expected, "{q}");
        assert!(!r.general.results.is_empty(), "{q}");
        if let Some(qa) = &r.qa {
            assert!(qa.chart_spec.is_some(), "{q}: {:?}", qa.message);
        }
    }
}

#[test]
fn generated_marks() {
    let mark = |q: &str| {
        let r = engine().search(&SearchRequest::new(q)).unwrap();
        r.qa.and_then(|a| a.chart_spec).map(|c| c.mark)
    };
    assert_eq!(mark("sales by region"), Some(Mark::Bar));
    assert_eq!(mark(TREND_QUERY), Some(Mark::Line));
    assert_eq!(mark("correlate budget and gross"), Some(Mark::Point));
    assert_eq!(mark("housing prices usa"), Some(Mark::Geoshape));

    let r = engine().search(&SearchRequest::new(TREND_QUERY)).unwrap();
    let chart = r.qa.unwrap().chart_spec.unwrap();
    assert_eq!(chart.encoding(Channel::Color).unwrap().field, "Genre");
}

#[test]
fn sales_by_region_key_stats() {
    let r = engine().search(&SearchRequest::new("sales by region")).unwrap();
    let qa = r.qa.unwrap();
    assert_eq!(
        qa.key_stats.unwrap().lines,
        [
            "Region: Central has a minimum value of $220 for Sales",
            "Region: South has the maximum value of $240 for Sales",
            "Average Sales across Region is: $230",
        ]
    );
    assert_eq!(qa.source_ranking[0].source_id, "sales");
    let total: f64 = qa.source_ranking.iter().map(|s| s.percentage).sum();
    assert!((total - 100.0).abs() < 1e-9);
}

#[test]
fn design_query_puts_chart_type_first() {
    let r = engine().search(&SearchRequest::new("treemap stocks")).unwrap();
    assert_eq!(r.general.mode, "design");
    assert_eq!(r.general.detected_chart_types, ["treemap"]);
    assert!(r.general.results[0].doc.chart_types.iter().any(|t| t == "treemap"));
}

#[test]
fn empty_query() {
    let r = engine().search(&SearchRequest::new("")).unwrap();
    assert!(r.qa.is_none());
    assert!(r.general.results.is_empty());
    assert_eq!(r.general.total, 0);
}

#[test]
fn limit_and_facets_apply_after_ranking() {
    let mut req = SearchRequest::new("elections");
    let all = engine().search(&req).unwrap();
    req.limit = Some(3);
    req.facets.selected_chart_types.insert("map".into());
    let r = engine().search(&req).unwrap();
    assert!(r.general.results.len() <= 3);
    assert!(r.general.results.iter().all(|h| h.doc.chart_types.iter().any(|t| t == "map")));
    let expected: Vec<&str> = all
        .general
        .results
        .iter()
        .filter(|h| h.doc.chart_types.iter().any(|t| t == "map"))
        .map(|h| h.id.as_str())
        .take(3)
        .collect();
    assert_eq!(r.general.results.iter().map(|h| h.id.as_str()).collect::<Vec<_>>(), expected);
    assert_eq!(r.general.facets.chart_type_counts.get("map"), Some(&r.general.total));
}

#[test]
fn intent_exemplars() {
    let cases = [
        ("average sales", IntentKind::Aggregation, "average"),
        ("sales by region", IntentKind::Grouping, "by"),
        ("correlate budget and gross", IntentKind::Correlation, "correlate"),
        ("sales at least 200", IntentKind::FilterLimit, "at least"),
        ("sales over time", IntentKind::Temporal, "over time"),
        ("covid cases in Canada", IntentKind::Geospatial, "in"),
        ("top 5 teams by wins", IntentKind::FilterLimit, "top"),
    ];
    for (q, kind, op) in cases {
        let parsed = engine().parse(q);
        assert!(
            parsed.intents.iter().any(|i| i.kind == kind && i.operator.as_deref() == Some(op)),
            "{q}: {:?}",
            parsed.intents
        );
    }
}

#[test]
fn unanswerable_source_gets_suggestions() {
    let mut req = SearchRequest::new("elections");
    req.source = Some("sales".into());
    let qa = engine().search(&req).unwrap().qa.unwrap();
    assert!(qa.chart_spec.is_none());
    assert_eq!(qa.suggestions.as_deref(), Some(&["sum of Sales by Region".to_string()][..]));
    req.source = Some("nope".into());
    assert!(engine().search(&req).is_err());
}

fn fixture() -> DataSource {
    let r = Resources::bundled();
    let csv = "Region,Category,State,Date,Sales,Profit\n\
               East,A,Texas,2020-01-05,10,1\n\
               West,B,Ohio,2020-06-05,20,3\n\
               East,B,Texas,2021-01-05,30,2\n\
               West,A,Utah,2022-03-01,40,5\n";
    let meta = r#"{"name":"Fixture","attributes":[{"name":"Date","dataType":"temporal","role":"dimension"},{"name":"State","dataType":"geospatial","role":"dimension"}]}"#;
    build_data_source("fixture.csv", "fixture".into(), csv.as_bytes(), Some(serde_json::from_str(meta).unwrap()), &r.gazetteer)
        .unwrap()
}

fn sum(attr: &str) -> MeasureRef {
    MeasureRef { attribute: attr.into(), aggregate: Aggregate::Sum }
}

fn encode(spec: AnalyticalSpec) -> Result<Mark, QaError> {
    let ds = fixture();
    let spec = AnalyticalSpec { source_id: ds.id.clone(), ..spec };
    let table = execute_spec(&spec, &ds)?;
    choose_encoding(&spec, table).map(|c| c.mark)
}

#[test]
fn encoding_decision_table() {
    let bar = AnalyticalSpec { group_bys: vec!["Region".into()], measures: vec![sum("Sales")], ..Default::default() };
    assert_eq!(encode(bar).unwrap(), Mark::Bar);
    let stacked = AnalyticalSpec {
        group_bys: vec!["Region".into(), "Category".into()],
        measures: vec![sum("Sales")],
        ..Default::default()
    };
    assert_eq!(encode(stacked).unwrap(), Mark::Bar);
    let line = AnalyticalSpec { temporal_axis: Some("Date".into()), measures: vec![sum("Sales")], ..Default::default() };
    assert_eq!(encode(line).unwrap(), Mark::Line);
    let point = AnalyticalSpec { correlation_pair: Some(("Sales".into(), "Profit".into())), ..Default::default() };
    assert_eq!(encode(point).unwrap(), Mark::Point);
    let two = AnalyticalSpec { group_bys: vec!["Region".into()], measures: vec![sum("Sales"), sum("Profit")], ..Default::default() };
    assert_eq!(encode(two).unwrap(), Mark::Point);
    let map = AnalyticalSpec { geo_axis: Some("State".into()), measures: vec![sum("Sales")], ..Default::default() };
    assert_eq!(encode(map).unwrap(), Mark::Geoshape);
}

#[test]
fn fourth_channel_is_rejected() {
    let four = [
        AnalyticalSpec {
            group_bys: vec!["Region".into(), "Category".into()],
            temporal_axis: Some("Date".into()),
            measures: vec![sum("Sales")],
            ..Default::default()
        },
        AnalyticalSpec {
            group_bys: vec!["Region".into(), "Category".into()],
            measures: vec![sum("Sales"), sum("Profit")],
            ..Default::default()
        },
        AnalyticalSpec {
            group_bys: vec!["Region".into(), "Category".into()],
            correlation_pair: Some(("Sales".into(), "Profit".into())),
            ..Default::default()
        },
    ];
    for spec in four {
        assert!(matches!(encode(spec.clone()), Err(QaError::Encoding(_))), "{spec:?}");
    }
}

struct Stub(String);

impl TextGenerator for Stub {
    fn generate(&self, _: &str) -> Result<String, GenerationError> {
        Ok(self.0.clone())
    }
}

fn sales_stats() -> KeyStats {
    engine().search(&SearchRequest::new("sales by region")).unwrap().qa.unwrap().key_stats.unwrap()
}

proptest! {
    #[test]
    fn foreign_numbers_trigger_fallback(n in 0u32..1_000_000, cents in 0u32..100) {
        let stats = sales_stats();
        let foreign = f64::from(n) + f64::from(cents) / 100.0;
        let allowed: Vec<f64> = numbers_in(&stats.text()).into_iter().chain(stats.stats.values().copied()).collect();
        prop_assume!(allowed.iter().all(|a| (a - foreign).abs() > 1e-6));
        let stub = Stub(format!("Sales across regions peaked at ${n}.{cents:02} overall."));
        let out = rephrase_summary(&stats, Some(&stub));
        prop_assert!(!out.rephrased);
        prop_assert_eq!(out.text, stats.text());
        prop_assert!(out.warning.is_some());
    }
}

#[test]
fn engine_uses_generator_and_guard() {
    let (r, sources, _) = corpus();
    let sales: Vec<DataSource> = sources.into_iter().filter(|s| s.id == "sales").collect();
    let build = |reply: &str| {
        Engine::build(r.clone(), sales.clone(), Vec::new(), EngineSettings::default())
            .unwrap()
            .with_generator(Arc::new(Stub(reply.into())))
    };
    let good = "Sales range from $220 in Central to $240 in South, averaging $230.";
    let qa = build(good).search(&SearchRequest::new("sales by region")).unwrap().qa.unwrap();
    assert_eq!(qa.summary_text.as_deref(), Some(good));
    assert!(qa.summary.unwrap().rephrased);

    let qa = build("Sales reached $999.").search(&SearchRequest::new("sales by region")).unwrap().qa.unwrap();
    assert!(qa.summary_text.unwrap().contains("$230"));

    let mut req = SearchRequest::new("sales by region");
    req.no_generation = true;
    let qa = build(good).search(&req).unwrap().qa.unwrap();
    assert!(!qa.summary.unwrap().rephrased);
}
