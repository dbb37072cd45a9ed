//! One check per acceptance criterion, each printing a PASS or FAIL line.
//! Run with `cargo test -p chartseek-service --test acceptance -- --nocapture`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use chartseek_core::corpus::{build_data_source, Aggregate, VizDocument};
use chartseek_core::index::{Analyzer, Bm25Params, IndexInput, RankedResults, SearchIndex};
use chartseek_core::parser::IntentKind;
use chartseek_core::qa::{
    choose_encoding, execute_spec, numbers_in, rephrase_summary, AnalyticalSpec, GenerationError, Mark, MeasureRef,
    QaError, TextGenerator,
};
use chartseek_core::vizsearch::{apply_facets, compute_facets, DateRange, FacetState};
use chartseek_core::{Engine, Resources, SearchRequest};
use chartseek_service::bench::{self, BENCH_QUERIES};
use chartseek_service::config::Config;
use chartseek_service::http::{cors_layer, router};
use chartseek_service::persist::build_engine;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn engine() -> Arc<Engine> {
    static ENGINE: OnceLock<Arc<Engine>> = OnceLock::new();
    ENGINE
        .get_or_init(|| {
            let mut c = Config::default();
            c.resolve_paths(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../.."));
            Arc::new(build_engine(&c).unwrap())
        })
        .clone()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const VOCAB: [&str; 30] = [
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel", "india", "juliet", "kilo",
    "lima", "mike", "november", "oscar", "papa", "quebec", "romeo", "sierra", "tango", "uniform", "victor",
    "whiskey", "xray", "yankee", "zulu", "apple", "banana", "cherry", "grape",
];

fn ngrams(words: &[&str]) -> BTreeMap<String, u32> {
    let mut out = BTreeMap::new();
    for n in 1..=3 {
        for w in words.windows(n) {
            *out.entry(w.join(" ")).or_insert(0) += 1;
        }
    }
    out
}

/// Every document scored by the written-out formula, then sorted by score
/// with ties by id.
fn brute_force(docs: &[Vec<&str>], query: &[&str], k1: f64, b: f64) -> Vec<String> {
    let n = docs.len() as f64;
    let toks: Vec<_> = docs.iter().map(|d| ngrams(d)).collect();
    let avgdl = docs.iter().map(|d| d.len() as f64).sum::<f64>() / n;
    let q: BTreeSet<String> = ngrams(query).into_keys().collect();
    let mut scored: Vec<(String, f64)> = Vec::new();
    for (i, t) in toks.iter().enumerate() {
        if !q.iter().any(|x| t.contains_key(x)) {
            continue;
        }
        let len = docs[i].len() as f64;
        let mut s = 0.0;
        for x in &q {
            let df = toks.iter().filter(|d| d.contains_key(x)).count() as f64;
            if df == 0.0 {
                continue;
            }
            let f = *t.get(x).unwrap_or(&0) as f64;
            s += (1.0 + (n - df + 0.5) / (df + 0.5)).ln() * f * (k1 + 1.0) / (f + k1 * (1.0 - b + b * len / avgdl));
        }
        scored.push((format!("d{i:02}"), s));
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.into_iter().map(|s| s.0).collect()
}

fn bm25_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let params = Bm25Params::default();
    let start = Instant::now();
    let mut checked = 0;
    for corpus in 0..200 {
        let n_docs = rng.gen_range(1..=50);
        let docs: Vec<Vec<&str>> = (0..n_docs)
            .map(|_| (0..rng.gen_range(1..12)).map(|_| *VOCAB.choose(&mut rng).unwrap()).collect())
            .collect();
        let inputs = docs.iter().enumerate().map(|(i, d)| IndexInput::new(format!("d{i:02}"), d.join(" "))).collect();
        let index = SearchIndex::build(inputs, Analyzer::default(), params).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let q: Vec<&str> = (0..rng.gen_range(1..4)).map(|_| *VOCAB.choose(&mut rng).unwrap()).collect();
            let tokens = index.analyzer().encode(&q.join(" "));
            let ranked = index.rank(&tokens, &index.retrieve(&tokens, n_docs).map_err(|e| e.to_string())?);
            let got: Vec<String> = ranked.ids().map(str::to_string).collect();
            ensure(got == brute_force(&docs, &q, params.k1, params.b), || {
                format!("corpus {corpus}, query {q:?}: order differs")
            })?;
            checked += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{checked} queries over 200 corpora match in {secs:.2} s"))
}

fn hand_score() -> Outcome {
    let index = SearchIndex::build(
        vec![IndexInput::new("d1", "sales region"), IndexInput::new("d2", "profit")],
        Analyzer::default(),
        Bm25Params::new(1.2, 0.75).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let score = index.bm25_score(&index.analyzer().encode("sales"), "d1").map_err(|e| e.to_string())?;
    let expected = 2f64.ln() * 0.88;
    ensure((score - expected).abs() < 1e-9, || format!("score {score} vs {expected}"))?;
    Ok(format!("BM25(sales, d1) = {score:.10}"))
}

const TREND_QUERY: &str = "How has the trend of movie budgets changed over time for different genres?";

fn routing() -> Outcome {
    let suite: [(&str, Option<&str>); 12] = [
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
    let e = engine();
    for (q, expected) in suite {
        let r = e.search(&SearchRequest::new(q)).map_err(|e| e.to_string())?;
        ensure(r.plan.thresholds.field_match == 2 && r.plan.thresholds.norm_match == 0.3, || "thresholds".into())?;
        let got = r.qa.as_ref().filter(|a| a.chart_spec.is_some()).map(|a| a.source_id.as_str());
        ensure(got == expected && r.plan.invoke_qa == expected.is_some(), || {
            format!("{q:?} routed to {got:?}, expected {expected:?}")
        })?;
        ensure(!r.general.results.is_empty(), || format!("{q:?} has no general results"))?;
    }
    let treemap = e.search(&SearchRequest::new("treemap stocks")).map_err(|e| e.to_string())?;
    ensure(treemap.general.results[0].doc.chart_types.iter().any(|t| t == "treemap"), || "treemap not first".into())?;
    Ok("12 queries routed as labelled".into())
}

fn key_stats() -> Outcome {
    let r = engine().search(&SearchRequest::new("sales by region")).map_err(|e| e.to_string())?;
    let lines = r.qa.and_then(|a| a.key_stats).map(|k| k.lines).unwrap_or_default();
    let expected = [
        "Region: Central has a minimum value of $220 for Sales",
        "Region: South has the maximum value of $240 for Sales",
        "Average Sales across Region is: $230",
    ];
    ensure(lines == expected, || format!("got {lines:?}"))?;
    Ok("three sentences reproduced verbatim".into())
}

fn intents() -> Outcome {
    let cases = [
        ("average sales", IntentKind::Aggregation, "average"),
        ("sales by region", IntentKind::Grouping, "by"),
        ("correlate budget and gross", IntentKind::Correlation, "correlate"),
        ("sales at least 200", IntentKind::FilterLimit, "at least"),
        ("sales over time", IntentKind::Temporal, "over time"),
        ("covid cases in Canada", IntentKind::Geospatial, "in"),
        ("top 5 teams by wins", IntentKind::FilterLimit, "top"),
    ];
    let e = engine();
    for (q, kind, op) in cases {
        let parsed = e.parse(q);
        ensure(parsed.intents.iter().any(|i| i.kind == kind && i.operator.as_deref() == Some(op)), || {
            format!("{q:?} gave {:?}", parsed.intents.iter().map(|i| i.kind).collect::<Vec<_>>())
        })?;
    }
    Ok(format!("{}/{} exemplars", cases.len(), cases.len()))
}

fn encoding_rules() -> Outcome {
    let r = Resources::bundled();
    let csv = "Region,Category,State,Date,Sales,Profit\nEast,A,Texas,2020-01-05,10,1\nWest,B,Ohio,2021-06-05,20,3\nEast,B,Utah,2022-01-05,30,2\n";
    let meta = r#"{"name":"F","attributes":[{"name":"Date","dataType":"temporal","role":"dimension"},{"name":"State","dataType":"geospatial","role":"dimension"}]}"#;
    let ds = build_data_source("f.csv", "f".into(), csv.as_bytes(), Some(serde_json::from_str(meta).unwrap()), &r.gazetteer)
        .map_err(|e| e.to_string())?;
    let sum = |a: &str| MeasureRef { attribute: a.into(), aggregate: Aggregate::Sum };
    let encode = |spec: AnalyticalSpec| -> Result<Mark, QaError> {
        let spec = AnalyticalSpec { source_id: "f".into(), ..spec };
        choose_encoding(&spec, execute_spec(&spec, &ds)?).map(|c| c.mark)
    };
    let reachable = [
        AnalyticalSpec { group_bys: vec!["Region".into()], measures: vec![sum("Sales")], ..Default::default() },
        AnalyticalSpec { temporal_axis: Some("Date".into()), measures: vec![sum("Sales")], ..Default::default() },
        AnalyticalSpec { correlation_pair: Some(("Sales".into(), "Profit".into())), ..Default::default() },
        AnalyticalSpec { geo_axis: Some("State".into()), measures: vec![sum("Sales")], ..Default::default() },
    ];
    let marks: BTreeSet<String> =
        reachable.into_iter().map(|s| encode(s).map(|m| format!("{m:?}"))).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    ensure(marks.len() == Mark::ALL.len(), || format!("reached {marks:?}"))?;
    let four = AnalyticalSpec {
        group_bys: vec!["Region".into(), "Category".into()],
        temporal_axis: Some("Date".into()),
        measures: vec![sum("Sales")],
        ..Default::default()
    };
    ensure(matches!(encode(four), Err(QaError::Encoding(_))), || "four-channel spec accepted".into())?;
    Ok(format!("reached {marks:?}; four-channel spec rejected"))
}

fn facets() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let authors = ["Ana", "Bo", "Cy", "Di"];
    let types = ["bar", "line", "map", "treemap", "scatterplot"];
    for case in 0..1000 {
        let n = rng.gen_range(0..40);
        let docs: Vec<VizDocument> = (0..n)
            .map(|i| {
                let t: Vec<&str> = (0..rng.gen_range(0..3)).map(|_| *types.choose(&mut rng).unwrap()).collect();
                serde_json::from_value(serde_json::json!({
                    "id": format!("v{i:03}"),
                    "title": "t",
                    "authorName": authors.choose(&mut rng).unwrap(),
                    "createdDate": format!("20{:02}-{:02}-15", rng.gen_range(15..24), rng.gen_range(1..13)),
                    "chartTypes": t,
                }))
                .unwrap()
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let results = RankedResults::from_scores(order.iter().map(|&i| (docs[i].id.clone(), rng.gen_range(0.0..5.0))).collect());
        let pick = |rng: &mut StdRng, pool: &[&str]| -> BTreeSet<String> {
            (0..rng.gen_range(0..3)).map(|_| pool.choose(rng).unwrap().to_string()).collect()
        };
        let (y1, y2) = (rng.gen_range(2014..2025), rng.gen_range(2014..2025));
        let from = rng.gen_bool(0.5).then(|| y1.min(y2).to_string());
        let to = rng.gen_bool(0.5).then(|| y1.max(y2).to_string());
        let state = FacetState {
            selected_authors: pick(&mut rng, &authors),
            selected_chart_types: pick(&mut rng, &types),
            date_range: DateRange::parse(from.as_deref(), to.as_deref())?,
        };
        let lookup = |id: &str| docs.iter().find(|d| d.id == id);
        let once = apply_facets(&results, lookup, &state);
        ensure(apply_facets(&once, lookup, &state) == once, || format!("case {case}: not idempotent"))?;
        let mut it = results.entries.iter();
        ensure(once.entries.iter().all(|e| it.any(|x| x == e)), || format!("case {case}: order changed"))?;
        let summary = compute_facets(once.ids().filter_map(lookup));
        let total = once.len();
        ensure(
            summary.author_counts.values().sum::<usize>() == total
                && summary.date_histogram.values().sum::<usize>() == total
                && summary.chart_type_counts.values().all(|&c| c <= total),
            || format!("case {case}: counts do not sum to {total}"),
        )?;
    }
    Ok("1000 cases idempotent, order-preserving, counts consistent".into())
}

fn latency() -> Outcome {
    let e = engine();
    ensure(e.sources().len() == 8 && e.viz_docs().len() == 1000, || "corpus is not desk scale".into())?;
    let app = router(e, cors_layer(&[]));
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(|e| e.to_string())?;
    // warm-up pass
    rt.block_on(bench::run(&app, BENCH_QUERIES, 1));
    let report = rt.block_on(bench::run(&app, BENCH_QUERIES, 20));
    ensure(report.p95_ms < 100.0, || format!("p95 {:.2} ms", report.p95_ms))?;
    Ok(format!("p95 {:.2} ms over {} requests", report.p95_ms, report.requests))
}

struct Stub(String);

impl TextGenerator for Stub {
    fn generate(&self, _: &str) -> Result<String, GenerationError> {
        Ok(self.0.clone())
    }
}

fn hallucination_guard() -> Outcome {
    let r = engine().search(&SearchRequest::new("sales by region")).map_err(|e| e.to_string())?;
    let stats = r.qa.and_then(|a| a.key_stats).ok_or("no key statistics")?;
    let known: Vec<f64> = numbers_in(&stats.text()).into_iter().chain(stats.stats.values().copied()).collect();
    let mut rng = StdRng::seed_from_u64(3);
    let mut tried = 0;
    while tried < 500 {
        let n: f64 = (rng.gen_range(0.0..100_000.0f64) * 100.0).round() / 100.0;
        if known.iter().any(|k| (k - n).abs() < 1e-6) {
            continue;
        }
        let out = rephrase_summary(&stats, Some(&Stub(format!("Sales across regions average ${n}."))));
        ensure(!out.rephrased && out.text == stats.text() && out.warning.is_some(), || format!("{n} slipped through"))?;
        tried += 1;
    }
    Ok(format!("{tried} foreign numbers all fell back"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("BM25 oracle equivalence", bm25_oracle),
        ("hand-computed BM25 score", hand_score),
        ("routing suite", routing),
        ("keyStats reproduction", key_stats),
        ("intent suite", intents),
        ("encoding rules", encoding_rules),
        ("facet properties", facets),
        ("desk-scale latency", latency),
        ("hallucination guard", hallucination_guard),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                println!("FAIL  {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
