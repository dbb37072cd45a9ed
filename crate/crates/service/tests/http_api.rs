use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::{Arc, OnceLock};

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use chartseek_core::{Engine, SearchRequest};
use chartseek_service::bench::search_uri;
use chartseek_service::config::Config;
use chartseek_service::http::{cors_layer, router};
use chartseek_service::persist::build_engine;
use proptest::prelude::*;
use serde_json::Value;
use tower::ServiceExt;

fn config() -> Config {
    let mut c = Config::default();
    c.resolve_paths(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../.."));
    c
}

fn engine() -> Arc<Engine> {
    static ENGINE: OnceLock<Arc<Engine>> = OnceLock::new();
    ENGINE.get_or_init(|| Arc::new(build_engine(&config()).unwrap())).clone()
}

fn app() -> Router {
    router(engine(), cors_layer(&["http://ui.example".to_string()]))
}

async fn get(uri: &str) -> (StatusCode, Value) {
    let resp = app().oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap();
    let status = resp.status();
    assert_eq!(resp.headers()[header::CONTENT_TYPE], "application/json");
    let bytes = axum::body::to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn without_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[tokio::test]
async fn missing_query_is_a_400() {
    let (status, body) = get("/api/search").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "missing_query");
    let (status, body) = get("/api/search?q=sales&limit=many").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "invalid_limit");
    let (status, body) = get("/api/search?q=sales&source=nope").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "unknown_source");
}

#[tokio::test]
async fn housing_query_generates_a_map() {
    let (status, body) = get(&search_uri("housing prices usa")).await;
    assert_eq!(status, StatusCode::OK);
    let chart = &body["qa"]["chartSpec"];
    assert_eq!(chart["mark"], "geoshape");
    assert_eq!(chart["geometry"]["set"], "us-states");
    assert_eq!(chart["version"], 1);
    assert_eq!(chart["encodings"]["color"]["field"], "Price");
    assert!(body["plan"]["invokeQA"].as_bool().unwrap());
}

#[tokio::test]
async fn chart_type_facet_filters_results() {
    let (status, body) = get("/api/search?q=elections&chartTypes=map").await;
    assert_eq!(status, StatusCode::OK);
    assert!(body.get("qa").is_none());
    let results = body["general"]["results"].as_array().unwrap();
    assert!(!results.is_empty());
    for r in results {
        assert!(r["doc"]["chartTypes"].as_array().unwrap().iter().any(|t| t == "map"));
    }
}

#[tokio::test]
async fn search_matches_direct_engine_call() {
    for q in ["sales by region", "elections", "treemap stocks", ""] {
        let (_, body) = get(&search_uri(q)).await;
        // both sides through JSON text, so float parsing treats them alike
        let text = serde_json::to_string(&engine().search(&SearchRequest::new(q)).unwrap()).unwrap();
        let direct: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(without_timings(body), without_timings(direct), "{q}");
    }
}

#[tokio::test]
async fn datasource_endpoints() {
    let (status, list) = get("/api/datasources").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(list.as_array().unwrap().len(), 8);
    let (status, housing) = get("/api/datasources/housing").await;
    assert_eq!(status, StatusCode::OK);
    let attrs = housing["attributes"].as_array().unwrap();
    assert!(attrs.iter().any(|a| a["dataType"] == "geospatial"));
    assert!(attrs.iter().filter(|a| a["role"] == "dimension").all(|a| a["sampleValues"].as_array().unwrap().len() <= 5));
    assert!(!housing["suggestedQuery"].as_str().unwrap().is_empty());
    let (status, body) = get("/api/datasources/nope").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["code"], "unknown_source");
}

#[tokio::test]
async fn health_and_cors() {
    let req = Request::get("/healthz").header(header::ORIGIN, "http://ui.example").body(Body::empty()).unwrap();
    let resp = app().oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert_eq!(resp.headers()[header::ACCESS_CONTROL_ALLOW_ORIGIN], "http://ui.example");
    let (_, body) = get("/healthz").await;
    assert_eq!(body["status"], "ok");
    assert_eq!(body["visualizations"], 1000);
    let (status, _) = get("/api/nothing").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

fn facet_query() -> impl Strategy<Value = (String, Vec<String>, Option<(u32, u32)>, usize)> {
    let q = prop::sample::select(vec!["elections", "sales", "covid cases", "stocks", "movie budgets", "crime"]);
    let types = prop::collection::vec(prop::sample::select(vec!["bar", "line", "map", "treemap", "scatterplot"]), 0..3);
    let years = prop::option::of((2015u32..2024, 0u32..3));
    (q.prop_map(str::to_string), types.prop_map(|v| v.into_iter().map(str::to_string).collect()), years, 1usize..80)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn facet_invariants_over_http((q, types, years, limit) in facet_query()) {
        let rt = tokio::runtime::Builder::new_current_thread().enable_all().build().unwrap();
        let mut uri = format!("{}&limit={limit}", search_uri(&q));
        if !types.is_empty() {
            uri.push_str(&format!("&chartTypes={}", types.join(",")));
        }
        if let Some((from, span)) = years {
            uri.push_str(&format!("&from={from}&to={}", from + span));
        }
        let (status, body) = rt.block_on(get(&uri));
        prop_assert_eq!(status, StatusCode::OK);
        let (_, unfiltered) = rt.block_on(get(&format!("{}&limit=100000", search_uri(&q))));

        let ids = |v: &Value| -> Vec<String> {
            v["general"]["results"].as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap().to_string()).collect()
        };
        let got = ids(&body);
        let all = ids(&unfiltered);
        let total = body["general"]["total"].as_u64().unwrap() as usize;
        prop_assert_eq!(got.len(), total.min(limit));
        // filtered results keep the unfiltered order
        let mut it = all.iter();
        for id in &got {
            prop_assert!(it.any(|x| x == id));
        }
        let selected: BTreeSet<&str> = types.iter().map(String::as_str).collect();
        for r in body["general"]["results"].as_array().unwrap() {
            let doc_types: Vec<&str> = r["doc"]["chartTypes"].as_array().unwrap().iter().map(|t| t.as_str().unwrap()).collect();
            prop_assert!(selected.is_empty() || doc_types.iter().any(|t| selected.contains(t)));
        }
        let facets = &body["general"]["facets"];
        let sum = |key: &str| facets[key].as_object().unwrap().values().map(|v| v.as_u64().unwrap() as usize).sum::<usize>();
        prop_assert_eq!(sum("authorCounts"), total);
        prop_assert_eq!(sum("dateHistogram"), total);
    }
}
