use std::time::Instant;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use serde::Serialize;
use tower::ServiceExt;

/// Queries the benchmark cycles through: analytical questions for every
/// bundled source plus keyword and design queries.
pub const BENCH_QUERIES: &[&str] = &[
    "How has the trend of movie budgets changed over time for different genres?",
    "elections",
    "treemap stocks",
    "sales by region",
    "housing prices usa",
    "correlate budget and gross",
    "average price by home type",
    "covid cases in canada",
    "top 5 teams by wins",
    "coffee revenue by product",
    "incidents by crime over time",
    "profit by category in california",
    "crime in usa",
    "bar and line charts",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchReport {
    pub requests: usize,
    pub p50_ms: f64,
    pub p95_ms: f64,
    pub max_ms: f64,
    pub mean_ms: f64,
}

/// Nearest-rank percentile of sorted samples.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

pub fn search_uri(query: &str) -> String {
    let url = reqwest::Url::parse_with_params("http://localhost/api/search", &[("q", query)])
        .expect("static base URL parses");
    format!("{}?{}", url.path(), url.query().unwrap_or_default())
}

/// Sends every query `iterations` times through the HTTP router and
/// reports latency of whole request/response cycles, body included.
pub async fn run(router: &Router, queries: &[&str], iterations: usize) -> BenchReport {
    let mut samples = Vec::with_capacity(queries.len() * iterations);
    for _ in 0..iterations {
        for q in queries {
            let req = Request::get(search_uri(q)).body(Body::empty()).expect("request builds");
            let start = Instant::now();
            let resp = router.clone().oneshot(req).await.expect("router is infallible");
            let status = resp.status();
            let _ = axum::body::to_bytes(resp.into_body(), usize::MAX).await;
            samples.push(start.elapsed().as_secs_f64() * 1000.0);
            if status != StatusCode::OK {
                tracing::warn!(query = q, %status, "benchmark request failed");
            }
        }
    }
    samples.sort_by(f64::total_cmp);
    let mean = if samples.is_empty() { 0.0 } else { samples.iter().sum::<f64>() / samples.len() as f64 };
    BenchReport {
        requests: samples.len(),
        p50_ms: percentile(&samples, 50.0),
        p95_ms: percentile(&samples, 95.0),
        max_ms: samples.last().copied().unwrap_or(0.0),
        mean_ms: mean,
    }
}
