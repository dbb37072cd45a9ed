use std::sync::Arc;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use chartseek_core::classifier::Thresholds;
use chartseek_core::vizsearch::{DateRange, FacetState};
use chartseek_core::{Engine, EngineError, SearchRequest};
use serde::Serialize;
use serde_json::json;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};
use tower_http::trace::TraceLayer;

/// Machine-readable error body: `{"error": {"code", "message"}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self { status: StatusCode::BAD_REQUEST, code, message: message.into() }
    }

    pub fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        Self { status: StatusCode::NOT_FOUND, code, message: message.into() }
    }

    pub fn internal() -> Self {
        Self { status: StatusCode::INTERNAL_SERVER_ERROR, code: "internal_error", message: "internal server error".into() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self }))).into_response()
    }
}

fn split_list(values: &[&str]) -> std::collections::BTreeSet<String> {
    values
        .iter()
        .flat_map(|v| v.split(','))
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(str::to_string)
        .collect()
}

fn parse_flag(name: &str, v: &str) -> Result<bool, ApiError> {
    match v {
        "" | "1" | "true" => Ok(true),
        "0" | "false" => Ok(false),
        _ => Err(ApiError::bad_request("invalid_parameter", format!("{name} must be true or false"))),
    }
}

/// Turns query-string pairs into a search request.
///
/// `authors` and `chartTypes` accept comma-separated lists and may repeat;
/// `from`/`to` are ISO dates or months; `fieldMatch`/`normMatch` override
/// the routing thresholds in `base`. Unknown parameters are ignored.
pub fn parse_search_params(pairs: &[(String, String)], base: Thresholds) -> Result<SearchRequest, ApiError> {
    let all = |name: &str| -> Vec<&str> { pairs.iter().filter(|(k, _)| k == name).map(|(_, v)| v.as_str()).collect() };
    let one = |name: &str| -> Result<Option<&str>, ApiError> {
        match all(name).as_slice() {
            [] => Ok(None),
            [v] => Ok(Some(v)),
            _ => Err(ApiError::bad_request("duplicate_parameter", format!("{name} given more than once"))),
        }
    };
    let query = one("q")?.ok_or_else(|| ApiError::bad_request("missing_query", "the q parameter is required"))?;
    let date_range = DateRange::parse(one("from")?, one("to")?)
        .map_err(|e| ApiError::bad_request("invalid_date", e))?;
    let limit = one("limit")?
        .map(|v| v.parse::<usize>().map_err(|_| ApiError::bad_request("invalid_limit", format!("limit {v:?} is not a non-negative integer"))))
        .transpose()?;
    let source = one("source")?.filter(|s| !s.is_empty()).map(str::to_string);
    let no_generation = one("noLlm")?.map(|v| parse_flag("noLlm", v)).transpose()?.unwrap_or(false);

    let field_match = one("fieldMatch")?
        .map(|v| v.parse::<usize>().ok().filter(|n| *n >= 1).ok_or_else(|| ApiError::bad_request("invalid_threshold", "fieldMatch must be a positive integer")))
        .transpose()?;
    let norm_match = one("normMatch")?
        .map(|v| v.parse::<f64>().ok().filter(|x| (0.0..=1.0).contains(x)).ok_or_else(|| ApiError::bad_request("invalid_threshold", "normMatch must be within [0, 1]")))
        .transpose()?;
    let thresholds = (field_match.is_some() || norm_match.is_some()).then(|| Thresholds {
        field_match: field_match.unwrap_or(base.field_match),
        norm_match: norm_match.unwrap_or(base.norm_match),
    });

    Ok(SearchRequest {
        query: query.to_string(),
        facets: FacetState {
            selected_authors: split_list(&all("authors")),
            selected_chart_types: split_list(&all("chartTypes")),
            date_range,
        },
        limit,
        source,
        thresholds,
        no_generation,
    })
}

#[derive(Clone)]
struct AppState {
    engine: Arc<Engine>,
}

async fn search(
    State(state): State<AppState>,
    query: Result<Query<Vec<(String, String)>>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(pairs) = query.map_err(|e| ApiError::bad_request("malformed_query_string", e.body_text()))?;
    let req = parse_search_params(&pairs, state.engine.settings().thresholds)?;
    let engine = state.engine.clone();
    // the text generator blocks; keep it off the async workers
    let result = tokio::task::spawn_blocking(move || engine.search(&req)).await.map_err(|e| {
        tracing::error!(error = %e, "search task failed");
        ApiError::internal()
    })?;
    match result {
        Ok(r) => Ok(Json(r).into_response()),
        Err(EngineError::UnknownSource(id)) => {
            Err(ApiError::bad_request("unknown_source", format!("no data source with id {id:?}")))
        }
        Err(e) => {
            tracing::error!(error = %e, "search failed");
            Err(ApiError::internal())
        }
    }
}

async fn datasources(State(state): State<AppState>) -> Response {
    Json(state.engine.source_summaries()).into_response()
}

async fn datasource(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    state
        .engine
        .source_detail(&id)
        .map(|d| Json(d).into_response())
        .ok_or_else(|| ApiError::not_found("unknown_source", format!("no data source with id {id:?}")))
}

async fn healthz(State(state): State<AppState>) -> Response {
    Json(json!({
        "status": "ok",
        "sources": state.engine.sources().len(),
        "visualizations": state.engine.viz_docs().len(),
    }))
    .into_response()
}

async fn not_found() -> ApiError {
    ApiError::not_found("not_found", "no such endpoint")
}

/// CORS for the given origins; `*` or an empty list allows any origin.
pub fn cors_layer(origins: &[String]) -> CorsLayer {
    let layer = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    if origins.is_empty() || origins.iter().any(|o| o == "*") {
        return layer.allow_origin(Any);
    }
    let values: Vec<HeaderValue> = origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()).collect();
    layer.allow_origin(AllowOrigin::list(values))
}

pub fn router(engine: Arc<Engine>, cors: CorsLayer) -> Router {
    Router::new()
        .route("/api/search", get(search))
        .route("/api/datasources", get(datasources))
        .route("/api/datasources/{id}", get(datasource))
        .route("/healthz", get(healthz))
        .fallback(not_found)
        .layer(cors)
        .layer(TraceLayer::new_for_http())
        .with_state(AppState { engine })
}
