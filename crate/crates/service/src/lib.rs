//! HTTP JSON API over one index snapshot.
//!
//! Endpoints:
//!
//! - `GET /api/search?q=<text>&limit=<n>`
//! - `GET /api/params`, `PUT /api/params`
//! - `GET /api/stats`
//!
//! Requests see a single `(index, params)` snapshot. `PUT /api/params` builds
//! the replacement (rebuilding profiles when `k` or `lambda` change) and
//! swaps it in atomically.

use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::Instant;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use namefuzz_core::search::{ParamViolations, ResultRecord, SearchParams};
use namefuzz_core::{search, InvalidArgument, SearchIndex};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, CorsLayer};

pub const DEFAULT_PORT: u16 = 7700;
pub const MAX_QUERY_LEN: usize = 256;

#[derive(Debug)]
pub struct Snapshot {
    pub index: Arc<SearchIndex>,
    pub params: SearchParams,
}

#[derive(Debug)]
pub struct ServiceState {
    current: RwLock<Arc<Snapshot>>,
    // serializes PUT /api/params so concurrent updates don't drop each other
    writer: Mutex<()>,
    requests: AtomicU64,
}

impl ServiceState {
    pub fn new(index: SearchIndex, params: SearchParams) -> Result<Self, InvalidArgument> {
        params
            .validate()
            .map_err(|e| InvalidArgument::new(e.to_string()))?;
        if params.bigram_params() != index.params() {
            return Err(InvalidArgument::new(
                "search parameters k/lambda differ from the index",
            ));
        }
        Ok(Self {
            current: RwLock::new(Arc::new(Snapshot {
                index: Arc::new(index),
                params,
            })),
            writer: Mutex::new(()),
            requests: AtomicU64::new(0),
        })
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("snapshot lock poisoned").clone()
    }

    pub fn requests_served(&self) -> u64 {
        self.requests.load(Ordering::Relaxed)
    }

    /// Applies a partial update and installs the resulting snapshot.
    pub fn update_params(&self, patch: &ParamsPatch) -> Result<SearchParams, ParamViolations> {
        let _guard = self.writer.lock().expect("writer lock poisoned");
        let old = self.snapshot();
        let params = patch.apply(old.params);
        params.validate()?;
        let index = if params.bigram_params() == old.params.bigram_params() {
            old.index.clone()
        } else {
            let rebuilt = old
                .index
                .with_params(params.bigram_params())
                .map_err(|e| ParamViolations(vec![e.0]))?;
            Arc::new(rebuilt)
        };
        let next = Arc::new(Snapshot { index, params });
        *self.current.write().expect("snapshot lock poisoned") = next;
        Ok(params)
    }
}

/// Body of `PUT /api/params`; absent fields keep their current value.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsPatch {
    pub k: Option<u32>,
    pub lambda: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<usize>,
    pub min_fuzzy_len: Option<usize>,
    pub limit: Option<usize>,
}

impl ParamsPatch {
    fn apply(&self, base: SearchParams) -> SearchParams {
        SearchParams {
            k: self.k.unwrap_or(base.k),
            lambda: self.lambda.unwrap_or(base.lambda),
            t1: self.t1.unwrap_or(base.t1),
            t2: self.t2.unwrap_or(base.t2),
            min_fuzzy_len: self.min_fuzzy_len.unwrap_or(base.min_fuzzy_len),
            limit: self.limit.unwrap_or(base.limit),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SearchResponse {
    pub query: String,
    pub results: Vec<ResultRecord>,
    pub corpus_size: usize,
    pub latency_us: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StatsResponse {
    pub corpus_size: usize,
    pub k: u32,
    pub lambda: f64,
    pub total_bigrams: usize,
    pub requests_served: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

fn bad_request(error: impl Into<String>, violations: Vec<String>) -> Response {
    let body = ErrorBody {
        error: error.into(),
        violations,
    };
    (StatusCode::BAD_REQUEST, Json(body)).into_response()
}

#[derive(Debug, Deserialize)]
struct SearchQuery {
    q: Option<String>,
    limit: Option<usize>,
}

async fn search_handler(
    State(state): State<Arc<ServiceState>>,
    query: Result<Query<SearchQuery>, QueryRejection>,
) -> Response {
    let Query(query) = match query {
        Ok(q) => q,
        Err(e) => return bad_request(e.body_text(), Vec::new()),
    };
    let Some(q) = query.q else {
        return bad_request("missing query parameter q", Vec::new());
    };
    if q.chars().count() > MAX_QUERY_LEN {
        return bad_request(
            format!("query longer than {MAX_QUERY_LEN} characters"),
            Vec::new(),
        );
    }
    let snap = state.snapshot();
    let mut params = snap.params;
    if let Some(limit) = query.limit {
        params.limit = limit;
    }
    let start = Instant::now();
    let results = match search(&snap.index, &q, &params) {
        Ok(r) => r,
        Err(e) => return bad_request(e.to_string(), Vec::new()),
    };
    let latency_us = start.elapsed().as_micros() as u64;
    state.requests.fetch_add(1, Ordering::Relaxed);
    Json(SearchResponse {
        query: q,
        results: results.iter().map(ResultRecord::from).collect(),
        corpus_size: snap.index.len(),
        latency_us,
    })
    .into_response()
}

async fn get_params(State(state): State<Arc<ServiceState>>) -> Json<SearchParams> {
    Json(state.snapshot().params)
}

async fn put_params(
    State(state): State<Arc<ServiceState>>,
    body: Result<Json<ParamsPatch>, JsonRejection>,
) -> Response {
    let Json(patch) = match body {
        Ok(b) => b,
        Err(e) => return bad_request(e.body_text(), Vec::new()),
    };
    match state.update_params(&patch) {
        Ok(params) => Json(params).into_response(),
        Err(v) => bad_request("invalid parameters", v.0),
    }
}

async fn stats(State(state): State<Arc<ServiceState>>) -> Json<StatsResponse> {
    let snap = state.snapshot();
    Json(StatsResponse {
        corpus_size: snap.index.len(),
        k: snap.index.params().k,
        lambda: snap.index.params().lambda,
        total_bigrams: snap.index.total_bigrams(),
        requests_served: state.requests_served(),
    })
}

fn is_local_origin(origin: &HeaderValue) -> bool {
    let Ok(origin) = origin.to_str() else {
        return false;
    };
    let Some(rest) = origin
        .strip_prefix("http://")
        .or_else(|| origin.strip_prefix("https://"))
    else {
        return false;
    };
    let host = if rest.starts_with('[') {
        rest.split_inclusive(']').next().unwrap_or(rest)
    } else {
        rest.split(':').next().unwrap_or(rest)
    };
    matches!(host, "localhost" | "127.0.0.1" | "[::1]")
}

pub fn router(state: Arc<ServiceState>) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(AllowOrigin::predicate(|origin, _| is_local_origin(origin)))
        .allow_methods([Method::GET, Method::PUT])
        .allow_headers([header::CONTENT_TYPE]);
    Router::new()
        .route("/api/search", get(search_handler))
        .route("/api/params", get(get_params).put(put_params))
        .route("/api/stats", get(stats))
        .layer(cors)
        .with_state(state)
}

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        source: std::io::Error,
    },
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

pub async fn bind(addr: SocketAddr) -> Result<TcpListener, ServeError> {
    TcpListener::bind(addr)
        .await
        .map_err(|source| ServeError::Bind { addr, source })
}

/// Serves until the process is stopped.
pub async fn serve(listener: TcpListener, state: Arc<ServiceState>) -> Result<(), ServeError> {
    axum::serve(listener, router(state)).await?;
    Ok(())
}
