use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use http_body_util::BodyExt;
use namefuzz_core::search::{ResultRecord, SearchParams};
use namefuzz_core::{search, BigramParams, SearchIndex};
use namefuzz_service::{bind, router, SearchResponse, ServeError, ServiceState, StatsResponse};
use serde_json::Value;
use tower::ServiceExt;

const SAMPLE_NAMES: [&str; 3] = ["Mike Petterson", "Jennifer Mikoilan", "Mark"];

fn state_for(names: &[&str]) -> Arc<ServiceState> {
    let (idx, _) = SearchIndex::build(names, BigramParams::default()).unwrap();
    Arc::new(ServiceState::new(idx, SearchParams::default()).unwrap())
}

async fn call(state: &Arc<ServiceState>, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let resp = router(state.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let body = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    (status, body)
}

async fn get(state: &Arc<ServiceState>, uri: &str) -> (StatusCode, Value) {
    let (status, body) = call(state, Request::get(uri).body(Body::empty()).unwrap()).await;
    (status, serde_json::from_slice(&body).unwrap())
}

async fn put_params(state: &Arc<ServiceState>, json: &str) -> (StatusCode, Value) {
    let req = Request::put("/api/params")
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(json.to_owned()))
        .unwrap();
    let (status, body) = call(state, req).await;
    (status, serde_json::from_slice(&body).unwrap())
}

#[tokio::test]
async fn search_mik() {
    let state = state_for(&SAMPLE_NAMES);
    let (status, body) = get(&state, "/api/search?q=mik").await;
    assert_eq!(status, StatusCode::OK);
    let resp: SearchResponse = serde_json::from_value(body).unwrap();
    assert_eq!(resp.query, "mik");
    assert_eq!(resp.corpus_size, 3);
    let names: Vec<_> = resp.results.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(names, ["Mike Petterson", "Jennifer Mikoilan"]);
    assert_eq!(resp.results[0].span, Some([2, 4]));
}

#[tokio::test]
async fn results_match_library_serialization() {
    let state = state_for(&SAMPLE_NAMES);
    let (_, raw) = call(
        &state,
        Request::get("/api/search?q=Mik%20P")
            .body(Body::empty())
            .unwrap(),
    )
    .await;
    let raw = String::from_utf8(raw).unwrap();

    let snap = state.snapshot();
    let lib: Vec<ResultRecord> = search(&snap.index, "Mik P", &snap.params)
        .unwrap()
        .iter()
        .map(ResultRecord::from)
        .collect();
    let expected = format!("\"results\":{},", serde_json::to_string(&lib).unwrap());
    assert!(raw.contains(&expected), "{raw}");
}

#[tokio::test]
async fn search_errors_and_empty() {
    let state = state_for(&SAMPLE_NAMES);
    let (status, body) = get(&state, "/api/search?q=").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["results"], Value::Array(vec![]));

    let (status, body) = get(&state, "/api/search").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["error"].is_string());

    let long = "a".repeat(257);
    let (status, _) = get(&state, &format!("/api/search?q={long}")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let ok = "a".repeat(256);
    let (status, _) = get(&state, &format!("/api/search?q={ok}")).await;
    assert_eq!(status, StatusCode::OK);

    let (status, _) = get(&state, "/api/search?q=mik&limit=abc").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn limit_override() {
    let state = state_for(&SAMPLE_NAMES);
    let (_, body) = get(&state, "/api/search?q=mik&limit=1").await;
    assert_eq!(body["results"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn default_params() {
    let state = state_for(&SAMPLE_NAMES);
    let (status, body) = get(&state, "/api/params").await;
    assert_eq!(status, StatusCode::OK);
    let params: SearchParams = serde_json::from_value(body).unwrap();
    assert_eq!(params, SearchParams::default());
    assert_eq!(
        (params.t1, params.t2, params.lambda, params.k),
        (1.0, 1, 1.0, 1)
    );
}

#[tokio::test]
async fn raising_t2_does_not_bypass_bigram_gate() {
    let state = state_for(&["Mark"]);
    let (status, body) = put_params(&state, r#"{"t2": 2}"#).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["t2"], 2);
    let (_, body) = get(&state, "/api/search?q=mik").await;
    assert_eq!(body["results"], Value::Array(vec![]));

    // Opening the bigram gate lets Mark through at lld 2.
    put_params(&state, r#"{"t1": 3}"#).await;
    let (_, body) = get(&state, "/api/search?q=mik").await;
    assert_eq!(body["results"][0]["lld"], 2);
    assert_eq!(body["results"][0]["bd"], 3.0);
}

#[tokio::test]
async fn invalid_params_rejected() {
    let state = state_for(&SAMPLE_NAMES);
    let (status, body) = put_params(&state, r#"{"lambda": 0}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["violations"].as_array().unwrap().len(), 1);

    let (status, body) = put_params(&state, r#"{"lambda": 0, "min_fuzzy_len": 0}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["violations"].as_array().unwrap().len(), 2);

    let (status, _) = put_params(&state, r#"{"bogus": 1}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = put_params(&state, r#"{"t2": -1}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    assert_eq!(state.snapshot().params, SearchParams::default());
}

#[tokio::test]
async fn lambda_change_rebuilds_index() {
    let state = state_for(&SAMPLE_NAMES);
    let (status, _) = put_params(&state, r#"{"k": 2, "lambda": 0.5}"#).await;
    assert_eq!(status, StatusCode::OK);
    let snap = state.snapshot();
    assert_eq!(snap.index.params(), BigramParams::new(2, 0.5).unwrap());
    assert_eq!(snap.params.bigram_params(), snap.index.params());

    let (_, stats) = get(&state, "/api/stats").await;
    assert_eq!(stats["k"], 2);
    assert_eq!(stats["lambda"], 0.5);
    let (status, _) = get(&state, "/api/search?q=mik").await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn stats_count_searches() {
    let state = state_for(&SAMPLE_NAMES);
    let (_, body) = get(&state, "/api/stats").await;
    let stats: StatsResponse = serde_json::from_value(body).unwrap();
    assert_eq!((stats.corpus_size, stats.requests_served), (3, 0));
    let snap = state.snapshot();
    let expected: usize = snap.index.entries().map(|e| e.profile.len()).sum();
    assert_eq!(stats.total_bigrams, expected);

    get(&state, "/api/search?q=mik").await;
    let (_, body) = get(&state, "/api/stats").await;
    assert_eq!(body["requests_served"], 1);
}

#[tokio::test]
async fn cors_allows_localhost_only() {
    let state = state_for(&SAMPLE_NAMES);
    let req = |origin: &str| {
        Request::get("/api/stats")
            .header(header::ORIGIN, origin)
            .body(Body::empty())
            .unwrap()
    };
    let resp = router(state.clone())
        .oneshot(req("http://localhost:5173"))
        .await
        .unwrap();
    assert_eq!(
        resp.headers()[header::ACCESS_CONTROL_ALLOW_ORIGIN],
        "http://localhost:5173"
    );
    let resp = router(state)
        .oneshot(req("http://example.com"))
        .await
        .unwrap();
    assert!(resp
        .headers()
        .get(header::ACCESS_CONTROL_ALLOW_ORIGIN)
        .is_none());
}

#[tokio::test]
async fn occupied_port_is_a_bind_error() {
    let first = bind(SocketAddr::from(([127, 0, 0, 1], 0))).await.unwrap();
    let addr = first.local_addr().unwrap();
    assert!(matches!(bind(addr).await, Err(ServeError::Bind { .. })));
}

#[tokio::test]
async fn serves_over_tcp() {
    let listener = bind(SocketAddr::from(([127, 0, 0, 1], 0))).await.unwrap();
    let addr = listener.local_addr().unwrap();
    let state = state_for(&SAMPLE_NAMES);
    tokio::spawn(namefuzz_service::serve(listener, state));

    use tokio::io::{AsyncReadExt, AsyncWriteExt};
    let mut stream = tokio::net::TcpStream::connect(addr).await.unwrap();
    stream
        .write_all(
            b"GET /api/search?q=mik HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n",
        )
        .await
        .unwrap();
    let mut buf = String::new();
    stream.read_to_string(&mut buf).await.unwrap();
    assert!(buf.starts_with("HTTP/1.1 200"));
    assert!(buf.contains("Mike Petterson"));
}

#[test]
fn mismatched_startup_params_rejected() {
    let (idx, _) = SearchIndex::build(&SAMPLE_NAMES, BigramParams::default()).unwrap();
    let params = SearchParams {
        k: 2,
        ..Default::default()
    };
    assert!(ServiceState::new(idx, params).is_err());
}
