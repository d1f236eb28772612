use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = match body {
        Some(b) => req.body(Body::from(b.to_string())).unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn open(app: &Router, name: &str) -> String {
    let (status, v) = call(app, "POST", "/api/session", Some(json!({ "catalog": name }))).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    v["id"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn five_phi_steps_return_to_the_start() {
    let app = clustermod_tool::server::router();
    let id = open(&app, "a2").await;
    let (_, start) = call(&app, "GET", &format!("/api/session/{id}/state"), None).await;
    let mut last = Value::Null;
    for _ in 0..5 {
        let (s, _) = call(&app, "POST", &format!("/api/session/{id}/mutate"), Some(json!({ "vertex": "0" }))).await;
        assert_eq!(s, StatusCode::OK);
        let (s, v) = call(&app, "POST", &format!("/api/session/{id}/permute"), Some(json!({ "cycles": [["0", "1"]] }))).await;
        assert_eq!(s, StatusCode::OK);
        last = v;
    }
    assert_eq!(last["fingerprint"], start["fingerprint"]);
    assert_eq!(last["a"], start["a"]);
    assert_eq!(last["mapping_class"], true);
    assert_eq!(last["word"].as_str().unwrap().matches("mu 0").count(), 5);
}

#[tokio::test]
async fn one_phi_step_changes_coordinates_but_not_the_seed() {
    let app = clustermod_tool::server::router();
    let id = open(&app, "a2").await;
    let (_, start) = call(&app, "GET", &format!("/api/session/{id}/state"), None).await;
    call(&app, "POST", &format!("/api/session/{id}/mutate"), Some(json!({ "vertex": 0 }))).await;
    let (_, mid) = call(&app, "GET", &format!("/api/session/{id}/state"), None).await;
    assert_eq!(mid["mapping_class"], false);
    let (_, v) = call(&app, "POST", &format!("/api/session/{id}/permute"), Some(json!({ "cycles": [[0, 1]] }))).await;
    assert_eq!(v["mapping_class"], true);
    assert_eq!(v["normalized"], "mu 0; perm (0 1)");
    assert_ne!(v["fingerprint"], start["fingerprint"]);
    assert_eq!(v["seed"], start["seed"]);
}

#[tokio::test]
async fn frozen_vertex_is_rejected() {
    let app = clustermod_tool::server::router();
    let id = open(&app, "pentagon-disk").await;
    let (s, v) = call(&app, "POST", &format!("/api/session/{id}/mutate"), Some(json!({ "vertex": "3" }))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "FrozenVertex");
    let (s, v) = call(&app, "POST", &format!("/api/session/{id}/permute"), Some(json!({ "cycles": [["1", "3"]] }))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST, "{v}");
    let (_, st) = call(&app, "GET", &format!("/api/session/{id}/state"), None).await;
    assert_eq!(st["word"], "");
}

#[tokio::test]
async fn unknown_session_is_not_found() {
    let app = clustermod_tool::server::router();
    let (s, v) = call(&app, "GET", "/api/session/s999/state", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["error"], "UnknownSession");
    let (s, _) = call(&app, "POST", "/api/session/nope/undo", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn x7_phi1_classifies_reducible() {
    let app = clustermod_tool::server::router();
    let id = open(&app, "x7").await;
    call(&app, "POST", &format!("/api/session/{id}/mutate"), Some(json!({ "vertex": "1" }))).await;
    call(&app, "POST", &format!("/api/session/{id}/permute"), Some(json!({ "cycles": [["1", "2"]] }))).await;
    let (s, v) = call(&app, "POST", &format!("/api/session/{id}/classify"), None).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["verdict"]["type"], "cluster_reducible");
    assert_eq!(v["verdict"]["proper"], true);
}

#[tokio::test]
async fn classify_accepts_budgets() {
    let app = clustermod_tool::server::router();
    let id = open(&app, "a2").await;
    call(&app, "POST", &format!("/api/session/{id}/mutate"), Some(json!({ "vertex": "0" }))).await;
    call(&app, "POST", &format!("/api/session/{id}/permute"), Some(json!({ "cycles": [["0", "1"]] }))).await;
    let (_, v) = call(&app, "POST", &format!("/api/session/{id}/classify"), Some(json!({ "max_order": 10 }))).await;
    assert_eq!(v["verdict"]["type"], "periodic");
    assert_eq!(v["evidence"]["budgets"]["max_order"], 10);
}

#[tokio::test]
async fn undo_restores_the_previous_chart() {
    let app = clustermod_tool::server::router();
    let id = open(&app, "a2").await;
    let (_, start) = call(&app, "GET", &format!("/api/session/{id}/state"), None).await;
    call(&app, "POST", &format!("/api/session/{id}/mutate"), Some(json!({ "vertex": "1" }))).await;
    let (s, v) = call(&app, "POST", &format!("/api/session/{id}/undo"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["fingerprint"], start["fingerprint"]);
    assert_eq!(v["word"], "");
    let (s, v) = call(&app, "POST", &format!("/api/session/{id}/undo"), None).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "NothingToUndo");
}

#[tokio::test]
async fn orbit_needs_a_mapping_class_and_a_budget() {
    let app = clustermod_tool::server::router();
    let id = open(&app, "a2").await;
    call(&app, "POST", &format!("/api/session/{id}/mutate"), Some(json!({ "vertex": "0" }))).await;
    let (s, v) = call(&app, "GET", &format!("/api/session/{id}/orbit?flavor=x&steps=5"), None).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "NotMappingClass");
    call(&app, "POST", &format!("/api/session/{id}/permute"), Some(json!({ "cycles": [["0", "1"]] }))).await;
    let (s, v) = call(&app, "GET", &format!("/api/session/{id}/orbit?flavor=x&steps=5"), None).await;
    assert_eq!(s, StatusCode::OK);
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 6);
    // X-orbit (1,1) -> (2,1) -> ... returns after five steps.
    assert!((pts[1][0].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12);
    assert!(pts[5].as_array().unwrap().iter().all(|c| c.as_f64().unwrap().abs() < 1e-12));
    let (s, v) = call(&app, "GET", &format!("/api/session/{id}/orbit?flavor=trop&steps=3"), None).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    let (s, v) = call(&app, "GET", &format!("/api/session/{id}/orbit?steps=10001"), None).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(v["error"], "BudgetExceeded");
}

#[tokio::test]
async fn seed_documents_open_sessions() {
    let app = clustermod_tool::server::router();
    let doc = json!({ "vertices": ["a", "b"], "epsilon": [["0", "1"], ["-1", "0"]] });
    let (s, v) = call(&app, "POST", "/api/session", Some(doc)).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["quiver"]["arrows"][0]["from"], "a");
    let bad = json!({ "vertices": ["a", "b"], "epsilon": [["0", "1"], ["1", "0"]] });
    let (s, v) = call(&app, "POST", "/api/session", Some(bad)).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "ValidationError");
    let (s, v) = call(&app, "POST", "/api/session", Some(json!({ "catalog": "nope" }))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "UnknownName");
}

#[tokio::test]
async fn catalog_lists_names() {
    let app = clustermod_tool::server::router();
    let (s, v) = call(&app, "GET", "/api/catalog", None).await;
    assert_eq!(s, StatusCode::OK);
    assert!(v["names"].as_array().unwrap().iter().any(|n| n == "x7"));
}

#[tokio::test]
async fn sessions_get_distinct_ids() {
    let app = clustermod_tool::server::router();
    let a = open(&app, "a2").await;
    let b = open(&app, "a2").await;
    assert_ne!(a, b);
    call(&app, "POST", &format!("/api/session/{a}/mutate"), Some(json!({ "vertex": "0" }))).await;
    let (_, v) = call(&app, "GET", &format!("/api/session/{b}/state"), None).await;
    assert_eq!(v["word"], "");
}
