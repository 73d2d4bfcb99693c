use std::time::Duration;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use robloc::server::{router, AppState, ServerConfig};
use robloc_core::game::{expand, probe_partition, Transcript};
use robloc_core::{Graph, GraphSpec};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> Router {
    router(AppState::new(ServerConfig::default()))
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, v)
}

async fn open(app: &Router, spec: &str, mode: &str) -> Value {
    let (status, v) = call(app, Method::POST, "/api/sessions", Some(json!({"spec": spec, "mode": mode}))).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v
}

fn graph(spec: &str) -> Graph {
    spec.parse::<GraphSpec>().unwrap().build().unwrap().graph
}

fn ids(v: &Value) -> Vec<u32> {
    v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as u32).collect()
}

#[tokio::test]
async fn builders_are_listed() {
    let (status, v) = call(&app(), Method::GET, "/api/builders", None).await;
    assert_eq!(status, StatusCode::OK);
    let syntax: Vec<&str> = v["builders"].as_array().unwrap().iter().map(|b| b["syntax"].as_str().unwrap()).collect();
    assert!(syntax.contains(&"Kab:a,b"));
    assert!(v["strategies"].as_array().unwrap().contains(&json!("kn")));
}

#[tokio::test]
async fn solve_endpoint() {
    let app = app();
    let (status, v) = call(&app, Method::POST, "/api/solve", Some(json!({"spec": "H"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["verdict"], "CopWins");
    assert_eq!(v["vertices"], 11);
    let (_, v) = call(&app, Method::POST, "/api/solve", Some(json!({"spec": "K:6", "m": 3, "include_certificate": true}))).await;
    assert_eq!(v["verdict"], "RobberWins");
    assert!(!v["certificate"]["states"].as_array().unwrap().is_empty());
    let (_, v) = call(&app, Method::POST, "/api/solve", Some(json!({"spec": "K:6^5", "budget": {"max_states": 300}}))).await;
    assert_eq!(v["verdict"], "Unknown");
    let (status, _) = call(&app, Method::POST, "/api/solve", Some(json!({"spec": "nonsense"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = call(&app, Method::POST, "/api/solve", Some(json!({"spec": "P:400"}))).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
}

#[tokio::test]
async fn human_cop_on_h() {
    let app = app();
    let s = open(&app, "H", "human-cop").await;
    assert_eq!(s["verdict"], "CopWins");
    assert_eq!(s["candidates"].as_array().unwrap().len(), 11);
    let id = s["id"].as_str().unwrap();
    let g = graph("H");
    let before = g.full_set();
    let (status, v) = call(&app, Method::POST, &format!("/api/sessions/{id}/probe"), Some(json!({"vertex": "v6"}))).await;
    assert_eq!(status, StatusCode::OK);
    let answer = v["answer"].as_u64().unwrap() as u32;
    assert!(answer <= 5);
    let part = probe_partition(&g, &expand(&g, &before), 5);
    assert_eq!(ids(&v["candidates"]), part.class(answer).unwrap().to_vec());

    // follow the solver's own policy through the service until located
    let policy = robloc_core::solve(&g, &Default::default()).policy.unwrap();
    let mut state = part.class(answer).unwrap().clone();
    let mut won = v["won"].as_bool().unwrap();
    while !won {
        let p = policy.probe(&state).unwrap();
        let (_, v) = call(&app, Method::POST, &format!("/api/sessions/{id}/probe"), Some(json!({"vertex": p}))).await;
        let part = probe_partition(&g, &expand(&g, &state), p);
        let a = v["answer"].as_u64().unwrap() as u32;
        state = part.class(a).expect("answer is a partition key").clone();
        assert_eq!(ids(&v["candidates"]), state.to_vec());
        won = v["won"].as_bool().unwrap();
    }
    let (_, view) = call(&app, Method::GET, &format!("/api/sessions/{id}"), None).await;
    assert_eq!(view["status"], "cop-won");
    let (status, _) = call(&app, Method::POST, &format!("/api/sessions/{id}/probe"), Some(json!({"vertex": 0}))).await;
    assert_eq!(status, StatusCode::CONFLICT);

    // the exported transcript replays to the same state
    let (_, file) = call(&app, Method::GET, &format!("/api/sessions/{id}/transcript"), None).await;
    let (_, t) = Transcript::from_json(&file.to_string()).unwrap();
    assert_eq!(t.current().to_vec(), ids(&view["candidates"]));
    assert_eq!(t.len(), view["transcript"].as_array().unwrap().len());
}

#[tokio::test]
async fn six_cycle_never_ends() {
    let app = app();
    let s = open(&app, "C:6", "human-cop").await;
    assert_eq!(s["verdict"], "RobberWins");
    let id = s["id"].as_str().unwrap();
    for i in 0..30 {
        let (_, v) = call(&app, Method::POST, &format!("/api/sessions/{id}/probe"), Some(json!({"vertex": i % 6}))).await;
        assert_eq!(v["won"], false);
        assert!(v["candidates"].as_array().unwrap().len() >= 2);
    }
}

#[tokio::test]
async fn errors_map_to_status_codes() {
    let app = app();
    let (status, _) = call(&app, Method::GET, "/api/sessions/s999", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, Method::POST, "/api/sessions/s999/probe", Some(json!({"vertex": 0}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let s = open(&app, "H", "human-cop").await;
    let id = s["id"].as_str().unwrap();
    let (status, _) = call(&app, Method::POST, &format!("/api/sessions/{id}/probe"), Some(json!({"vertex": 11}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = call(&app, Method::POST, &format!("/api/sessions/{id}/probe"), Some(json!({"vertex": "v99"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = call(&app, Method::POST, &format!("/api/sessions/{id}/move"), Some(json!({"vertex": 0}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = call(&app, Method::POST, "/api/sessions", Some(json!({"spec": "P:300", "mode": "human-cop"}))).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
    let (status, _) = call(&app, Method::POST, "/api/sessions", Some(json!({"spec": "H", "mode": "spectator"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, v) = call(&app, Method::DELETE, &format!("/api/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["status"], "aborted");
    let (status, _) = call(&app, Method::GET, &format!("/api/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn singleton_probe_wins() {
    let app = app();
    let s = open(&app, "P:2", "human-cop").await;
    let id = s["id"].as_str().unwrap();
    let (_, v) = call(&app, Method::POST, &format!("/api/sessions/{id}/probe"), Some(json!({"vertex": 0}))).await;
    assert_eq!(v["won"], true);
    assert_eq!(v["candidates"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn human_robber_is_located_on_h() {
    let app = app();
    let s = open(&app, "H", "human-robber").await;
    assert_eq!(s["non_optimal"], false);
    let id = s["id"].as_str().unwrap();
    let g = graph("H");
    let bound = s["capture_bound"].as_u64().unwrap();
    let mut at = 3u32;
    let mut rounds = 0;
    loop {
        let (status, v) = call(&app, Method::POST, &format!("/api/sessions/{id}/move"), Some(json!({"vertex": at}))).await;
        assert_eq!(status, StatusCode::OK, "{v}");
        rounds += 1;
        let probe = v["probe"].as_u64().unwrap() as u32;
        assert_eq!(v["answer"].as_u64().unwrap() as u32, g.distance(probe, at));
        assert!(ids(&v["candidates"]).contains(&at));
        if v["won"] == true {
            break;
        }
        at = *g.neighbors(at).last().unwrap();
    }
    assert!(rounds <= bound);
    let (status, _) = call(&app, Method::POST, &format!("/api/sessions/{id}/probe"), Some(json!({"vertex": 0}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn human_robber_rules() {
    let app = app();
    let s = open(&app, "C:6", "human-robber").await;
    assert_eq!(s["non_optimal"], true);
    let id = s["id"].as_str().unwrap();
    let (_, v) = call(&app, Method::POST, &format!("/api/sessions/{id}/move"), Some(json!({"vertex": 1}))).await;
    assert_eq!(v["non_optimal"], true);
    assert_eq!(v["won"], false);
    let (status, _) = call(&app, Method::POST, &format!("/api/sessions/{id}/move"), Some(json!({"vertex": 4}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = call(&app, Method::POST, &format!("/api/sessions/{id}/move"), Some(json!({"vertex": 2}))).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn preview_sizes() {
    let app = app();
    let s = open(&app, "C:6", "human-cop").await;
    let id = s["id"].as_str().unwrap();
    let (_, v) = call(&app, Method::GET, &format!("/api/sessions/{id}/preview"), None).await;
    let mut sizes: Vec<u64> = v["probes"][0]["classes"].as_array().unwrap().iter().map(|c| c["size"].as_u64().unwrap()).collect();
    sizes.sort();
    assert_eq!(sizes, vec![1, 1, 2, 2]);

    let s = open(&app, "P:2", "human-cop").await;
    let id = s["id"].as_str().unwrap();
    call(&app, Method::POST, &format!("/api/sessions/{id}/probe"), Some(json!({"vertex": 0}))).await;
    let (_, v) = call(&app, Method::GET, &format!("/api/sessions/{id}/preview"), None).await;
    assert_eq!(v["candidates"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn transcripts_resume_sessions() {
    let app = app();
    let s = open(&app, "H", "human-cop").await;
    let id = s["id"].as_str().unwrap();
    for v in [5, 0, 8] {
        call(&app, Method::POST, &format!("/api/sessions/{id}/probe"), Some(json!({"vertex": v}))).await;
    }
    let (_, file) = call(&app, Method::GET, &format!("/api/sessions/{id}/transcript"), None).await;
    let (_, original) = call(&app, Method::GET, &format!("/api/sessions/{id}"), None).await;
    let (status, resumed) = call(&app, Method::POST, "/api/sessions", Some(json!({"mode": "human-cop", "transcript": file}))).await;
    assert_eq!(status, StatusCode::CREATED, "{resumed}");
    assert_eq!(resumed["candidates"], original["candidates"]);
    assert_eq!(resumed["transcript"], original["transcript"]);
}

#[tokio::test]
async fn session_cap_and_idle_eviction() {
    let config = ServerConfig {
        max_sessions: 2,
        idle_timeout: Duration::from_millis(50),
        ..ServerConfig::default()
    };
    let state = AppState::new(config);
    let app = router(state.clone());
    open(&app, "C:4", "human-cop").await;
    open(&app, "C:4", "human-cop").await;
    tokio::time::sleep(Duration::from_millis(80)).await;
    open(&app, "C:4", "human-cop").await;
    assert_eq!(state.session_count(), 1);

    let busy = router(AppState::new(ServerConfig { max_sessions: 1, ..ServerConfig::default() }));
    open(&busy, "C:4", "human-cop").await;
    let (status, _) = call(&busy, Method::POST, "/api/sessions", Some(json!({"spec": "C:4", "mode": "human-cop"}))).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
}
