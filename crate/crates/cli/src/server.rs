//! JSON-over-HTTP service: builders, solving and play sessions.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use robloc_core::game::TranscriptFile;
use robloc_core::graph::{Built, GraphJson};
use robloc_core::solver::{solve_with, Certificate, PolicyJson, SolveSummary};
use robloc_core::{Graph, GraphSpec, Parallelism, SolveBudget, Transcript, Verdict};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::Semaphore;

use crate::session::{Analysis, Mode, PlayError, ProbeOutcome, ProbePreview, Session, SessionView, VertexRef};

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub max_sessions: usize,
    pub idle_timeout: Duration,
    /// Graphs with more vertices are refused with 413.
    pub max_vertices: usize,
    /// Ceiling on any one solve; requests asking for more are clamped.
    pub solve_budget: SolveBudget,
    /// Budget for the solve run when a session opens.
    pub session_budget: SolveBudget,
    /// States all concurrent solves may hold between them.
    pub total_states: usize,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            max_sessions: 64,
            idle_timeout: Duration::from_secs(30 * 60),
            max_vertices: 256,
            solve_budget: SolveBudget::default(),
            session_budget: SolveBudget::default().with_states(1_000_000).with_seconds(10.0),
            total_states: 10_000_000,
        }
    }
}

pub struct AppState {
    config: ServerConfig,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
    /// One permit per state a running solve may intern.
    states: Semaphore,
}

pub type Shared = Arc<AppState>;

impl AppState {
    pub fn new(config: ServerConfig) -> Shared {
        let permits = config.total_states.min(Semaphore::MAX_PERMITS);
        Arc::new(AppState {
            config,
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
            states: Semaphore::new(permits),
        })
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let s = self
            .sessions
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session {id:?}")))?;
        s.lock().unwrap().last_used = Instant::now();
        Ok(s)
    }

    /// Solves `g` under `budget`, holding state permits for the duration.
    async fn solve(&self, g: Graph, budget: SolveBudget, par: Parallelism) -> Result<robloc_core::SolveResult, ApiError> {
        let permits = budget.max_states.min(self.config.total_states).max(1) as u32;
        let _guard = self
            .states
            .acquire_many(permits)
            .await
            .map_err(|_| ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "solver unavailable"))?;
        tokio::task::spawn_blocking(move || solve_with(&g, &budget, par))
            .await
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))
    }

    fn check_size(&self, g: &Graph) -> Result<(), ApiError> {
        if g.vertex_count() > self.config.max_vertices {
            return Err(ApiError::new(
                StatusCode::PAYLOAD_TOO_LARGE,
                format!(
                    "graph has {} vertices, the limit is {}",
                    g.vertex_count(),
                    self.config.max_vertices
                ),
            ));
        }
        Ok(())
    }

    fn clamp(&self, b: SolveBudget) -> SolveBudget {
        let cap = self.config.solve_budget;
        SolveBudget {
            max_states: b.max_states.min(cap.max_states),
            max_seconds: b.max_seconds.min(cap.max_seconds),
            max_rank: b.max_rank,
            max_bytes: b.max_bytes.min(cap.max_bytes),
        }
    }

    /// Drops idle sessions, then refuses if the table is still full.
    fn admit(&self, session: Session) -> Result<(), ApiError> {
        let mut table = self.sessions.lock().unwrap();
        let idle = self.config.idle_timeout;
        table.retain(|_, s| s.try_lock().map_or(true, |s| s.last_used.elapsed() < idle));
        if table.len() >= self.config.max_sessions {
            return Err(ApiError::new(
                StatusCode::SERVICE_UNAVAILABLE,
                format!("session limit {} reached", self.config.max_sessions),
            ));
        }
        table.insert(session.id.clone(), Arc::new(Mutex::new(session)));
        Ok(())
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> ApiError {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn unprocessable(message: impl ToString) -> ApiError {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, message.to_string())
    }
}

impl From<PlayError> for ApiError {
    fn from(e: PlayError) -> ApiError {
        let status = match e {
            PlayError::InvalidVertex(_) => StatusCode::UNPROCESSABLE_ENTITY,
            PlayError::OutOfTurn(_) => StatusCode::CONFLICT,
        };
        ApiError::new(status, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> ApiError {
        ApiError::new(e.status(), e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn build(spec: &str, m: Option<u32>) -> Result<Built, ApiError> {
    let spec = spec
        .parse::<GraphSpec>()
        .map_err(ApiError::unprocessable)?
        .with_m(m);
    spec.build().map_err(ApiError::unprocessable)
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/api/builders", get(builders))
        .route("/api/solve", post(solve))
        .route("/api/sessions", post(create_session).get(list_sessions))
        .route("/api/sessions/{id}", get(get_session).delete(delete_session))
        .route("/api/sessions/{id}/probe", post(probe))
        .route("/api/sessions/{id}/move", post(move_robber))
        .route("/api/sessions/{id}/preview", get(preview))
        .route("/api/sessions/{id}/transcript", get(transcript))
        .with_state(state)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Builder {
    pub family: &'static str,
    pub syntax: &'static str,
    pub example: &'static str,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuildersResponse {
    pub builders: Vec<Builder>,
    /// Suffix `^m` subdivides every edge into a path of length m.
    pub subdivision_suffix: &'static str,
    pub strategies: Vec<&'static str>,
}

pub fn builder_list() -> Vec<Builder> {
    let b = |family, syntax, example| Builder { family, syntax, example };
    vec![
        b("complete", "K:n", "K:5"),
        b("complete_bipartite", "Kab:a,b", "Kab:2,3"),
        b("cycle", "C:n", "C:6"),
        b("path", "P:n", "P:4"),
        b("h", "H", "H"),
        b("h_prime", "Hprime", "Hprime"),
        b("petersen", "Petersen", "Petersen"),
        b("heawood", "Heawood", "Heawood"),
        b("edge_list", "E:u-v,u-v,...", "E:0-1,1-2,2-0"),
    ]
}

async fn builders() -> Json<BuildersResponse> {
    Json(BuildersResponse {
        builders: builder_list(),
        subdivision_suffix: "^m",
        strategies: robloc_core::strategies::STRATEGY_IDS.to_vec(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveRequest {
    pub spec: String,
    #[serde(default)]
    pub m: Option<u32>,
    #[serde(default)]
    pub budget: Option<SolveBudget>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub include_policy: bool,
    #[serde(default)]
    pub include_certificate: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResponse {
    pub spec: String,
    pub vertices: usize,
    pub edges: usize,
    #[serde(flatten)]
    pub summary: SolveSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicyJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

async fn solve(
    State(app): State<Shared>,
    body: Result<Json<SolveRequest>, JsonRejection>,
) -> ApiResult<SolveResponse> {
    let Json(req) = body?;
    let built = build(&req.spec, req.m)?;
    app.check_size(&built.graph)?;
    let budget = app.clamp(req.budget.unwrap_or(app.config.solve_budget));
    let (vertices, edges) = (built.graph.vertex_count(), built.graph.edge_count());
    let r = app
        .solve(built.graph, budget, Parallelism::from_threads(req.threads))
        .await?;
    Ok(Json(SolveResponse {
        spec: built.spec.to_string(),
        vertices,
        edges,
        summary: r.summary(),
        policy: req
            .include_policy
            .then(|| r.policy.as_ref().map(|p| p.to_json()))
            .flatten(),
        certificate: req.include_certificate.then_some(r.certificate).flatten(),
    }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateSession {
    #[serde(default)]
    pub spec: Option<String>,
    #[serde(default)]
    pub m: Option<u32>,
    #[serde(default)]
    pub graph: Option<GraphJson>,
    pub mode: Mode,
    /// A transcript to resume from (human-cop mode); its graph is used when
    /// neither `spec` nor `graph` is given.
    #[serde(default)]
    pub transcript: Option<TranscriptFile>,
}

async fn create_session(
    State(app): State<Shared>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let Json(req) = body?;
    let id = format!("s{}", app.next_id.fetch_add(1, Ordering::Relaxed));
    let (built, graph) = match (&req.spec, req.graph.clone(), &req.transcript) {
        (Some(spec), _, _) => {
            let b = build(spec, req.m)?;
            let g = b.graph.clone();
            (Some(b), g)
        }
        (None, Some(gj), _) => (None, gj.into_graph().map_err(ApiError::unprocessable)?),
        (None, None, Some(t)) => (None, t.graph.build().map_err(ApiError::unprocessable)?),
        (None, None, None) => return Err(ApiError::unprocessable("one of spec, graph or transcript is required")),
    };
    app.check_size(&graph)?;
    let analysis: Analysis = app
        .solve(graph.clone(), app.config.session_budget, Parallelism::Auto)
        .await?
        .into();
    let mut session = match built {
        Some(b) => Session::new(id, b, req.mode, analysis),
        None => Session::from_graph(id, graph, req.mode, analysis),
    };
    if let Some(file) = &req.transcript {
        if req.mode != Mode::HumanCop {
            return Err(ApiError::unprocessable("transcripts resume human-cop sessions only"));
        }
        let (tg, t) = Transcript::from_file(file).map_err(ApiError::unprocessable)?;
        if !tg.same_as(&session.graph) {
            return Err(ApiError::unprocessable("transcript is for a different graph"));
        }
        let mut replayed = Transcript::starting_at(session.transcript.graph.clone(), t.start().clone());
        for r in t.rounds() {
            replayed
                .push(&session.graph, r.probe, r.answer)
                .map_err(ApiError::unprocessable)?;
        }
        if replayed.is_won() {
            session.status = crate::session::Status::CopWon;
        }
        session.transcript = replayed;
    }
    let view = session.view();
    app.admit(session)?;
    Ok((StatusCode::CREATED, Json(view)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionSummary {
    pub id: String,
    pub spec: Option<String>,
    pub mode: Mode,
    pub rounds: usize,
    pub verdict: Verdict,
}

async fn list_sessions(State(app): State<Shared>) -> Json<Vec<SessionSummary>> {
    let table = app.sessions.lock().unwrap();
    let mut out: Vec<SessionSummary> = table
        .values()
        .filter_map(|s| s.try_lock().ok().map(|s| SessionSummary {
            id: s.id.clone(),
            spec: s.spec.as_ref().map(ToString::to_string),
            mode: s.mode,
            rounds: s.transcript.len(),
            verdict: s.analysis.verdict,
        }))
        .collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Json(out)
}

async fn get_session(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<SessionView> {
    Ok(Json(app.session(&id)?.lock().unwrap().view()))
}

async fn delete_session(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<SessionView> {
    let s = app
        .sessions
        .lock()
        .unwrap()
        .remove(&id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session {id:?}")))?;
    let mut s = s.lock().unwrap();
    if s.status == crate::session::Status::InProgress {
        s.status = crate::session::Status::Aborted;
    }
    Ok(Json(s.view()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexBody {
    pub vertex: VertexRef,
}

async fn probe(
    State(app): State<Shared>,
    Path(id): Path<String>,
    body: Result<Json<VertexBody>, JsonRejection>,
) -> ApiResult<ProbeOutcome> {
    let s = app.session(&id)?;
    let Json(req) = body?;
    let out = s.lock().unwrap().probe(&req.vertex)?;
    Ok(Json(out))
}

async fn move_robber(
    State(app): State<Shared>,
    Path(id): Path<String>,
    body: Result<Json<VertexBody>, JsonRejection>,
) -> ApiResult<ProbeOutcome> {
    let s = app.session(&id)?;
    let Json(req) = body?;
    let out = s.lock().unwrap().move_robber(&req.vertex)?;
    Ok(Json(out))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PreviewResponse {
    pub candidates: Vec<u32>,
    pub probes: Vec<ProbePreview>,
}

async fn preview(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<PreviewResponse> {
    let s = app.session(&id)?;
    let s = s.lock().unwrap();
    Ok(Json(PreviewResponse {
        candidates: s.candidates().to_vec(),
        probes: s.preview(),
    }))
}

async fn transcript(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<TranscriptFile> {
    Ok(Json(app.session(&id)?.lock().unwrap().transcript.to_file()))
}

/// Binds `port` on all interfaces and serves until the process exits.
pub async fn serve(port: u16, config: ServerConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(config))).await
}
