//! HTTP session service. A session holds a starting chart and the steps the
//! user applied to it; every response describes the current chart.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use clustermod::catalog::{catalog, catalog_names};
use clustermod::classify::{classify, Budgets, NTReport};
use clustermod::doc::{emit_word, parse_seed, SeedDocument};
use clustermod::explorer::ChartState;
use clustermod::positive::{expected_len, orbit};
use clustermod::scalar::LogReal;
use clustermod::tropical::{apply_word_tropical, TropicalPoint};
use clustermod::{ClusterError, Flavor, MappingClassWord, PositivePoint, Seed, SeedIso, Step};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tokio::sync::{Mutex, RwLock};

use crate::view::{quiver, values, QuiverView};

/// Longest orbit served in one request.
pub const MAX_ORBIT_STEPS: usize = 10_000;

struct Session {
    initial: ChartState,
    current: ChartState,
    steps: Vec<Step>,
    texts: Vec<String>,
    history: Vec<ChartState>,
}

impl Session {
    fn new(seed: Seed) -> Self {
        let chart = ChartState::base(&seed);
        Session { initial: chart.clone(), current: chart, steps: Vec::new(), texts: Vec::new(), history: Vec::new() }
    }

    fn word(&self) -> Result<MappingClassWord, ClusterError> {
        MappingClassWord::from_steps(self.initial.seed.rank(), &self.steps)
    }

    fn push(&mut self, next: ChartState, step: Step, text: String) {
        self.history.push(std::mem::replace(&mut self.current, next));
        self.steps.push(step);
        self.texts.push(text);
    }
}

#[derive(Default)]
struct AppState {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
}

type Shared = Arc<AppState>;

/// Error body: `{"error": kind, "message": text}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: String,
    message: String,
}

impl ApiError {
    fn not_found(id: &str) -> Self {
        ApiError { status: StatusCode::NOT_FOUND, kind: "UnknownSession".into(), message: format!("no session {id:?}") }
    }

    fn bad_request(kind: &str, message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, kind: kind.into(), message: message.into() }
    }
}

impl From<ClusterError> for ApiError {
    fn from(e: ClusterError) -> Self {
        let status = match e {
            ClusterError::BudgetExceeded(_) => StatusCode::CONFLICT,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError { status, kind: e.kind().into(), message: e.to_string() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.kind, "message": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Serialize)]
pub struct StateView {
    pub id: String,
    pub seed: SeedDocument,
    pub quiver: QuiverView,
    /// Steps as the user applied them.
    pub word: String,
    /// The same word with permutations folded to the end.
    pub normalized: String,
    pub a: Vec<String>,
    pub x: Vec<String>,
    /// Digest of the labelled chart.
    pub fingerprint: String,
    /// Digest of the cluster up to relabelling.
    pub cluster: String,
    /// Whether the current seed equals the starting seed.
    pub mapping_class: bool,
}

fn state_view(id: &str, s: &Session) -> Result<StateView, ApiError> {
    let (a, x) = values(&s.current);
    Ok(StateView {
        id: id.to_string(),
        seed: SeedDocument::from_seed(&s.current.seed),
        quiver: quiver(&s.current.seed),
        word: s.texts.join("; "),
        normalized: emit_word(&s.word()?, &s.initial.seed),
        a,
        x,
        fingerprint: s.current.labeled_fingerprint().digest(),
        cluster: s.current.fingerprint().digest(),
        mapping_class: s.current.seed == s.initial.seed,
    })
}

async fn session(state: &Shared, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
    state.sessions.read().await.get(id).cloned().ok_or_else(|| ApiError::not_found(id))
}

async fn create(State(state): State<Shared>, body: Bytes) -> ApiResult<StateView> {
    let text = std::str::from_utf8(&body).map_err(|_| ApiError::bad_request("ParseError", "body is not UTF-8"))?;
    let value: Value = serde_json::from_str(text).map_err(|e| ClusterError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let seed = match value.get("catalog") {
        Some(Value::String(name)) => catalog(name)?.seed,
        Some(_) => return Err(ApiError::bad_request("ParseError", "catalog must be a name")),
        None => parse_seed(text)?,
    };
    let id = format!("s{}", state.next_id.fetch_add(1, Ordering::Relaxed) + 1);
    let s = Session::new(seed);
    let view = state_view(&id, &s)?;
    state.sessions.write().await.insert(id, Arc::new(Mutex::new(s)));
    Ok(Json(view))
}

async fn get_state(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<StateView> {
    let s = session(&state, &id).await?;
    let s = s.lock().await;
    Ok(Json(state_view(&id, &s)?))
}

/// Resolves a vertex given by label, or by index when no label matches.
fn vertex(seed: &Seed, v: &Value) -> Result<usize, ApiError> {
    let label = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(ApiError::bad_request("ParseError", "vertex must be a label")),
    };
    match seed.index_of(&label) {
        Ok(i) => Ok(i),
        Err(e) => match v.as_u64() {
            Some(i) if (i as usize) < seed.rank() => Ok(i as usize),
            _ => Err(e.into()),
        },
    }
}

#[derive(Deserialize)]
struct MutateBody {
    vertex: Value,
}

async fn mutate(State(state): State<Shared>, Path(id): Path<String>, Json(body): Json<MutateBody>) -> ApiResult<StateView> {
    let s = session(&state, &id).await?;
    let mut s = s.lock().await;
    let k = vertex(&s.current.seed, &body.vertex)?;
    let next = s.current.mutate(k)?;
    let text = format!("mu {}", s.current.seed.label(k));
    s.push(next, Step::Mu(k), text);
    Ok(Json(state_view(&id, &s)?))
}

#[derive(Deserialize)]
struct PermuteBody {
    cycles: Vec<Vec<Value>>,
}

async fn permute(State(state): State<Shared>, Path(id): Path<String>, Json(body): Json<PermuteBody>) -> ApiResult<StateView> {
    let s = session(&state, &id).await?;
    let mut s = s.lock().await;
    let seed = s.current.seed.clone();
    let cycles = body
        .cycles
        .iter()
        .map(|c| c.iter().map(|v| vertex(&seed, v)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let sigma = SeedIso::from_cycles(seed.rank(), &cycles)?;
    let next = s.current.relabel(&sigma)?;
    let text: String = cycles
        .iter()
        .map(|c| format!("({})", c.iter().map(|&v| seed.label(v)).collect::<Vec<_>>().join(" ")))
        .collect();
    s.push(next, Step::Perm(sigma), format!("perm {text}"));
    Ok(Json(state_view(&id, &s)?))
}

async fn undo(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<StateView> {
    let s = session(&state, &id).await?;
    let mut s = s.lock().await;
    let prev = s.history.pop().ok_or_else(|| ApiError::bad_request("NothingToUndo", "no steps to undo"))?;
    s.current = prev;
    s.steps.pop();
    s.texts.pop();
    Ok(Json(state_view(&id, &s)?))
}

async fn classify_session(State(state): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult<NTReport> {
    let budgets: Budgets = if body.iter().all(u8::is_ascii_whitespace) {
        Budgets::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request("ParseError", e.to_string()))?
    };
    let s = session(&state, &id).await?;
    let (seed, w) = {
        let s = s.lock().await;
        (s.initial.seed.clone(), s.word()?)
    };
    let report = tokio::task::spawn_blocking(move || classify(&seed, &w, &budgets))
        .await
        .map_err(|e| ApiError::bad_request("Internal", e.to_string()))??;
    Ok(Json(report))
}

#[derive(Deserialize)]
struct OrbitQuery {
    flavor: Option<String>,
    steps: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct OrbitView {
    pub flavor: String,
    /// Natural logarithms of the coordinates for `a` and `x`; the tropical
    /// coordinates themselves for `trop`.
    pub points: Vec<Vec<f64>>,
    pub max_abs_log: Vec<f64>,
}

/// Orbit of the session word from all ones (tropical: the first unit vector
/// in X-coordinates), computed in the log domain.
async fn orbit_session(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Query(q): Query<OrbitQuery>,
) -> ApiResult<OrbitView> {
    let steps = q.steps.unwrap_or(20);
    if steps > MAX_ORBIT_STEPS {
        return Err(ClusterError::BudgetExceeded(format!("at most {MAX_ORBIT_STEPS} orbit steps")).into());
    }
    let flavor = q.flavor.unwrap_or_else(|| "a".into());
    let s = session(&state, &id).await?;
    let (seed, w) = {
        let s = s.lock().await;
        (s.initial.seed.clone(), s.word()?)
    };
    if s.lock().await.current.seed != seed {
        return Err(ClusterError::NotMappingClass("the current seed differs from the starting seed".into()).into());
    }
    let view = tokio::task::spawn_blocking(move || -> Result<OrbitView, ApiError> {
        match flavor.as_str() {
            "a" | "x" => {
                let f = if flavor == "a" { Flavor::A } else { Flavor::X };
                let start = vec![LogReal(0.0); expected_len(&seed, f)];
                let o = orbit(&seed, &w, &PositivePoint { flavor: f, coords: start }, steps)?;
                Ok(OrbitView {
                    flavor,
                    points: o.points.iter().map(|p| p.coords.iter().map(|c| c.ln()).collect()).collect(),
                    max_abs_log: o.logs,
                })
            }
            "trop" => {
                let mut cur = vec![0.0; expected_len(&seed, Flavor::X)];
                cur[0] = 1.0;
                let mut cur = TropicalPoint { flavor: Flavor::X, coords: cur };
                let mut points = vec![cur.coords.clone()];
                for _ in 0..steps {
                    cur = apply_word_tropical(&seed, &w, &cur)?;
                    points.push(cur.coords.clone());
                }
                let max_abs_log = points.iter().map(|p| p.iter().fold(0.0f64, |m, c| m.max(c.abs()))).collect();
                Ok(OrbitView { flavor, points, max_abs_log })
            }
            other => Err(ApiError::bad_request("ParseError", format!("unknown flavor {other:?}"))),
        }
    })
    .await
    .map_err(|e| ApiError::bad_request("Internal", e.to_string()))??;
    Ok(Json(view))
}

async fn list_catalog() -> Json<Value> {
    Json(serde_json::json!({ "names": catalog_names() }))
}

pub fn router() -> Router {
    Router::new()
        .route("/api/catalog", get(list_catalog))
        .route("/api/session", post(create))
        .route("/api/session/{id}/state", get(get_state))
        .route("/api/session/{id}/mutate", post(mutate))
        .route("/api/session/{id}/permute", post(permute))
        .route("/api/session/{id}/undo", post(undo))
        .route("/api/session/{id}/classify", post(classify_session))
        .route("/api/session/{id}/orbit", get(orbit_session))
        .with_state(Arc::new(AppState::default()))
}

pub async fn serve(addr: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router()).await
}
