//! HTTP service for the design console.
//!
//! Sessions live in memory. Each one sits behind an async mutex that a
//! single driver task (or a manual tick) holds for the length of one tick;
//! read endpoints serve a cached snapshot and transcript refreshed after
//! every tick, so they never wait on an LLM call.

mod error;
mod events;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, RwLock};
use std::time::Duration;

use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::sse::{KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use loftgen_core::genloop::{
    CancelToken, DesignSession, IterationRecord, SessionConfig, SessionMode, SessionSnapshot, SessionState,
};
use loftgen_core::geom::{export_obj, LoftedMesh, Mesh};
use loftgen_core::llm::{ChatProvider, ProviderConfig, Transcript};
use loftgen_core::prompt::Catalog;
use loftgen_core::scene::{scene_to_mesh, RepairSession, RepairSnapshot, RepairState, SceneModel};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use tokio::sync::{Mutex, Notify};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

pub use error::{ApiError, FieldError};
pub use events::{EventLog, LoggedEvent};

type ApiResult<T> = Result<T, ApiError>;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub provider: ProviderConfig,
    /// Transcripts are written here as `<id>.jsonl` after every tick.
    pub data_dir: Option<PathBuf>,
    pub allow_origins: Vec<String>,
}

pub struct AppState {
    config: ServiceConfig,
    catalog: Catalog,
    sessions: RwLock<HashMap<String, Arc<SessionSlot>>>,
    repairs: RwLock<HashMap<String, Arc<RepairSlot>>>,
    next_id: AtomicU64,
}

struct Cached<S> {
    snapshot: S,
    transcript: String,
}

struct SessionSlot {
    session: Arc<Mutex<DesignSession>>,
    cached: RwLock<Cached<SessionSnapshot>>,
    events: Arc<EventLog>,
    cancel: CancelToken,
    wake: Notify,
    driving: AtomicBool,
}

struct RepairSlot {
    session: Arc<Mutex<RepairSession>>,
    cached: RwLock<Cached<RepairSnapshot>>,
    error: RwLock<Option<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Links {
    pub model_url: String,
    pub transcript_url: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub events_url: Option<String>,
}

/// A session snapshot plus the URLs of its artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionResource {
    #[serde(flatten)]
    pub snapshot: SessionSnapshot,
    pub links: Links,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairResource {
    #[serde(flatten)]
    pub snapshot: RepairSnapshot,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub links: Links,
}

/// Payload of an `iteration` event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationEvent {
    pub record: IterationRecord,
    pub snapshot: SessionSnapshot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickResponse {
    pub outcome: loftgen_core::genloop::IterationOutcome,
    pub record: IterationRecord,
    pub snapshot: SessionSnapshot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneMesh {
    #[serde(flatten)]
    pub mesh: Mesh,
    pub scene: SceneModel,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepairRequest {
    task_prompt: String,
    #[serde(default = "default_budget")]
    budget: u32,
}

fn default_budget() -> u32 {
    5
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Arc<Self> {
        Self::with_catalog(config, Catalog::builtin())
    }

    pub fn with_catalog(config: ServiceConfig, catalog: Catalog) -> Arc<Self> {
        Arc::new(Self {
            config,
            catalog,
            sessions: RwLock::default(),
            repairs: RwLock::default(),
            next_id: AtomicU64::new(1),
        })
    }

    fn fresh_id(&self, prefix: &str) -> String {
        format!("{prefix}{}", self.next_id.fetch_add(1, Ordering::Relaxed))
    }

    fn session(&self, id: &str) -> ApiResult<Arc<SessionSlot>> {
        self.sessions.read().unwrap().get(id).cloned().ok_or_else(|| ApiError::NotFound(format!("session {id}")))
    }

    fn repair(&self, id: &str) -> ApiResult<Arc<RepairSlot>> {
        self.repairs.read().unwrap().get(id).cloned().ok_or_else(|| ApiError::NotFound(format!("repair {id}")))
    }

    fn provider(&self) -> ApiResult<Arc<dyn ChatProvider>> {
        self.config.provider.build().map_err(|e| ApiError::Internal(format!("provider: {e}")))
    }

    fn persist(&self, transcript: &Transcript) {
        if let Some(dir) = &self.config.data_dir {
            let path = dir.join(format!("{}.jsonl", transcript.session_id));
            if let Err(e) = transcript.save(&path) {
                log::warn!("cannot write {}: {e}", path.display());
            }
        }
    }
}

impl SessionSlot {
    fn refresh(&self, session: &DesignSession) -> SessionSnapshot {
        let snapshot = session.snapshot();
        *self.cached.write().unwrap() = Cached { snapshot: snapshot.clone(), transcript: session.transcript().to_jsonl() };
        snapshot
    }

    fn snapshot(&self) -> SessionSnapshot {
        self.cached.read().unwrap().snapshot.clone()
    }

    /// Logs the tick's record and, once the session ends, the final event.
    fn publish(&self, record: Option<IterationRecord>, snapshot: &SessionSnapshot) {
        if let Some(record) = record {
            let data = serde_json::to_string(&IterationEvent { record, snapshot: snapshot.clone() }).expect("serializable");
            self.events.push("iteration", snapshot.iteration, data);
        }
        let name = match snapshot.state.as_str() {
            "complete" => "complete",
            "failed" => "failed",
            _ => return,
        };
        self.events.close(name, snapshot.iteration, serde_json::to_string(snapshot).expect("serializable"));
    }
}

fn session_links(id: &str) -> Links {
    Links {
        model_url: format!("/api/sessions/{id}/model"),
        transcript_url: format!("/api/sessions/{id}/transcript"),
        events_url: Some(format!("/api/sessions/{id}/events")),
    }
}

fn repair_links(id: &str) -> Links {
    Links {
        model_url: format!("/api/repairs/{id}/model"),
        transcript_url: format!("/api/repairs/{id}/transcript"),
        events_url: None,
    }
}

fn session_resource(snapshot: SessionSnapshot) -> SessionResource {
    let links = session_links(&snapshot.id);
    SessionResource { snapshot, links }
}

fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

/// Reads a session config from a request body: the preset for `mode`,
/// overlaid field by field with the body.
pub fn config_from_body(body: Value) -> Result<SessionConfig, ApiError> {
    let Value::Object(fields) = body else {
        return Err(ApiError::field("body", "expected a JSON object"));
    };
    let mode = match fields.get("mode") {
        None => SessionMode::CoordinateSections,
        Some(m) => serde_json::from_value(m.clone())
            .map_err(|_| ApiError::field("mode", "expected \"coordinate_sections\" or \"equation_profile\""))?,
    };
    let preset = match mode {
        SessionMode::CoordinateSections => SessionConfig::coordinate_sections(),
        SessionMode::EquationProfile => SessionConfig::equation_profile(),
    };
    let mut merged = serde_json::to_value(preset).expect("serializable");
    merge(&mut merged, Value::Object(fields));
    let config: SessionConfig = serde_path_to_error::deserialize(merged).map_err(|e| {
        let field = e.path().to_string();
        let field = if field == "." { "body".to_string() } else { field };
        ApiError::field(field, e.into_inner().to_string())
    })?;
    let issues = config.issues();
    if !issues.is_empty() {
        return Err(ApiError::Invalid(
            issues.into_iter().map(|i| FieldError { field: i.field.to_string(), message: i.message }).collect(),
        ));
    }
    Ok(config)
}

async fn create_session(State(app): State<Arc<AppState>>, body: Option<Json<Value>>) -> ApiResult<Response> {
    let body = body.map_or(Value::Object(Map::new()), |Json(v)| v);
    let config = config_from_body(body)?;
    let id = app.fresh_id("s");
    let session = DesignSession::new(id.clone(), config, app.catalog.clone(), app.provider()?)
        .map_err(|e| ApiError::field("body", e.to_string()))?;
    let slot = Arc::new(SessionSlot {
        cached: RwLock::new(Cached { snapshot: session.snapshot(), transcript: String::new() }),
        session: Arc::new(Mutex::new(session)),
        events: Arc::default(),
        cancel: CancelToken::new(),
        wake: Notify::new(),
        driving: AtomicBool::new(false),
    });
    let snapshot = slot.snapshot();
    app.sessions.write().unwrap().insert(id.clone(), slot);
    let location = HeaderValue::from_str(&format!("/api/sessions/{id}")).expect("ascii id");
    Ok((StatusCode::CREATED, [(header::LOCATION, location)], Json(session_resource(snapshot))).into_response())
}

async fn get_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<SessionResource>> {
    Ok(Json(session_resource(app.session(&id)?.snapshot())))
}

async fn start_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let slot = app.session(&id)?;
    let mut session = slot.session.clone().lock_owned().await;
    session.start().map_err(|e| ApiError::Conflict(e.to_string()))?;
    let snapshot = slot.refresh(&session);
    let interval = Duration::from_secs_f64(session.config().trigger_interval);
    slot.driving.store(true, Ordering::SeqCst);
    drop(session);
    tokio::spawn(drive(app.clone(), slot, interval));
    Ok((StatusCode::ACCEPTED, Json(session_resource(snapshot))).into_response())
}

/// One tick on the blocking pool. Returns `None` if the session was
/// canceled or had already ended.
async fn tick_once(app: &Arc<AppState>, slot: &Arc<SessionSlot>) -> ApiResult<Option<(IterationRecord, SessionSnapshot)>> {
    let guard = slot.session.clone().lock_owned().await;
    let (app, slot) = (app.clone(), slot.clone());
    tokio::task::spawn_blocking(move || {
        let mut session = guard;
        if slot.cancel.is_canceled() || session.state() != SessionState::Running {
            return None;
        }
        let before = session.records().len();
        if let Err(e) = session.tick() {
            log::warn!("session {}: {e}", session.id());
        }
        let record = session.records().get(before).cloned();
        let snapshot = slot.refresh(&session);
        app.persist(session.transcript());
        slot.publish(record.clone(), &snapshot);
        record.map(|r| (r, snapshot))
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))
}

/// Ticks at the session's interval (measured between tick starts) until it
/// ends or is canceled.
async fn drive(app: Arc<AppState>, slot: Arc<SessionSlot>, interval: Duration) {
    let mut next = tokio::time::Instant::now();
    loop {
        next += interval;
        match tick_once(&app, &slot).await {
            Ok(Some((_, snapshot))) if snapshot.state == "running" => {}
            Ok(_) => break,
            Err(e) => {
                log::error!("session driver stopped: {e:?}");
                break;
            }
        }
        tokio::select! {
            _ = tokio::time::sleep_until(next) => {}
            _ = slot.wake.notified() => {}
        }
        if slot.cancel.is_canceled() {
            break;
        }
    }
    slot.driving.store(false, Ordering::SeqCst);
}

async fn tick_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<TickResponse>> {
    let slot = app.session(&id)?;
    if slot.driving.load(Ordering::SeqCst) {
        return Err(ApiError::Conflict("session is running on its trigger; cancel it to step manually".into()));
    }
    {
        let mut session = slot.session.lock().await;
        if session.state() == SessionState::Idle {
            session.start().map_err(|e| ApiError::Conflict(e.to_string()))?;
            slot.refresh(&session);
        }
        if session.state() != SessionState::Running {
            return Err(ApiError::Conflict(format!("session is {}", session.state())));
        }
    }
    let (record, snapshot) = tick_once(&app, &slot).await?.ok_or_else(|| ApiError::Conflict("session is not running".into()))?;
    Ok(Json(TickResponse { outcome: record.outcome, record, snapshot }))
}

async fn delete_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    let slot = app.session(&id)?;
    slot.cancel.cancel();
    slot.wake.notify_one();
    let mut session = slot.session.lock().await;
    if !session.state().is_terminal() {
        session.cancel();
        let snapshot = slot.refresh(&session);
        slot.publish(None, &snapshot);
    }
    Ok(StatusCode::NO_CONTENT)
}

async fn session_mesh(app: &AppState, id: &str) -> ApiResult<LoftedMesh> {
    let slot = app.session(id)?;
    if !slot.snapshot().mesh_ready {
        return Err(ApiError::Conflict(format!("session {id} has no model yet")));
    }
    let session = slot.session.lock().await;
    session.assemble_model().map_err(|e| ApiError::Conflict(e.to_string()))
}

async fn get_model(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<LoftedMesh>> {
    Ok(Json(session_mesh(&app, &id).await?))
}

fn obj_response(mesh: &Mesh) -> ApiResult<Response> {
    let obj = export_obj(mesh).map_err(|e| ApiError::Conflict(e.to_string()))?;
    Ok(([(header::CONTENT_TYPE, "model/obj")], obj).into_response())
}

async fn get_model_obj(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let mesh = session_mesh(&app, &id).await?;
    obj_response(&mesh)
}

fn jsonl_response(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response()
}

async fn get_transcript(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let slot = app.session(&id)?;
    let body = slot.cached.read().unwrap().transcript.clone();
    Ok(jsonl_response(body))
}

async fn get_events(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let slot = app.session(&id)?;
    Ok(Sse::new(slot.events.clone().subscribe()).keep_alive(KeepAlive::default()).into_response())
}

impl RepairSlot {
    fn refresh(&self, session: &RepairSession) {
        *self.cached.write().unwrap() = Cached { snapshot: session.snapshot(), transcript: session.transcript().to_jsonl() };
    }

    fn resource(&self) -> RepairResource {
        let snapshot = self.cached.read().unwrap().snapshot.clone();
        let links = repair_links(&snapshot.id);
        RepairResource { snapshot, error: self.error.read().unwrap().clone(), links }
    }
}

async fn create_repair(State(app): State<Arc<AppState>>, Json(body): Json<Value>) -> ApiResult<Response> {
    let request: RepairRequest = serde_path_to_error::deserialize(body).map_err(|e| {
        let field = e.path().to_string();
        ApiError::field(if field == "." { "body".into() } else { field }, e.into_inner().to_string())
    })?;
    if request.task_prompt.trim().is_empty() {
        return Err(ApiError::field("task_prompt", "must not be empty"));
    }
    if request.budget < 1 {
        return Err(ApiError::field("budget", "must be ≥ 1"));
    }
    let id = app.fresh_id("r");
    let session = RepairSession::new(id.clone(), request.task_prompt, request.budget, app.provider()?)
        .map_err(|e| ApiError::field("body", e.to_string()))?;
    let slot = Arc::new(RepairSlot {
        cached: RwLock::new(Cached { snapshot: session.snapshot(), transcript: session.transcript().to_jsonl() }),
        session: Arc::new(Mutex::new(session)),
        error: RwLock::new(None),
    });
    app.repairs.write().unwrap().insert(id.clone(), slot.clone());
    let resource = slot.resource();
    tokio::spawn(run_repair(app.clone(), slot));
    let location = HeaderValue::from_str(&format!("/api/repairs/{id}")).expect("ascii id");
    Ok((StatusCode::CREATED, [(header::LOCATION, location)], Json(resource)).into_response())
}

async fn run_repair(app: Arc<AppState>, slot: Arc<RepairSlot>) {
    loop {
        let guard = slot.session.clone().lock_owned().await;
        let (app, step_slot) = (app.clone(), slot.clone());
        let result = tokio::task::spawn_blocking(move || {
            let mut session = guard;
            let result = session.step();
            step_slot.refresh(&session);
            app.persist(session.transcript());
            result
        })
        .await;
        match result {
            Ok(Ok(RepairState::Running)) => {}
            Ok(Ok(_)) => break,
            Ok(Err(e)) => {
                *slot.error.write().unwrap() = Some(e.to_string());
                break;
            }
            Err(e) => {
                *slot.error.write().unwrap() = Some(e.to_string());
                break;
            }
        }
    }
}

async fn get_repair(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<RepairResource>> {
    Ok(Json(app.repair(&id)?.resource()))
}

async fn repair_mesh(app: &AppState, id: &str) -> ApiResult<SceneMesh> {
    let slot = app.repair(id)?;
    let session = slot.session.lock().await;
    let scene = session.scene().ok_or_else(|| ApiError::Conflict(format!("repair {id} has not converged")))?.clone();
    let mesh = scene_to_mesh(&scene).map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok(SceneMesh { mesh, scene })
}

async fn get_repair_model(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<SceneMesh>> {
    Ok(Json(repair_mesh(&app, &id).await?))
}

async fn get_repair_obj(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    obj_response(&repair_mesh(&app, &id).await?.mesh)
}

async fn get_repair_transcript(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let slot = app.repair(&id)?;
    let body = slot.cached.read().unwrap().transcript.clone();
    Ok(jsonl_response(body))
}

async fn health() -> Json<Value> {
    Json(json!({"status": "ok"}))
}

pub fn router(app: Arc<AppState>) -> Router {
    let cors = (!app.config.allow_origins.is_empty()).then(|| {
        let origins: Vec<HeaderValue> = app.config.allow_origins.iter().filter_map(|o| o.parse().ok()).collect();
        CorsLayer::new().allow_origin(AllowOrigin::list(origins)).allow_methods(Any).allow_headers(Any)
    });
    let router = Router::new()
        .route("/api/health", get(health))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", get(get_session).delete(delete_session))
        .route("/api/sessions/{id}/start", post(start_session))
        .route("/api/sessions/{id}/tick", post(tick_session))
        .route("/api/sessions/{id}/model", get(get_model))
        .route("/api/sessions/{id}/model.obj", get(get_model_obj))
        .route("/api/sessions/{id}/transcript", get(get_transcript))
        .route("/api/sessions/{id}/events", get(get_events))
        .route("/api/repairs", post(create_repair))
        .route("/api/repairs/{id}", get(get_repair))
        .route("/api/repairs/{id}/model", get(get_repair_model))
        .route("/api/repairs/{id}/model.obj", get(get_repair_obj))
        .route("/api/repairs/{id}/transcript", get(get_repair_transcript))
        .with_state(app);
    match cors {
        Some(layer) => router.layer(layer),
        None => router,
    }
}

/// Serves until Ctrl-C.
pub async fn serve(bind: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    if let Some(dir) = &config.data_dir {
        std::fs::create_dir_all(dir)?;
    }
    let app = AppState::new(config);
    let listener = tokio::net::TcpListener::bind(bind).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    let result = axum::serve(listener, router(app.clone()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await;
    // blocking HTTP clients must not be dropped on a runtime thread
    let _ = tokio::task::spawn_blocking(move || drop(app)).await;
    result
}
