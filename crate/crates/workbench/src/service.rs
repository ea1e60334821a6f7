//! HTTP + JSON session service.
//!
//! Mutations on one session are serialised by that session's mutex and
//! journaled before they are acknowledged; distinct sessions never share a
//! lock beyond the brief map lookup.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use vibes_core::psych::{
    session_to_json, Interval, PresentationOrder, SessionLog, SessionStatus, StimulusRef,
    TrialRecord,
};
use vibes_core::stats::{FitReport, Link};
use vibes_core::Error as CoreError;

use crate::commands::fit_trials;
use crate::config::WorkbenchConfig;
use crate::error::{Result, WorkbenchError};
use crate::journal::{Journal, JournalEntry, PlanSpec};

#[derive(Debug, Clone)]
pub struct ServiceSettings {
    /// `None` keeps sessions in memory only.
    pub journal_dir: Option<PathBuf>,
    pub stimulus_ms: u64,
    pub gap_ms: u64,
    pub bootstrap_resamples: usize,
    pub bootstrap_seed: u64,
    pub link: Link,
}

impl ServiceSettings {
    pub fn from_config(cfg: &WorkbenchConfig) -> Self {
        Self {
            journal_dir: Some(cfg.service.journal_dir.clone()),
            stimulus_ms: cfg.service.stimulus_ms,
            gap_ms: cfg.service.gap_ms,
            bootstrap_resamples: cfg.bootstrap_resamples,
            bootstrap_seed: cfg.seeds.bootstrap,
            link: Link::Logit,
        }
    }
}

#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub log: SessionLog,
    journal: Option<Journal>,
}

#[derive(Debug)]
pub struct AppState {
    settings: ServiceSettings,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

impl AppState {
    /// Fresh state; with a journal directory, every journal in it is
    /// replayed first.
    pub fn new(settings: ServiceSettings) -> Result<Self> {
        let mut sessions = HashMap::new();
        if let Some(dir) = &settings.journal_dir {
            std::fs::create_dir_all(dir).map_err(|e| WorkbenchError::io(dir, e))?;
            let entries = std::fs::read_dir(dir).map_err(|e| WorkbenchError::io(dir, e))?;
            for path in entries.filter_map(|e| e.ok().map(|e| e.path())) {
                if path.extension().is_none_or(|x| x != "jsonl") {
                    continue;
                }
                let id = path
                    .file_stem()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned();
                let (log, journal) = Journal::open(&path)?;
                sessions.insert(
                    id.clone(),
                    Arc::new(Mutex::new(Session {
                        id,
                        log,
                        journal: Some(journal),
                    })),
                );
            }
        }
        Ok(Self {
            settings,
            sessions: RwLock::new(sessions),
        })
    }

    pub fn session(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
    }

    pub fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self
            .sessions
            .read()
            .expect("session map lock")
            .keys()
            .cloned()
            .collect();
        ids.sort();
        ids
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/trial", get(next_trial))
        .route("/sessions/{id}/response", post(record_response))
        .route("/sessions/{id}/fit", get(fit))
        .route("/sessions/{id}/export", get(export))
        .with_state(state)
}

/// Binds the configured port and serves until the process stops.
pub async fn serve(cfg: &WorkbenchConfig) -> Result<()> {
    let state = Arc::new(AppState::new(ServiceSettings::from_config(cfg))?);
    let addr = std::net::SocketAddr::from(([0, 0, 0, 0], cfg.service.port));
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| WorkbenchError::io(std::path::Path::new(&addr.to_string()), e))?;
    axum::serve(listener, router(state))
        .await
        .map_err(|e| WorkbenchError::io(std::path::Path::new(&addr.to_string()), e))
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    fn not_found(id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "not_found",
            format!("no session `{id}`"),
        )
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let (status, code) = match &e {
            CoreError::ProtocolViolation(_) => (StatusCode::CONFLICT, "protocol_violation"),
            CoreError::SessionComplete => (StatusCode::CONFLICT, "session_complete"),
            CoreError::NonIdentifiable(_) | CoreError::EmptyInput(_) => {
                (StatusCode::UNPROCESSABLE_ENTITY, "non_identifiable")
            }
            CoreError::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "io"),
            _ => (StatusCode::BAD_REQUEST, "invalid_request"),
        };
        Self::new(status, code, e.to_string())
    }
}

impl From<WorkbenchError> for ApiError {
    fn from(e: WorkbenchError) -> Self {
        match e {
            WorkbenchError::Core(c) => c.into(),
            other => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "io", other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(json!({ "error": self.code, "message": self.message })),
        )
            .into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", e.to_string()))
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

fn lookup(state: &AppState, id: &str) -> ApiResult<Arc<Mutex<Session>>> {
    state.session(id).ok_or_else(|| ApiError::not_found(id))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSessionRequest {
    #[serde(default = "anonymous")]
    pub participant_id: String,
    #[serde(default)]
    pub condition_label: String,
    pub plan: PlanSpec,
}

fn anonymous() -> String {
    "anonymous".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreatedSession {
    pub id: String,
    pub total: usize,
    pub status: SessionStatus,
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<CreatedSession>)> {
    let req: CreateSessionRequest = parse_body(&body)?;
    let entry = JournalEntry::Create {
        participant_id: req.participant_id,
        condition_label: req.condition_label,
        plan: req.plan,
        started_unix_ms: Some(now_ms()),
    };
    let mut log = None;
    entry.apply(&mut log)?;
    let log = log.expect("create yields a log");
    let id = uuid::Uuid::new_v4().simple().to_string();
    let journal = match &state.settings.journal_dir {
        Some(dir) => Some(Journal::create(dir, &id, &entry)?),
        None => None,
    };
    let created = CreatedSession {
        id: id.clone(),
        total: log.plan.total(),
        status: log.status(),
    };
    state.sessions.write().expect("session map lock").insert(
        id.clone(),
        Arc::new(Mutex::new(Session { id, log, journal })),
    );
    Ok((StatusCode::CREATED, Json(created)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseEvent {
    pub event: String,
    pub at_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialPayload {
    pub trial_index: usize,
    pub total: usize,
    pub order: PresentationOrder,
    pub first: StimulusRef,
    pub second: StimulusRef,
    /// Cue timeline relative to trial start.
    pub phases: Vec<PhaseEvent>,
}

fn phase_events(s: &ServiceSettings) -> Vec<PhaseEvent> {
    let on2 = s.stimulus_ms + s.gap_ms;
    let off2 = on2 + s.stimulus_ms;
    [
        ("stimulus_1_on", 0),
        ("stimulus_1_off", s.stimulus_ms),
        ("stimulus_2_on", on2),
        ("stimulus_2_off", off2),
        ("await_response", off2),
    ]
    .into_iter()
    .map(|(event, at_ms)| PhaseEvent {
        event: event.into(),
        at_ms,
    })
    .collect()
}

async fn next_trial(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<TrialPayload>> {
    let session = lookup(&state, &id)?;
    let pair = session.lock().expect("session lock").log.next_trial()?;
    Ok(Json(TrialPayload {
        trial_index: pair.trial_index,
        total: pair.total,
        order: pair.order,
        first: pair.first,
        second: pair.second,
        phases: phase_events(&state.settings),
    }))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseRequest {
    pub trial_index: usize,
    pub choice: Interval,
    #[serde(default)]
    pub rt_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseAck {
    pub trial: TrialRecord,
    pub status: SessionStatus,
    pub answered: usize,
    pub remaining: usize,
}

async fn record_response(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<ResponseAck>> {
    let req: ResponseRequest = parse_body(&body)?;
    let session = lookup(&state, &id)?;
    let mut guard = session.lock().expect("session lock");
    let s = &mut *guard;
    let entry = JournalEntry::Response {
        trial_index: req.trial_index,
        choice: req.choice,
        rt_ms: req.rt_ms,
        at_unix_ms: Some(now_ms()),
    };
    // Validate on a copy so a failed journal write leaves memory untouched.
    let mut next = Some(s.log.clone());
    entry.apply(&mut next)?;
    if let Some(j) = s.journal.as_mut() {
        j.append(&entry)?;
    }
    s.log = next.expect("log present");
    Ok(Json(ResponseAck {
        trial: s.log.trials().last().expect("just recorded").clone(),
        status: s.log.status(),
        answered: s.log.answered(),
        remaining: s.log.remaining(),
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelPoint {
    pub x_um: f64,
    pub n: usize,
    pub proportion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitPayload {
    pub status: SessionStatus,
    pub answered: usize,
    pub levels: Vec<LevelPoint>,
    pub report: FitReport,
}

async fn fit(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<FitPayload>> {
    let session = lookup(&state, &id)?;
    let (trials, status, levels) = {
        let s = session.lock().expect("session lock");
        let levels = s
            .log
            .level_proportions()
            .into_iter()
            .map(|(x_um, n, proportion)| LevelPoint {
                x_um,
                n,
                proportion,
            })
            .collect::<Vec<_>>();
        (s.log.fit_trials(), s.log.status(), levels)
    };
    let settings = state.settings.clone();
    let report = tokio::task::spawn_blocking(move || {
        fit_trials(
            &trials,
            settings.link,
            settings.bootstrap_resamples,
            settings.bootstrap_seed,
        )
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    Ok(Json(FitPayload {
        status,
        answered: report.n_trials,
        levels,
        report,
    }))
}

async fn export(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let session = lookup(&state, &id)?;
    let text = session_to_json(&session.lock().expect("session lock").log);
    Ok(([(header::CONTENT_TYPE, "application/json")], text).into_response())
}
