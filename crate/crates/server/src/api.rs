use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use worldshift_core::engine::ApplicationReport;
use worldshift_core::scenario::WorldDocument;
use worldshift_core::session::SessionStatus;
use worldshift_core::{
    new_session, render_world, BackendError, Locale, ParsedResponse, ScenarioError, Session,
    SessionError, TurnRecord,
};

use crate::registry::BackendEntry;
use crate::{AppState, SessionSlot};

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/scenarios", get(list_scenarios))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/turns", post(post_turn))
        .route("/sessions/{id}/transcript", get(get_transcript))
        .with_state(state)
}

#[derive(Debug)]
struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    fn no_session(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "unknown-session", format!("no session '{id}'"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let code = e.code();
        let status = match &e {
            SessionError::Scenario(ScenarioError::UnknownScenario(_)) => StatusCode::NOT_FOUND,
            SessionError::Scenario(_) => StatusCode::INTERNAL_SERVER_ERROR,
            SessionError::BackendConfig(_) | SessionError::EmptyInput => StatusCode::BAD_REQUEST,
            SessionError::Completed | SessionError::TurnCapReached(_) => StatusCode::GONE,
            SessionError::Backend(BackendError::Config(_)) => StatusCode::BAD_REQUEST,
            SessionError::Backend(_) => StatusCode::BAD_GATEWAY,
        };
        // Backend failure details can mention endpoints; keep them in the
        // server output only.
        let message = match &e {
            SessionError::Backend(inner) => {
                eprintln!("backend failure: {inner}");
                format!("the language model backend failed ({code}); the turn was not played")
            }
            other => other.to_string(),
        };
        ApiError::new(status, code, message)
    }
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad-request", e.to_string()))
}

async fn healthz() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

#[derive(Serialize)]
struct ScenarioInfo {
    id: String,
    title: String,
    locale: Locale,
    #[serde(skip_serializing_if = "Option::is_none")]
    intro: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    notes: Option<String>,
}

async fn list_scenarios(State(state): State<AppState>) -> Json<Vec<ScenarioInfo>> {
    let list = state
        .inner
        .catalog
        .iter()
        .map(|s| {
            let m = &s.document.metadata;
            ScenarioInfo {
                id: m.id.clone(),
                title: m.title.clone(),
                locale: m.locale,
                intro: m.intro.clone(),
                notes: m.notes.clone(),
            }
        })
        .collect();
    Json(list)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    scenario_id: String,
    #[serde(default)]
    backend: Option<String>,
    #[serde(default)]
    locale: Option<Locale>,
    #[serde(default)]
    debug: bool,
    #[serde(default)]
    tester: Option<String>,
}

#[derive(Serialize)]
struct Created {
    session_id: String,
    scenario_id: String,
    locale: Locale,
    backend: String,
    status: SessionStatus,
    debug: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    intro: Option<String>,
    /// Rendered starting state, debug sessions only.
    #[serde(skip_serializing_if = "Option::is_none")]
    initial_state: Option<String>,
}

async fn create_session(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<(StatusCode, Json<Created>), ApiError> {
    let req: CreateSession = parse_body(&body)?;
    let backend_id = req.backend.unwrap_or_else(|| "scripted".to_string());
    let catalog = &state.inner.catalog;
    let scenario = catalog.get(&req.scenario_id).map_err(SessionError::from)?;
    let locale = req.locale.unwrap_or(scenario.document.metadata.locale);
    let entry = state.inner.backends.get(&backend_id).ok_or_else(|| {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "unknown-backend",
            format!("no backend '{backend_id}'"),
        )
    })?;
    let mut session = match entry {
        BackendEntry::Config(cfg) => new_session(catalog, &req.scenario_id, cfg, locale)?,
        BackendEntry::Factory(make) => Session::new(scenario, make(), locale)?,
    };
    if let Some(t) = req.tester {
        session = session.with_tester(t);
    }
    state.write_log(&session);

    let created = Created {
        session_id: session.id().to_string(),
        scenario_id: req.scenario_id,
        locale,
        backend: session.backend_label(),
        status: session.status(),
        debug: req.debug,
        intro: scenario.document.metadata.intro.clone(),
        initial_state: req.debug.then(|| render_world(session.world(), locale).text),
    };
    state.insert(session, req.debug);
    Ok((StatusCode::CREATED, Json(created)))
}

#[derive(Serialize)]
struct TurnDebug<'a> {
    rendered_state: &'a str,
    raw_reply: &'a str,
    parsed: &'a ParsedResponse,
    #[serde(skip_serializing_if = "Option::is_none")]
    parse_error: Option<&'a str>,
    reports: &'a [ApplicationReport],
    world_after: &'a WorldDocument,
}

#[derive(Serialize)]
struct TurnView<'a> {
    turn: u32,
    player_input: &'a str,
    narration: Option<&'a str>,
    objective_met: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    debug: Option<TurnDebug<'a>>,
}

fn turn_view(t: &TurnRecord, debug: bool) -> TurnView<'_> {
    TurnView {
        turn: t.index,
        player_input: &t.player_input,
        narration: t.narration.as_deref(),
        objective_met: t.objective_met,
        debug: debug.then(|| TurnDebug {
            rendered_state: &t.rendered_state,
            raw_reply: &t.raw_reply,
            parsed: &t.parsed,
            parse_error: t.parse_error.as_deref(),
            reports: &t.reports,
            world_after: &t.world_after,
        }),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TurnRequest {
    input: String,
}

async fn post_turn(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let slot = state.slot(&id).ok_or_else(|| ApiError::no_session(&id))?;
    let req: TurnRequest = parse_body(&body)?;
    if slot.view.read().unwrap().status == SessionStatus::Completed {
        return Err(SessionError::Completed.into());
    }
    let guard = slot.try_begin_turn().ok_or_else(|| {
        ApiError::new(
            StatusCode::CONFLICT,
            "turn-in-flight",
            "a turn is already being played for this session",
        )
    })?;

    let worker_state = state.clone();
    let worker_slot = Arc::clone(&slot);
    let record = tokio::task::spawn_blocking(move || {
        let _guard = guard;
        play(&worker_state, &worker_slot, &req.input)
    })
    .await
    .map_err(|e| {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
    })??;

    let status = slot.view.read().unwrap().status;
    let mut body = serde_json::to_value(turn_view(&record, slot.debug)).expect("turn serializes");
    body["status"] = json!(status);
    Ok(Json(body).into_response())
}

fn play(state: &AppState, slot: &SessionSlot, input: &str) -> Result<TurnRecord, ApiError> {
    let mut session = slot.session.lock().unwrap();
    let record = session.play_turn(input)?.clone();
    state.write_log(&session);
    let mut view = slot.view.write().unwrap();
    view.turns.push(record.clone());
    view.status = session.status();
    Ok(record)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Page {
    /// Return turns with an index greater than this.
    #[serde(default)]
    after: u32,
    #[serde(default)]
    limit: Option<usize>,
}

const MAX_PAGE: usize = 200;

async fn get_transcript(
    State(state): State<AppState>,
    Path(id): Path<String>,
    page: Result<Query<Page>, QueryRejection>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let Query(page) = page
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad-request", e.body_text()))?;
    let slot = state.slot(&id).ok_or_else(|| ApiError::no_session(&id))?;
    let view = slot.view.read().unwrap().clone();
    let limit = page.limit.unwrap_or(MAX_PAGE).clamp(1, MAX_PAGE);
    let selected: Vec<&TurnRecord> = view
        .turns
        .iter()
        .filter(|t| t.index > page.after)
        .take(limit)
        .collect();
    let next_after = selected
        .last()
        .filter(|last| (last.index as usize) < view.turns.len())
        .map(|last| last.index);
    let turns: Vec<TurnView> = selected.iter().map(|t| turn_view(t, slot.debug)).collect();
    Ok(Json(json!({
        "session_id": id,
        "scenario_id": view.scenario_id,
        "locale": view.locale,
        "status": view.status,
        "debug": slot.debug,
        "total_turns": view.turns.len(),
        "turns": turns,
        "next_after": next_after,
    })))
}
