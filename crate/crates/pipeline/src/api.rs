//! HTTP API over a [`SessionStore`].
//!
//! | method | path | body / result |
//! |---|---|---|
//! | POST | `/sessions` | engine config plus optional `id` → session summary |
//! | GET | `/sessions` | session ids |
//! | GET | `/sessions/{id}` | session summary |
//! | POST | `/sessions/{id}/rounds` | `{score, round, team, receiving?, detections}` → round result |
//! | GET | `/sessions/{id}/rounds` | round results in submission order |
//! | GET | `/sessions/{id}/stats` | tactic distribution |
//! | GET | `/sessions/{id}/events` | server-sent `round_result` events |
//!
//! Errors are `{"error": kind, "message": text}`.

use std::convert::Infallible;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Request, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::middleware::{self, Next};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::Stream;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::sync::broadcast;

use setpath_core::config::EngineConfig;
use setpath_core::detect::stream::{from_wire, WireRecord};
use setpath_core::rotation::{RoundKey, Team};
use setpath_core::Error as CoreError;

use crate::session::{PipelineError, RoundSubmission, SessionEvent, SessionStore};

pub type AppState = Arc<SessionStore>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateSessionRequest {
    #[serde(default)]
    pub id: Option<String>,
    #[serde(flatten)]
    pub config: EngineConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionSummary {
    pub id: String,
    pub config: EngineConfig,
    pub rounds_total: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubmitRoundRequest {
    pub score: u32,
    pub round: u32,
    pub team: Team,
    #[serde(default)]
    pub receiving: Option<Team>,
    #[serde(default)]
    pub detections: Vec<WireRecord>,
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: &'static str,
    message: String,
}

pub struct ApiError(StatusCode, &'static str, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.0,
            Json(ErrorBody {
                error: self.1,
                message: self.2,
            }),
        )
            .into_response()
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        let msg = e.to_string();
        let (status, kind) = match &e {
            PipelineError::UnknownSession(_) => (StatusCode::NOT_FOUND, "unknown_session"),
            PipelineError::DuplicateSession(_) => (StatusCode::CONFLICT, "duplicate_session"),
            PipelineError::InvalidSessionId(_) => (StatusCode::BAD_REQUEST, "invalid_session_id"),
            PipelineError::DuplicateRound(_) => (StatusCode::CONFLICT, "duplicate_round"),
            PipelineError::OutOfOrder { .. } => (StatusCode::CONFLICT, "out_of_order"),
            PipelineError::TeamChangedWithinRally { .. } => (StatusCode::CONFLICT, "team_changed_within_rally"),
            PipelineError::Core(CoreError::MalformedRecord { .. }) => (StatusCode::BAD_REQUEST, "malformed_detections"),
            PipelineError::Core(CoreError::MalformedRoundKey(_)) => (StatusCode::BAD_REQUEST, "malformed_round_key"),
            PipelineError::Core(CoreError::InvalidCalibration(_)) => (StatusCode::BAD_REQUEST, "invalid_calibration"),
            PipelineError::Core(CoreError::Io(_)) | PipelineError::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "io"),
            PipelineError::Core(_) => (StatusCode::BAD_REQUEST, "invalid_request"),
        };
        ApiError(status, kind, msg)
    }
}

fn parse_json<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError(StatusCode::BAD_REQUEST, "invalid_json", e.to_string()))
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, PipelineError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
        .map_err(ApiError::from)
}

async fn create_session(State(store): State<AppState>, body: Bytes) -> Result<impl IntoResponse, ApiError> {
    let req: CreateSessionRequest = parse_json(&body)?;
    let summary = blocking(move || {
        let s = store.create_session(req.id, req.config)?;
        Ok(SessionSummary {
            id: s.id.clone(),
            config: s.config.clone(),
            rounds_total: 0,
        })
    })
    .await?;
    Ok((StatusCode::CREATED, Json(summary)))
}

async fn list_sessions(State(store): State<AppState>) -> Json<Vec<String>> {
    Json(store.list())
}

async fn get_session(State(store): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionSummary>, ApiError> {
    let s = store.get(&id)?;
    Ok(Json(SessionSummary {
        id: s.id.clone(),
        config: s.config.clone(),
        rounds_total: s.rounds_total(),
    }))
}

async fn submit_round(
    State(store): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<impl IntoResponse, ApiError> {
    let req: SubmitRoundRequest = parse_json(&body)?;
    let result = blocking(move || {
        let session = store.get(&id)?;
        if req.score == 0 || req.round == 0 {
            return Err(CoreError::MalformedRoundKey(format!("{}_{}_{}", req.score, req.round, req.team)).into());
        }
        let records = from_wire(req.detections, session.config.calibration.frame_height)?;
        session.submit(RoundSubmission {
            key: RoundKey::new(req.score, req.round, req.team),
            receiving: req.receiving,
            records,
        })
    })
    .await?;
    Ok((StatusCode::CREATED, Json(result)))
}

async fn get_rounds(State(store): State<AppState>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    Ok(Json(store.get(&id)?.rounds()))
}

async fn get_stats(State(store): State<AppState>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    Ok(Json(store.get_stats(&id)?))
}

fn event_stream(rx: broadcast::Receiver<SessionEvent>) -> impl Stream<Item = Result<Event, Infallible>> {
    futures::stream::unfold(rx, |mut rx| async move {
        let event = match rx.recv().await {
            Ok(ev) => Event::default()
                .event("round_result")
                .id(ev.result.round_key.to_string())
                .json_data(&ev)
                .unwrap_or_else(|_| Event::default().event("error")),
            Err(broadcast::error::RecvError::Lagged(n)) => Event::default().event("lagged").data(n.to_string()),
            Err(broadcast::error::RecvError::Closed) => return None,
        };
        Some((Ok(event), rx))
    })
}

async fn events(State(store): State<AppState>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    let rx = store.get(&id)?.subscribe();
    Ok(Sse::new(event_stream(rx)).keep_alive(KeepAlive::default()))
}

/// Permissive CORS so a console served from another origin can call in.
async fn cors(req: Request, next: Next) -> Response {
    let mut res = if req.method() == Method::OPTIONS {
        StatusCode::NO_CONTENT.into_response()
    } else {
        next.run(req).await
    };
    let h = res.headers_mut();
    h.insert(header::ACCESS_CONTROL_ALLOW_ORIGIN, HeaderValue::from_static("*"));
    h.insert(
        header::ACCESS_CONTROL_ALLOW_METHODS,
        HeaderValue::from_static("GET, POST, OPTIONS"),
    );
    h.insert(
        header::ACCESS_CONTROL_ALLOW_HEADERS,
        HeaderValue::from_static("content-type"),
    );
    res
}

pub fn router(store: AppState) -> Router {
    Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/sessions", post(create_session).get(list_sessions))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/rounds", post(submit_round).get(get_rounds))
        .route("/sessions/{id}/stats", get(get_stats))
        .route("/sessions/{id}/events", get(events))
        .layer(middleware::from_fn(cors))
        .with_state(store)
}

/// Serve until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, store: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
