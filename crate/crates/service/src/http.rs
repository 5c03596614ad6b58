//! JSON-over-HTTP API.
//!
//! | method | path | body |
//! |---|---|---|
//! | POST | `/sessions` | [`SessionSpec`] → `{id, status, question}` |
//! | GET | `/sessions/{id}/question` | `{status, question}` |
//! | POST | `/sessions/{id}/votes` | [`VoteRequest`] → [`VoteReceipt`] |
//! | GET | `/sessions/{id}/state` | [`StateView`] |
//! | GET | `/sessions/{id}/result` | [`ResultView`] |
//! | GET | `/sessions/{id}/dominance.dot` | Graphviz text |
//!
//! Errors are `{"error": "<kind>", "message": "..."}` with status 404 for an
//! unknown session, 409 for a stale question or a finished session, 422 for
//! an invalid spec and 400 for malformed JSON.

use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use crate::session::{QuestionView, SessionError, SessionSpec, StateView, Status, VoteReceipt, VoteRequest};
use crate::store::SessionStore;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionResponse {
    pub status: Status,
    pub question: Option<QuestionView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Created {
    pub id: String,
    pub status: Status,
    pub question: Option<QuestionView>,
}

pub struct ApiError(StatusCode, ErrorBody);

impl ApiError {
    fn new(status: StatusCode, error: &str, message: String) -> Self {
        ApiError(
            status,
            ErrorBody {
                error: error.into(),
                message,
            },
        )
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let (status, kind) = match &e {
            SessionError::InvalidSpec(_) => (StatusCode::UNPROCESSABLE_ENTITY, "invalid_spec"),
            SessionError::UnknownSession(_) => (StatusCode::NOT_FOUND, "unknown_session"),
            SessionError::StaleQuestion { .. } => (StatusCode::CONFLICT, "stale_question"),
            SessionError::SessionTerminal => (StatusCode::CONFLICT, "session_terminal"),
            SessionError::Internal(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        ApiError::new(status, kind, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        // a body that parses but has the wrong shape is still a bad spec
        let status = match e {
            JsonRejection::JsonDataError(_) => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, "bad_request", e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

type Store = Arc<SessionStore>;
type ApiResult<T> = Result<Json<T>, ApiError>;

/// The API routes, plus files from `static_dir` for every other path.
pub fn router(store: Store, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/question", get(question))
        .route("/sessions/{id}/votes", post(vote))
        .route("/sessions/{id}/state", get(state))
        .route("/sessions/{id}/result", get(result))
        .route("/sessions/{id}/dominance.dot", get(dot))
        .with_state(store);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

async fn create(
    State(store): State<Store>,
    spec: Result<Json<SessionSpec>, JsonRejection>,
) -> Result<(StatusCode, Json<Created>), ApiError> {
    let Json(spec) = spec?;
    let shared = store.create(&spec)?;
    let s = shared.lock().unwrap();
    Ok((
        StatusCode::CREATED,
        Json(Created {
            id: s.id().to_string(),
            status: s.status(),
            question: s.question(),
        }),
    ))
}

async fn question(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<QuestionResponse> {
    let shared = store.get(&id)?;
    let s = shared.lock().unwrap();
    Ok(Json(QuestionResponse {
        status: s.status(),
        question: s.question(),
    }))
}

async fn vote(
    State(store): State<Store>,
    Path(id): Path<String>,
    req: Result<Json<VoteRequest>, JsonRejection>,
) -> ApiResult<VoteReceipt> {
    let Json(req) = req?;
    let shared = store.get(&id)?;
    let mut s = shared.lock().unwrap();
    let receipt = s.submit_vote(&req)?;
    store.persist(&s)?;
    Ok(Json(receipt))
}

async fn state(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<StateView> {
    let shared = store.get(&id)?;
    let s = shared.lock().unwrap();
    Ok(Json(s.state()))
}

async fn result(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<crate::session::ResultView> {
    let shared = store.get(&id)?;
    let s = shared.lock().unwrap();
    Ok(Json(s.result()))
}

async fn dot(State(store): State<Store>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    let shared = store.get(&id)?;
    let text = shared.lock().unwrap().dominance_dot();
    Ok(([(header::CONTENT_TYPE, "text/vnd.graphviz; charset=utf-8")], text))
}
