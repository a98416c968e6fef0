//! HTTP session service.
//!
//! Mutations take the store's write lock for the whole
//! validate-persist-apply step, so they are serialized (and with them all
//! mutations of any one session); reads share the lock and always see a
//! state that matches a prefix of the log.

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::sync::RwLock;
use tower_http::services::ServeDir;

use lexdrill_core::exercise::{ExerciseBank, ExercisePrompt, Solution};
use lexdrill_core::progress::{
    AgeGroup, Applied, ProgressDelta, ProgressError, ProgressState, Session,
};
use lexdrill_core::text::Language;

use crate::store::Store;

pub struct AppState {
    pub bank: ExerciseBank,
    pub store: RwLock<Store>,
}

/// Error payload: `{"error": "<code>", "message": "..."}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct ApiError {
    pub error: String,
    pub message: String,
}

pub struct Failure(StatusCode, ApiError);

impl From<ProgressError> for Failure {
    fn from(e: ProgressError) -> Self {
        let status = match e {
            ProgressError::UnknownPlayer(_)
            | ProgressError::UnknownSession(_)
            | ProgressError::UnknownExercise(_) => StatusCode::NOT_FOUND,
            ProgressError::DuplicatePlayer(_)
            | ProgressError::DuplicateAnswer(_)
            | ProgressError::SessionInactive(_)
            | ProgressError::BankExhausted(_) => StatusCode::CONFLICT,
            ProgressError::InvalidRequest(_) => StatusCode::BAD_REQUEST,
            ProgressError::CorruptLog { .. } | ProgressError::Io(_) => {
                tracing::error!("store failure: {e}");
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        Failure(
            status,
            ApiError {
                error: e.code().to_string(),
                message: e.to_string(),
            },
        )
    }
}

impl IntoResponse for Failure {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

/// Parse a JSON body, reporting any problem as a 400 `invalid_request`.
fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, Failure> {
    serde_json::from_slice(bytes)
        .map_err(|e| Failure::from(ProgressError::InvalidRequest(e.to_string())))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NewPlayer {
    #[serde(default)]
    pub id: Option<String>,
    pub display_name: String,
    /// Defaults to the bank language.
    #[serde(default)]
    pub language: Option<Language>,
    pub age_group: AgeGroup,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NewSession {
    pub player_id: String,
    #[serde(default)]
    pub game_length_secs: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Answer {
    pub exercise_id: String,
    pub response: lexdrill_core::exercise::Response,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub correct: bool,
    pub target: String,
    pub canonical_solution: Solution,
    pub delta: ProgressDelta,
    pub new_achievements: Vec<String>,
    pub progress: ProgressState,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub language: Language,
    pub exercises: usize,
    pub events: u64,
}

async fn create_player(
    State(app): State<Arc<AppState>>,
    bytes: Bytes,
) -> Result<impl IntoResponse, Failure> {
    let req: NewPlayer = body(&bytes)?;
    let language = req.language.unwrap_or(app.bank.language);
    if language != app.bank.language {
        return Err(ProgressError::InvalidRequest(format!(
            "this server only has {} exercises",
            app.bank.language
        ))
        .into());
    }
    let mut store = app.store.write().await;
    let event = store
        .tracker()
        .create_player(req.id, &req.display_name, language, req.age_group, Utc::now())?;
    store.commit(&event)?;
    let lexdrill_core::progress::Event::PlayerCreated { player, .. } = event else {
        unreachable!("create_player builds a PlayerCreated event")
    };
    Ok((StatusCode::CREATED, Json(player)))
}

async fn create_session(
    State(app): State<Arc<AppState>>,
    bytes: Bytes,
) -> Result<(StatusCode, Json<Session>), Failure> {
    let req: NewSession = body(&bytes)?;
    let mut store = app.store.write().await;
    let event = store
        .tracker()
        .start_session(&req.player_id, req.game_length_secs, Utc::now())?;
    store.commit(&event)?;
    let lexdrill_core::progress::Event::SessionStarted { session } = event else {
        unreachable!("start_session builds a SessionStarted event")
    };
    Ok((StatusCode::CREATED, Json(session)))
}

async fn next_exercise(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<ExercisePrompt>, Failure> {
    let mut store = app.store.write().await;
    let (event, exercise) = store.tracker().next_exercise(&id, &app.bank, Utc::now())?;
    store.commit(&event)?;
    Ok(Json(exercise.prompt()))
}

async fn submit_answer(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> Result<Json<Verdict>, Failure> {
    let req: Answer = body(&bytes)?;
    let mut store = app.store.write().await;
    let (event, exercise) =
        store
            .tracker()
            .submit_answer(&id, &req.exercise_id, req.response, &app.bank, Utc::now())?;
    let Applied::Answer(delta) = store.commit(&event)? else {
        unreachable!("answers produce answer deltas")
    };
    let lexdrill_core::progress::Event::AnswerRecorded { answer } = &event else {
        unreachable!("submit_answer builds an AnswerRecorded event")
    };
    let player = &store.tracker().session(&id)?.session.player_id;
    let progress = store.tracker().progress(player)?.clone();
    Ok(Json(Verdict {
        correct: answer.correct,
        target: exercise.target.clone(),
        canonical_solution: exercise.solution.clone(),
        new_achievements: delta.new_achievements.clone(),
        delta,
        progress,
    }))
}

async fn progress(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<ProgressState>, Failure> {
    let store = app.store.read().await;
    Ok(Json(store.tracker().progress(&id)?.clone()))
}

async fn healthz(State(app): State<Arc<AppState>>) -> Json<Health> {
    let store = app.store.read().await;
    Json(Health {
        status: "ok".into(),
        language: app.bank.language,
        exercises: app.bank.exercises.len(),
        events: store.tracker().events,
    })
}

async fn not_found() -> Failure {
    Failure(
        StatusCode::NOT_FOUND,
        ApiError {
            error: "not_found".into(),
            message: "no such endpoint".into(),
        },
    )
}

pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/players", post(create_player))
        .route("/api/players/{id}/progress", get(progress))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}/next", get(next_exercise))
        .route("/api/sessions/{id}/answers", post(submit_answer))
        .route("/api/healthz", get(healthz))
        .route("/api/{*rest}", axum::routing::any(not_found))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(not_found),
    }
}
