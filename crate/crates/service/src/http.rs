//! HTTP/JSON front end.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::ServiceError;
use crate::experiment::{Experiment, ExportFilter};
use crate::playlist::Group;

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match self {
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Conflict(_) => StatusCode::CONFLICT,
            ServiceError::Validation(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::Storage(_) | ServiceError::Internal(_) => {
                tracing::error!(error = %self, "request failed");
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        (status, Json(serde_json::json!({ "error": self.to_string() }))).into_response()
    }
}

type Shared = State<Arc<Experiment>>;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateRequest {
    group: Option<Group>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BallotRequest {
    approved: Vec<String>,
    election_index: Option<usize>,
}

fn parse_body<T: DeserializeOwned + Default>(body: &[u8]) -> Result<T, ServiceError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ServiceError::Validation(e.to_string()))
}

/// Runs blocking store work (it fsyncs) off the async workers.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static,
) -> Result<T, ServiceError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ServiceError::Internal(e.to_string()))?
}

async fn create_session(State(exp): Shared, body: Bytes) -> Result<Response, ServiceError> {
    let req: CreateRequest = parse_body(&body)?;
    let record = blocking(move || exp.create_session(req.group, req.seed)).await?;
    Ok((StatusCode::CREATED, Json(Experiment::created_view(&record))).into_response())
}

async fn current(State(exp): Shared, Path(id): Path<String>) -> Result<Response, ServiceError> {
    Ok(Json(exp.current_election(&id)?).into_response())
}

async fn submit(State(exp): Shared, Path(id): Path<String>, body: Bytes) -> Result<Response, ServiceError> {
    let req: BallotRequest =
        serde_json::from_slice(&body).map_err(|e| ServiceError::Validation(e.to_string()))?;
    let outcome = blocking(move || exp.submit_ballot(&id, &req.approved, req.election_index)).await?;
    Ok(Json(outcome).into_response())
}

async fn summary(State(exp): Shared, Path(id): Path<String>) -> Result<Response, ServiceError> {
    Ok(Json(exp.session_summary(&id)?).into_response())
}

fn query_number<T: std::str::FromStr>(query: &HashMap<String, String>, key: &str) -> Result<Option<T>, ServiceError> {
    match query.get(key).map(|v| v.trim()).filter(|v| !v.is_empty()) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| ServiceError::Validation(format!("{key}={v:?} is not a nonnegative integer"))),
    }
}

async fn export(State(exp): Shared, Query(query): Query<HashMap<String, String>>) -> Result<Response, ServiceError> {
    let filter = ExportFilter {
        scenario: query.get("scenario").map(|s| s.trim().to_owned()).filter(|s| !s.is_empty()),
        k: query_number(&query, "k")?,
        n: query_number(&query, "n")?,
    };
    let csv = exp.export_log(&filter)?;
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], csv).into_response())
}

pub fn router(experiment: Arc<Experiment>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/current", get(current))
        .route("/sessions/{id}/ballot", post(submit))
        .route("/sessions/{id}/summary", get(summary))
        .route("/export", get(export))
        .with_state(experiment)
}

/// Serves until Ctrl-C.
pub async fn serve(experiment: Arc<Experiment>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(experiment))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
