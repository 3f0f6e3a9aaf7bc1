use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;

use crate::api::{AnimateRequest, CreateSessionRequest, DecomposeRequest, RefineRequest};
use crate::error::ApiError;
use crate::service::SessionService;

type Shared = Arc<SessionService>;

pub fn router(service: Shared) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/:id", get(get_session))
        .route("/sessions/:id/decompose", post(decompose))
        .route("/sessions/:id/refine", post(refine))
        .route("/sessions/:id/animate", post(animate))
        .route("/sessions/:id/preview", get(preview))
        .route("/sessions/:id/bundle", get(bundle))
        .fallback(not_found)
        .with_state(service)
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, crate::error::ErrorCode::InvalidRequest, "no such route")
}

fn body<T: DeserializeOwned>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ApiError::invalid_request(e.body_text()))
}

/// Runs a blocking service call off the async executor.
async fn blocking<T, F>(service: Shared, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&SessionService) -> Result<T, ApiError> + Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&service))
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

async fn create_session(
    State(service): State<Shared>,
    payload: Result<Json<CreateSessionRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    let req = body(payload)?;
    let view = blocking(service, move |s| s.create(&req.svg, &req.object_name)).await?;
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

async fn get_session(State(service): State<Shared>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let view = blocking(service, move |s| s.view(&id)).await?;
    Ok(Json(view).into_response())
}

async fn decompose(
    State(service): State<Shared>,
    Path(id): Path<String>,
    payload: Option<Json<DecomposeRequest>>,
) -> Result<Response, ApiError> {
    let req = payload.map(|Json(r)| r).unwrap_or_default();
    let out = blocking(service, move |s| s.decompose(&id, &req)).await?;
    Ok(Json(out).into_response())
}

async fn refine(
    State(service): State<Shared>,
    Path(id): Path<String>,
    payload: Result<Json<RefineRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    let req = body(payload)?;
    let out = blocking(service, move |s| s.refine(&id, &req.feedback)).await?;
    Ok(Json(out).into_response())
}

async fn animate(
    State(service): State<Shared>,
    Path(id): Path<String>,
    payload: Result<Json<AnimateRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    let req = body(payload)?;
    let out = blocking(service, move |s| s.animate(&id, &req)).await?;
    Ok(Json(out).into_response())
}

async fn preview(State(service): State<Shared>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let html = blocking(service, move |s| s.preview(&id)).await?;
    Ok(([(header::CACHE_CONTROL, "no-store")], Html(html)).into_response())
}

async fn bundle(State(service): State<Shared>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let out = blocking(service, move |s| s.export(&id)).await?;
    Ok(Json(out).into_response())
}
