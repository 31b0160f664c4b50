use std::sync::Arc;

use axum::body::{to_bytes, Body, Bytes};
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;

use super::{service_openapi, Service, ServiceError};
use crate::diagnostic::Diagnostic;
use crate::document::{Format, MAX_DOCUMENT_BYTES};
use crate::engine::SuppressionScope;

type Shared = State<Arc<Service>>;

#[derive(Serialize)]
struct Problem<'a> {
    title: &'a str,
    status: u16,
    detail: String,
    #[serde(skip_serializing_if = "<[Diagnostic]>::is_empty")]
    diagnostics: &'a [Diagnostic],
}

fn problem(status: StatusCode, detail: String, diagnostics: &[Diagnostic]) -> Response {
    let body = Problem {
        title: status.canonical_reason().unwrap_or("Error"),
        status: status.as_u16(),
        detail,
        diagnostics,
    };
    (
        status,
        [(header::CONTENT_TYPE, "application/problem+json")],
        serde_json::to_vec(&body).expect("problem serializes"),
    )
        .into_response()
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::UnknownInstance(_)
            | ServiceError::UnknownRule(_)
            | ServiceError::UnknownKey(_)
            | ServiceError::UnknownIgnore(_) => StatusCode::NOT_FOUND,
            ServiceError::Duplicate(_) => StatusCode::CONFLICT,
            ServiceError::Document(_) if self.is_too_large() => StatusCode::PAYLOAD_TOO_LARGE,
            ServiceError::Document(_) | ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::State { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let diagnostics = match &self {
            ServiceError::Document(d) => d.as_slice(),
            _ => &[],
        };
        problem(status, self.to_string(), diagnostics)
    }
}

fn created<T: Serialize>(location: String, body: &T) -> Response {
    (StatusCode::CREATED, [(header::LOCATION, location)], Json(body)).into_response()
}

fn json_body<T: for<'de> Deserialize<'de>>(bytes: &Bytes) -> Result<T, ServiceError> {
    serde_json::from_slice(bytes).map_err(|e| ServiceError::BadRequest(e.to_string()))
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static,
) -> Result<T, ServiceError> {
    tokio::task::spawn_blocking(f)
        .await
        .unwrap_or_else(|e| Err(ServiceError::BadRequest(format!("request failed: {e}"))))
}

/// Routes of the governance API over a shared [`Service`].
pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/instances", post(create_instance).layer(DefaultBodyLimit::disable()))
        .route("/instances/{instance_id}", get(get_instance).delete(delete_instance))
        .route("/instances/{instance_id}/violations", get(list_violations))
        .route("/instances/{instance_id}/rules", get(list_rules))
        .route("/instances/{instance_id}/rules/{rule_id}", put(set_rule_state))
        .route("/instances/{instance_id}/ignores", get(list_ignores).post(create_ignore))
        .route(
            "/instances/{instance_id}/ignores/{ignore_id}",
            get(get_ignore).delete(delete_ignore),
        )
        .route("/openapi.json", get(openapi))
        .route("/healthz", get(health))
        .with_state(service)
}

/// Serves until Ctrl-C.
pub async fn serve(service: Arc<Service>, listener: TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router(service))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[derive(Deserialize)]
struct CreateQuery {
    source_name: Option<String>,
}

fn format_hint(headers: &HeaderMap) -> Option<Format> {
    let content_type = headers.get(header::CONTENT_TYPE)?.to_str().ok()?.to_ascii_lowercase();
    if content_type.contains("json") {
        Some(Format::Json)
    } else if content_type.contains("yaml") || content_type.contains("yml") {
        Some(Format::Yaml)
    } else {
        None
    }
}

async fn create_instance(
    State(service): Shared,
    Query(query): Query<CreateQuery>,
    headers: HeaderMap,
    body: Body,
) -> Result<Response, ServiceError> {
    let Ok(bytes) = to_bytes(body, MAX_DOCUMENT_BYTES).await else {
        return Ok(problem(
            StatusCode::PAYLOAD_TOO_LARGE,
            format!("the body could not be read within the {MAX_DOCUMENT_BYTES} byte limit"),
            &[],
        ));
    };
    let hint = format_hint(&headers);
    let name = query.source_name.unwrap_or_else(|| "upload".into());
    let summary = blocking(move || service.create_instance(&name, &bytes, hint)).await?;
    Ok(created(format!("/instances/{}", summary.instance_id), &summary))
}

async fn get_instance(State(service): Shared, Path(id): Path<String>) -> Result<Response, ServiceError> {
    Ok(Json(service.details(&id)?).into_response())
}

async fn delete_instance(State(service): Shared, Path(id): Path<String>) -> Result<StatusCode, ServiceError> {
    service.delete_instance(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn list_violations(State(service): Shared, Path(id): Path<String>) -> Result<Response, ServiceError> {
    let json = blocking(move || service.violations_json(&id)).await?;
    Ok(([(header::CONTENT_TYPE, "application/json")], json.as_str().to_owned()).into_response())
}

async fn list_rules(State(service): Shared, Path(id): Path<String>) -> Result<Response, ServiceError> {
    Ok(Json(service.rules(&id)?).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleToggle {
    enabled: bool,
}

async fn set_rule_state(
    State(service): Shared,
    Path((id, rule_id)): Path<(String, String)>,
    body: Bytes,
) -> Result<Response, ServiceError> {
    let toggle: RuleToggle = json_body(&body)?;
    Ok(Json(service.set_rule_enabled(&id, &rule_id, toggle.enabled)?).into_response())
}

async fn list_ignores(State(service): Shared, Path(id): Path<String>) -> Result<Response, ServiceError> {
    Ok(Json(service.ignores(&id)?).into_response())
}

async fn create_ignore(State(service): Shared, Path(id): Path<String>, body: Bytes) -> Result<Response, ServiceError> {
    let scope: SuppressionScope = json_body(&body)?;
    let entry = service.add_ignore(&id, scope)?;
    Ok(created(format!("/instances/{id}/ignores/{}", entry.ignore_id), &entry))
}

async fn get_ignore(
    State(service): Shared,
    Path((id, ignore_id)): Path<(String, String)>,
) -> Result<Response, ServiceError> {
    Ok(Json(service.ignore(&id, &ignore_id)?).into_response())
}

async fn delete_ignore(
    State(service): Shared,
    Path((id, ignore_id)): Path<(String, String)>,
) -> Result<StatusCode, ServiceError> {
    service.delete_ignore(&id, &ignore_id)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn openapi() -> Response {
    Json(service_openapi()).into_response()
}

#[derive(Serialize)]
struct Health {
    status: &'static str,
    instance_count: usize,
}

async fn health(State(service): Shared) -> Response {
    Json(Health {
        status: "ok",
        instance_count: service.instance_ids().len(),
    })
    .into_response()
}
