//! The publish/discover HTTP surface over an [`AnnotationStore`].
//!
//! Endpoints:
//! - `POST /annotations` stores a JSON-LD annotation document
//! - `GET /annotations/{id}` negotiates JSON-LD, Turtle, or TriG
//! - `GET /annotations?target=&tag=&author=&since=&limit=&offset=`
//! - `DELETE /annotations/{id}` tombstones
//!
//! Every error response is a JSON object `{error, detail}`; validation
//! failures add a `violations` array.

use std::future::Future;
use std::sync::Arc;

use axum::extract::{Path as UrlPath, RawQuery, Request, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use chrono::{DateTime, Utc};
use oa_core::{
    from_document, to_document, to_graph, write_trig, write_turtle, Annotation, AnnotationStore,
    DocumentError, GraphError, Iri, QueryFilter, StoreError, StoredAnnotation, Violation,
};
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::ServiceConfig;

pub const MEDIA_LD_JSON: &str = "application/ld+json";
pub const MEDIA_TURTLE: &str = "text/turtle";
pub const MEDIA_TRIG: &str = "application/trig";

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<AnnotationStore>,
    pub cfg: Arc<ServiceConfig>,
}

#[derive(Debug, Error)]
pub enum ServeError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

fn error_response(status: StatusCode, code: &str, detail: impl Into<String>) -> Response {
    let body = json!({ "error": code, "detail": detail.into() });
    json_response(status, &body)
}

fn violation_response(code: &str, detail: impl Into<String>, violations: &[Violation]) -> Response {
    let list: Vec<Value> = violations
        .iter()
        .map(|v| json!({ "path": v.path, "message": v.message }))
        .collect();
    let body = json!({ "error": code, "detail": detail.into(), "violations": list });
    json_response(StatusCode::BAD_REQUEST, &body)
}

fn json_response(status: StatusCode, body: &Value) -> Response {
    let mut text = serde_json::to_string_pretty(body).expect("json value serializes");
    text.push('\n');
    (
        status,
        [(
            header::CONTENT_TYPE,
            HeaderValue::from_static("application/json"),
        )],
        text,
    )
        .into_response()
}

fn store_error_response(e: StoreError) -> Response {
    match e {
        StoreError::InvalidAnnotation(v) => {
            violation_response("InvalidAnnotation", "annotation failed validation", &v)
        }
        StoreError::IdAlreadyAssigned => error_response(
            StatusCode::BAD_REQUEST,
            "IdAlreadyAssigned",
            "posted documents must not carry an @id; the store assigns one",
        ),
        StoreError::NotFound(id) => error_response(
            StatusCode::NOT_FOUND,
            "NotFound",
            format!("no annotation {id}"),
        ),
        StoreError::Gone(id) => error_response(
            StatusCode::GONE,
            "Gone",
            format!("annotation {id} has been deleted"),
        ),
        StoreError::InvalidFilter(msg) => {
            error_response(StatusCode::BAD_REQUEST, "InvalidFilter", msg)
        }
        StoreError::StorageFailure(msg) => {
            error_response(StatusCode::INTERNAL_SERVER_ERROR, "StorageFailure", msg)
        }
    }
}

fn document_error_response(e: DocumentError) -> Response {
    match e {
        DocumentError::InvalidAnnotation(v) => {
            violation_response("InvalidAnnotation", "annotation failed validation", &v)
        }
        DocumentError::MissingTarget => error_response(
            StatusCode::BAD_REQUEST,
            "MissingTarget",
            "document has no hasTarget",
        ),
        e @ DocumentError::UnknownType { .. } => {
            error_response(StatusCode::BAD_REQUEST, "UnknownType", e.to_string())
        }
        e @ DocumentError::MalformedNode { .. } => {
            error_response(StatusCode::BAD_REQUEST, "MalformedNode", e.to_string())
        }
    }
}

/// The formats `GET /annotations/{id}` can negotiate, in preference order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    LdJson,
    Turtle,
    Trig,
}

impl Format {
    pub fn media_type(self) -> &'static str {
        match self {
            Format::LdJson => MEDIA_LD_JSON,
            Format::Turtle => MEDIA_TURTLE,
            Format::Trig => MEDIA_TRIG,
        }
    }
}

/// One `Accept` list entry: a (possibly wildcarded) range and its weight
/// in thousandths.
struct AcceptEntry {
    kind: String,
    subkind: String,
    q: u16,
}

fn parse_accept(header: &str) -> Vec<AcceptEntry> {
    let mut entries = Vec::new();
    for part in header.split(',') {
        let mut pieces = part.split(';');
        let range = pieces.next().unwrap_or("").trim();
        if range.is_empty() {
            continue;
        }
        let (kind, subkind) = match range.split_once('/') {
            Some((k, s)) => (k.trim(), s.trim()),
            None if range == "*" => ("*", "*"),
            None => continue,
        };
        let mut q = 1000;
        for param in pieces {
            let Some((key, value)) = param.split_once('=') else {
                continue;
            };
            if key.trim().eq_ignore_ascii_case("q") {
                if let Ok(parsed) = value.trim().parse::<f32>() {
                    if (0.0..=1.0).contains(&parsed) {
                        q = (parsed * 1000.0).round() as u16;
                    }
                }
            }
        }
        entries.push(AcceptEntry {
            kind: kind.to_ascii_lowercase(),
            subkind: subkind.to_ascii_lowercase(),
            q,
        });
    }
    entries
}

/// Weight the header assigns to `format`: the q of the most specific
/// matching range, or None when nothing matches.
fn accept_weight(entries: &[AcceptEntry], format: Format) -> Option<u16> {
    let (kind, subkind) = format
        .media_type()
        .split_once('/')
        .expect("media types contain a slash");
    let mut best: Option<(u8, u16)> = None;
    for e in entries {
        let specificity = if e.kind == kind && e.subkind == subkind {
            2
        } else if e.kind == kind && e.subkind == "*" {
            1
        } else if e.kind == "*" && e.subkind == "*" {
            0
        } else {
            continue;
        };
        if best.is_none_or(|(s, q)| specificity > s || (specificity == s && e.q > q)) {
            best = Some((specificity, e.q));
        }
    }
    best.map(|(_, q)| q)
}

/// Picks the response format for an `Accept` header, or None for 406.
/// Ties go to the earlier of JSON-LD, Turtle, TriG; no header means JSON-LD.
pub fn negotiate_format(accept: Option<&str>) -> Option<Format> {
    let header = match accept {
        None => return Some(Format::LdJson),
        Some(h) if h.trim().is_empty() => return Some(Format::LdJson),
        Some(h) => h,
    };
    let entries = parse_accept(header);
    let mut chosen: Option<(Format, u16)> = None;
    for format in [Format::LdJson, Format::Turtle, Format::Trig] {
        if let Some(q) = accept_weight(&entries, format) {
            if q > 0 && chosen.is_none_or(|(_, best)| q > best) {
                chosen = Some((format, q));
            }
        }
    }
    chosen.map(|(f, _)| f)
}

#[allow(clippy::result_large_err)]
fn annotation_id(state: &AppState, raw: &str) -> Result<Iri, Response> {
    Iri::new(format!("{}/annotations/{raw}", state.cfg.base_uri)).map_err(|_| {
        error_response(
            StatusCode::NOT_FOUND,
            "NotFound",
            format!("{raw:?} does not name an annotation"),
        )
    })
}

fn document_body(state: &AppState, a: &Annotation, status: StatusCode) -> Response {
    match to_document(a, &state.cfg.vocabulary) {
        Ok(doc) => {
            let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
            text.push('\n');
            (
                status,
                [(
                    header::CONTENT_TYPE,
                    HeaderValue::from_static(MEDIA_LD_JSON),
                )],
                text,
            )
                .into_response()
        }
        Err(e) => error_response(
            StatusCode::INTERNAL_SERVER_ERROR,
            "SerializationFailure",
            e.to_string(),
        ),
    }
}

fn graph_body(state: &AppState, a: &Annotation, format: Format) -> Response {
    let graphs = match to_graph(a, &state.cfg.vocabulary) {
        Ok(g) => g,
        Err(e) => {
            return error_response(
                StatusCode::INTERNAL_SERVER_ERROR,
                "SerializationFailure",
                e.to_string(),
            )
        }
    };
    match format {
        Format::Trig => (
            StatusCode::OK,
            [(header::CONTENT_TYPE, HeaderValue::from_static(MEDIA_TRIG))],
            write_trig(&graphs),
        )
            .into_response(),
        Format::Turtle => {
            if graphs.len() > 1 {
                return error_response(
                    StatusCode::NOT_ACCEPTABLE,
                    "NotAcceptable",
                    "this annotation embeds named graphs; request application/trig",
                );
            }
            match write_turtle(&graphs[0]) {
                Ok(text) => (
                    StatusCode::OK,
                    [(header::CONTENT_TYPE, HeaderValue::from_static(MEDIA_TURTLE))],
                    text,
                )
                    .into_response(),
                Err(e @ GraphError::NamedGraphInTurtle)
                | Err(e @ GraphError::InvalidAnnotation(_)) => error_response(
                    StatusCode::INTERNAL_SERVER_ERROR,
                    "SerializationFailure",
                    e.to_string(),
                ),
            }
        }
        Format::LdJson => document_body(state, a, StatusCode::OK),
    }
}

async fn create_annotation(State(state): State<AppState>, req: Request) -> Response {
    let (parts, body) = req.into_parts();
    let content_type = parts
        .headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .map(|v| {
            v.split(';')
                .next()
                .unwrap_or("")
                .trim()
                .to_ascii_lowercase()
        });
    if content_type.as_deref() != Some(MEDIA_LD_JSON) {
        return error_response(
            StatusCode::UNSUPPORTED_MEDIA_TYPE,
            "UnsupportedMediaType",
            format!("POST bodies must be {MEDIA_LD_JSON}"),
        );
    }

    let max = state.cfg.max_body_bytes;
    let declared = parts
        .headers
        .get(header::CONTENT_LENGTH)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.parse::<usize>().ok());
    if declared.is_some_and(|n| n > max) {
        return error_response(
            StatusCode::PAYLOAD_TOO_LARGE,
            "PayloadTooLarge",
            format!("bodies are limited to {max} bytes"),
        );
    }
    let bytes = match axum::body::to_bytes(body, max).await {
        Ok(b) => b,
        Err(_) => {
            return error_response(
                StatusCode::PAYLOAD_TOO_LARGE,
                "PayloadTooLarge",
                format!("bodies are limited to {max} bytes"),
            )
        }
    };

    let doc: Value = match serde_json::from_slice(&bytes) {
        Ok(v) => v,
        Err(e) => {
            return error_response(
                StatusCode::BAD_REQUEST,
                "ParseError",
                format!("body is not JSON: {e}"),
            )
        }
    };
    let annotation = match from_document(&doc, &state.cfg.vocabulary) {
        Ok(a) => a,
        Err(e) => return document_error_response(e),
    };

    let store = Arc::clone(&state.store);
    let put = tokio::task::spawn_blocking(move || {
        let id = store.put(annotation)?;
        store.get(&id).map(|a| (id, a))
    })
    .await;
    let (id, stored) = match put {
        Ok(Ok(pair)) => pair,
        Ok(Err(e)) => return store_error_response(e),
        Err(e) => {
            return error_response(
                StatusCode::INTERNAL_SERVER_ERROR,
                "StorageFailure",
                e.to_string(),
            )
        }
    };

    let mut response = document_body(&state, &stored, StatusCode::CREATED);
    if let Ok(value) = HeaderValue::from_str(id.as_str()) {
        response.headers_mut().insert(header::LOCATION, value);
    }
    response
}

async fn read_annotation(
    State(state): State<AppState>,
    UrlPath(raw): UrlPath<String>,
    headers: HeaderMap,
) -> Response {
    let mut response = read_annotation_inner(&state, &raw, &headers);
    response
        .headers_mut()
        .insert(header::VARY, HeaderValue::from_static("Accept"));
    response
}

fn read_annotation_inner(state: &AppState, raw: &str, headers: &HeaderMap) -> Response {
    let id = match annotation_id(state, raw) {
        Ok(id) => id,
        Err(resp) => return resp,
    };
    let accept = headers.get(header::ACCEPT).and_then(|v| v.to_str().ok());
    let Some(format) = negotiate_format(accept) else {
        return error_response(
            StatusCode::NOT_ACCEPTABLE,
            "NotAcceptable",
            format!("supported formats: {MEDIA_LD_JSON}, {MEDIA_TURTLE}, {MEDIA_TRIG}"),
        );
    };
    let annotation = match state.store.get(&id) {
        Ok(a) => a,
        Err(e) => return store_error_response(e),
    };
    match format {
        Format::LdJson => document_body(state, &annotation, StatusCode::OK),
        other => graph_body(state, &annotation, other),
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct QueryParams {
    target: Option<String>,
    tag: Option<String>,
    author: Option<String>,
    since: Option<String>,
    limit: Option<String>,
    offset: Option<String>,
}

#[allow(clippy::result_large_err)]
fn parse_filter(raw: Option<&str>) -> Result<QueryFilter, Response> {
    let params: QueryParams = match raw {
        None => QueryParams::default(),
        Some(q) => serde_urlencoded::from_str(q).map_err(|e| {
            error_response(
                StatusCode::BAD_REQUEST,
                "InvalidParameter",
                format!("unrecognized query string: {e}"),
            )
        })?,
    };
    let invalid = |key: &str, reason: String| {
        error_response(
            StatusCode::BAD_REQUEST,
            "InvalidParameter",
            format!("{key}: {reason}"),
        )
    };

    let mut filter = QueryFilter::default();
    if let Some(raw) = params.target {
        filter.target_source = Some(Iri::new(&raw).map_err(|e| invalid("target", e.to_string()))?);
    }
    if let Some(raw) = params.tag {
        filter.tag_concept = Some(Iri::new(&raw).map_err(|e| invalid("tag", e.to_string()))?);
    }
    filter.author = params.author;
    if let Some(raw) = params.since {
        let parsed = DateTime::parse_from_rfc3339(&raw)
            .map_err(|e| invalid("since", format!("not an RFC 3339 timestamp: {e}")))?;
        filter.since = Some(parsed.with_timezone(&Utc));
    }
    if let Some(raw) = params.limit {
        filter.limit = raw
            .parse()
            .map_err(|_| invalid("limit", format!("{raw:?} is not a number")))?;
    }
    if let Some(raw) = params.offset {
        filter.offset = raw
            .parse()
            .map_err(|_| invalid("offset", format!("{raw:?} is not a number")))?;
    }
    Ok(filter)
}

fn collection_document(state: &AppState, total: usize, items: &[StoredAnnotation]) -> Response {
    let mut docs = Vec::with_capacity(items.len());
    for stored in items {
        match to_document(&stored.annotation, &state.cfg.vocabulary) {
            Ok(doc) => docs.push(doc),
            Err(e) => {
                return error_response(
                    StatusCode::INTERNAL_SERVER_ERROR,
                    "SerializationFailure",
                    e.to_string(),
                )
            }
        }
    }
    let body = json!({ "total": total, "items": docs });
    let mut text = serde_json::to_string_pretty(&body).expect("collection serializes");
    text.push('\n');
    (
        StatusCode::OK,
        [(
            header::CONTENT_TYPE,
            HeaderValue::from_static(MEDIA_LD_JSON),
        )],
        text,
    )
        .into_response()
}

async fn query_annotations(State(state): State<AppState>, RawQuery(raw): RawQuery) -> Response {
    let filter = match parse_filter(raw.as_deref()) {
        Ok(f) => f,
        Err(resp) => return resp,
    };
    match state.store.query(&filter) {
        Ok(page) => collection_document(&state, page.total, &page.items),
        Err(e) => store_error_response(e),
    }
}

async fn delete_annotation(
    State(state): State<AppState>,
    UrlPath(raw): UrlPath<String>,
) -> Response {
    let id = match annotation_id(&state, &raw) {
        Ok(id) => id,
        Err(resp) => return resp,
    };
    let store = Arc::clone(&state.store);
    let outcome = tokio::task::spawn_blocking(move || store.delete(&id)).await;
    match outcome {
        Ok(Ok(())) => StatusCode::NO_CONTENT.into_response(),
        Ok(Err(e)) => store_error_response(e),
        Err(e) => error_response(
            StatusCode::INTERNAL_SERVER_ERROR,
            "StorageFailure",
            e.to_string(),
        ),
    }
}

async fn not_found_fallback() -> Response {
    error_response(StatusCode::NOT_FOUND, "NotFound", "no such route")
}

async fn method_fallback() -> Response {
    error_response(
        StatusCode::METHOD_NOT_ALLOWED,
        "MethodNotAllowed",
        "this route does not support that method",
    )
}

pub fn router(store: Arc<AnnotationStore>, cfg: Arc<ServiceConfig>) -> Router {
    let state = AppState { store, cfg };
    Router::new()
        .route(
            "/annotations",
            get(query_annotations).post(create_annotation),
        )
        .route(
            "/annotations/{id}",
            get(read_annotation).delete(delete_annotation),
        )
        .fallback(not_found_fallback)
        .method_not_allowed_fallback(method_fallback)
        .with_state(state)
}

pub fn open_store(cfg: &ServiceConfig) -> Result<Arc<AnnotationStore>, ServeError> {
    Ok(Arc::new(AnnotationStore::open(
        &cfg.store_path,
        &cfg.base_uri,
    )?))
}

async fn shutdown_signal() {
    let interrupt = tokio::signal::ctrl_c();
    #[cfg(unix)]
    {
        let mut term = tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate())
            .expect("terminate signal is installable");
        tokio::select! {
            _ = interrupt => {}
            _ = term.recv() => {}
        }
    }
    #[cfg(not(unix))]
    {
        let _ = interrupt.await;
    }
}

/// Serves on an already-bound listener until `shutdown` completes;
/// in-flight requests finish before return.
pub async fn serve_with_listener(
    listener: tokio::net::TcpListener,
    cfg: ServiceConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServeError> {
    let store = open_store(&cfg)?;
    let app = router(store, Arc::new(cfg));
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown)
        .await?;
    Ok(())
}

/// Binds `cfg.bind` and serves until SIGINT/SIGTERM.
pub async fn serve(cfg: ServiceConfig) -> Result<(), ServeError> {
    let listener = tokio::net::TcpListener::bind(&cfg.bind).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    serve_with_listener(listener, cfg, shutdown_signal()).await
}

/// Runs the service on a fresh runtime; the synchronous entry point for
/// the CLI.
pub fn run_blocking(cfg: ServiceConfig) -> Result<(), ServeError> {
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    runtime.block_on(serve(cfg))
}
