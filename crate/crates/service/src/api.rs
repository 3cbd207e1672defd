//! JSON/XML HTTP routes.

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, RawQuery, State};
use axum::http::{header, HeaderMap, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use fsn_core::nav::{combine_focus, expand, resolve_sector, table_to_pie, PieModel};
use fsn_core::ontology::{ClassDef, Edit, Individual, PropertyDef, RemoveMode, Value};
use fsn_core::query::{evaluate, parse_query, QueryAst, ResultTable};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::json;

use crate::error::ApiError;
use crate::piedoc::{export_pie_document, import_pie_document};
use crate::state::{AppState, CommitError, Snapshot};

pub const ACTOR_HEADER: &str = "x-actor";
pub const EXPECTED_REVISION_HEADER: &str = "x-expected-revision";

type ApiResult<T> = Result<T, ApiError>;
type Shared = State<Arc<AppState>>;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/model/root", get(model_root))
        .route("/api/model/expand", post(model_expand))
        .route("/api/model/focus", post(model_focus))
        .route("/api/kb", get(kb_snapshot))
        .route("/api/kb/class", post(define_class))
        .route("/api/kb/property", post(define_property))
        .route("/api/kb/individual", post(assert_individual))
        .route("/api/kb/individual/{*iri}", delete(remove_individual))
        .route("/api/kb/assertion", post(set_assertion).put(set_assertion).delete(remove_assertion))
        .route("/api/query", post(run_query))
        .route("/api/templates", get(list_templates))
        .route("/api/templates/{id}/run", post(run_template))
        .route("/api/export/piechart", get(export_piechart))
        .route("/api/import/piechart", post(import_piechart))
        .route("/api/fsn/summary", get(fsn_summary))
        .route("/api/fsn/edges", get(fsn_edges))
        .fallback(|uri: Uri| async move { ApiError::not_found(uri.path()) })
        .with_state(state)
}

fn body<T: DeserializeOwned>(bytes: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::malformed(e.to_string()))
}

fn actor(headers: &HeaderMap) -> String {
    headers
        .get(ACTOR_HEADER)
        .and_then(|v| v.to_str().ok())
        .filter(|v| !v.is_empty())
        .unwrap_or("anonymous")
        .to_string()
}

fn expected_revision(headers: &HeaderMap) -> ApiResult<Option<u64>> {
    headers
        .get(EXPECTED_REVISION_HEADER)
        .map(|v| {
            v.to_str()
                .ok()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| ApiError::malformed(format!("{EXPECTED_REVISION_HEADER} must be a revision number")))
        })
        .transpose()
}

async fn commit(state: Arc<AppState>, headers: &HeaderMap, edit: Edit) -> ApiResult<Json<serde_json::Value>> {
    let actor = actor(headers);
    let expected = expected_revision(headers)?;
    let revision = tokio::task::spawn_blocking(move || state.commit(edit, &actor, expected))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
        .map_err(|e| match e {
            CommitError::Conflict { expected, actual } => ApiError::conflict(expected, actual),
            CommitError::Rejected(err) => err.into(),
            CommitError::Io(err) => ApiError::internal(err.to_string()),
        })?;
    Ok(Json(json!({ "revision": revision })))
}

// ---- navigation ----

async fn model_root(State(state): Shared) -> Json<PieModel> {
    let model = state.snapshot().root_model();
    state.set_model(model.clone());
    Json(model)
}

#[derive(Deserialize)]
struct ExpandBody {
    sector_id: String,
    #[serde(default)]
    order_property: Option<String>,
}

async fn model_expand(State(state): Shared, bytes: Bytes) -> ApiResult<Response> {
    let req: ExpandBody = body(&bytes)?;
    let snap = state.snapshot();
    let sector = resolve_sector(&snap.kb, &req.sector_id)?;
    let expanded = expand(&snap.kb, &sector, req.order_property.as_deref())?;
    let wrapped = snap.colorize(PieModel {
        root: expanded,
        focus_tags: Vec::new(),
        revision: snap.revision(),
        empty: false,
    });
    let current = state.model();
    if current.revision == snap.revision() && current.sector(&req.sector_id).is_some() {
        let mut patched = (*current).clone();
        if let Some(s) = patched.root.find_mut(&req.sector_id) {
            s.children = wrapped.root.children.clone();
            s.expandable = wrapped.root.expandable;
        }
        state.set_model(patched);
    }
    Ok(Json(wrapped.root).into_response())
}

#[derive(Deserialize)]
struct FocusBody {
    tags: Vec<String>,
    #[serde(default)]
    order_property: Option<String>,
}

async fn model_focus(State(state): Shared, bytes: Bytes) -> ApiResult<Json<PieModel>> {
    let req: FocusBody = body(&bytes)?;
    let snap = state.snapshot();
    let model = snap.colorize(combine_focus(&snap.kb, &req.tags, req.order_property.as_deref())?);
    state.set_model(model.clone());
    Ok(Json(model))
}

// ---- knowledge base ----

async fn kb_snapshot(State(state): Shared) -> Response {
    Json(state.snapshot().kb.clone()).into_response()
}

async fn define_class(State(state): Shared, headers: HeaderMap, bytes: Bytes) -> ApiResult<Json<serde_json::Value>> {
    let def: ClassDef = body(&bytes)?;
    commit(state, &headers, Edit::DefineClass(def)).await
}

async fn define_property(
    State(state): Shared,
    headers: HeaderMap,
    bytes: Bytes,
) -> ApiResult<Json<serde_json::Value>> {
    let def: PropertyDef = body(&bytes)?;
    commit(state, &headers, Edit::DefineProperty(def)).await
}

async fn assert_individual(
    State(state): Shared,
    headers: HeaderMap,
    bytes: Bytes,
) -> ApiResult<Json<serde_json::Value>> {
    let ind: Individual = body(&bytes)?;
    commit(state, &headers, Edit::AssertIndividual(ind)).await
}

#[derive(Deserialize)]
struct AssertionBody {
    subject: String,
    property: String,
    object: Value,
}

async fn set_assertion(State(state): Shared, headers: HeaderMap, bytes: Bytes) -> ApiResult<Json<serde_json::Value>> {
    let a: AssertionBody = body(&bytes)?;
    let edit = Edit::SetPropertyValue {
        subject: a.subject,
        property: a.property,
        object: a.object,
    };
    commit(state, &headers, edit).await
}

async fn remove_assertion(
    State(state): Shared,
    headers: HeaderMap,
    bytes: Bytes,
) -> ApiResult<Json<serde_json::Value>> {
    let a: AssertionBody = body(&bytes)?;
    let edit = Edit::RemovePropertyValue {
        subject: a.subject,
        property: a.property,
        object: a.object,
    };
    commit(state, &headers, edit).await
}

async fn remove_individual(
    State(state): Shared,
    headers: HeaderMap,
    Path(iri): Path<String>,
    RawQuery(query): RawQuery,
) -> ApiResult<Json<serde_json::Value>> {
    let mut mode = RemoveMode::default();
    for pair in query.as_deref().unwrap_or("").split('&').filter(|p| !p.is_empty()) {
        mode = match pair {
            "mode=splice" => RemoveMode::Splice,
            "mode=cascade" => RemoveMode::Cascade,
            _ => return Err(ApiError::malformed(format!("unknown query parameter `{pair}`"))),
        };
    }
    commit(state, &headers, Edit::RemoveIndividual { iri, mode }).await
}

// ---- queries ----

fn answer(state: &AppState, snap: &Snapshot, ast: &QueryAst) -> ApiResult<Json<serde_json::Value>> {
    let table: ResultTable = evaluate(ast, &snap.kb)?;
    let model = snap.colorize(table_to_pie(&table, snap.revision()));
    state.set_model(model.clone());
    Ok(Json(json!({ "revision": snap.revision(), "table": table, "model": model })))
}

#[derive(Deserialize)]
struct QueryBody {
    sparql: String,
}

async fn run_query(State(state): Shared, bytes: Bytes) -> ApiResult<Json<serde_json::Value>> {
    let req: QueryBody = body(&bytes)?;
    let snap = state.snapshot();
    let ast = parse_query(&req.sparql)?;
    answer(&state, &snap, &ast)
}

async fn list_templates(State(state): Shared) -> Json<serde_json::Value> {
    let snap = state.snapshot();
    let list: Vec<serde_json::Value> = snap
        .templates
        .list()
        .map(|t| {
            json!({
                "id": t.id,
                "description": t.description,
                "params": t.params,
                "skeleton": t.skeleton.to_string(),
            })
        })
        .collect();
    Json(json!(list))
}

#[derive(Deserialize)]
struct RunBody {
    #[serde(default)]
    bindings: BTreeMap<String, String>,
}

async fn run_template(State(state): Shared, Path(id): Path<String>, bytes: Bytes) -> ApiResult<Json<serde_json::Value>> {
    let req: RunBody = body(&bytes)?;
    let snap = state.snapshot();
    let ast = snap.templates.instantiate(&id, &req.bindings, &snap.kb)?;
    answer(&state, &snap, &ast)
}

// ---- documents ----

async fn export_piechart(State(state): Shared) -> Response {
    let bytes = export_pie_document(&state.model());
    ([(header::CONTENT_TYPE, "application/xml; charset=utf-8")], bytes).into_response()
}

async fn import_piechart(State(state): Shared, bytes: Bytes) -> ApiResult<Json<PieModel>> {
    let doc = import_pie_document(&bytes)?;
    let snap = state.snapshot();
    let model = snap.colorize(doc.to_model(snap.revision()));
    state.set_model(model.clone());
    Ok(Json(model))
}

// ---- FSN ----

async fn fsn_summary(State(state): Shared) -> Json<serde_json::Value> {
    let snap = state.snapshot();
    let fsn = &snap.fsn;
    Json(json!({
        "theta": fsn.theta(),
        "tags": fsn.tags().len(),
        "links": fsn.link_count(),
        "strain": fsn.network_strain_summary(),
        "unit_cells": fsn.unit_cells(),
    }))
}

async fn fsn_edges(State(state): Shared) -> Response {
    let text = state.snapshot().fsn.to_edge_list();
    (StatusCode::OK, [(header::CONTENT_TYPE, "text/tab-separated-values; charset=utf-8")], text).into_response()
}
