//! Curation HTTP API under `/api/v1`.
//!
//! Edits are applied to the working graph as they arrive and appended to
//! the session log. The component listing only changes on `POST /recluster`,
//! which recomputes it from `replay(base, log)`.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use culturomics_core::retrieval::{split_queries, QueryConstraints};
use culturomics_core::taxonomy::{
    connected_components, derive_taxa, Component, Edge, EditLog, GraphEdit, NameGraph, Node,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::store::{append_edit, TaxonomyFile};

/// State of one curation session.
#[derive(Debug)]
pub struct CurationSession {
    base: NameGraph,
    log: EditLog,
    working: NameGraph,
    clustered: NameGraph,
    components: Vec<Component>,
    log_path: Option<PathBuf>,
    constraints: QueryConstraints,
}

impl CurationSession {
    /// Start from `base` with an existing log already replayed. When
    /// `log_path` is set every accepted edit is appended to it.
    pub fn new(
        base: NameGraph,
        log: EditLog,
        log_path: Option<PathBuf>,
        constraints: QueryConstraints,
    ) -> crate::Result<Self> {
        let working = log.replay(&base)?;
        let components = connected_components(&working);
        Ok(Self {
            base,
            log,
            clustered: working.clone(),
            working,
            components,
            log_path,
            constraints,
        })
    }

    pub fn edit_count(&self) -> usize {
        self.log.len()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    fn apply(&mut self, edit: GraphEdit) -> crate::Result<()> {
        let next = self.log.apply(&self.working, edit.clone())?;
        if let Some(p) = &self.log_path {
            if let Err(e) = append_edit(p, &edit) {
                // Keep memory and disk in step.
                self.log = self.log.edits()[..self.log.len() - 1]
                    .iter()
                    .cloned()
                    .collect();
                return Err(e);
            }
        }
        self.working = next;
        Ok(())
    }

    fn recluster(&mut self) -> crate::Result<()> {
        let g = self.log.replay(&self.base)?;
        self.components = connected_components(&g);
        self.working = g.clone();
        self.clustered = g;
        Ok(())
    }
}

type Shared = Arc<Mutex<CurationSession>>;

#[derive(Serialize)]
struct ComponentSummary<'a> {
    id: usize,
    display_name: &'a str,
    size: usize,
    species: usize,
    names: usize,
    substrings: usize,
}

#[derive(Serialize)]
struct Listing<'a> {
    edits: usize,
    count: usize,
    components: Vec<ComponentSummary<'a>>,
}

fn listing(s: &CurationSession) -> Value {
    let l = Listing {
        edits: s.log.len(),
        count: s.components.len(),
        components: s
            .components
            .iter()
            .map(|c| ComponentSummary {
                id: c.id,
                display_name: &c.display_name,
                size: c.size(),
                species: c.species.len(),
                names: c.names.len(),
                substrings: c.substrings.len(),
            })
            .collect(),
    };
    serde_json::to_value(l).unwrap_or(Value::Null)
}

fn reject(status: StatusCode, error: &str, reason: impl Into<String>) -> Response {
    (
        status,
        Json(json!({ "error": error, "reason": reason.into() })),
    )
        .into_response()
}

fn core_reject(e: crate::Error) -> Response {
    use culturomics_core::Error as C;
    match e {
        crate::Error::Core(C::EditTargetNotFound(id)) => reject(
            StatusCode::NOT_FOUND,
            "not_found",
            format!("no node or edge {id}"),
        ),
        crate::Error::Core(c) => reject(StatusCode::BAD_REQUEST, "invalid_edit", c.to_string()),
        other => reject(
            StatusCode::INTERNAL_SERVER_ERROR,
            "internal",
            other.to_string(),
        ),
    }
}

async fn list_components(State(s): State<Shared>) -> Json<Value> {
    Json(listing(&s.lock().unwrap()))
}

async fn component(State(s): State<Shared>, Path(id): Path<String>) -> Response {
    let s = s.lock().unwrap();
    let Some(c) = id.parse::<usize>().ok().and_then(|i| s.components.get(i)) else {
        return reject(
            StatusCode::NOT_FOUND,
            "not_found",
            format!("no component {id}"),
        );
    };
    let nodes: Vec<&Node> = c
        .node_ids
        .iter()
        .filter_map(|n| s.clustered.node(n))
        .collect();
    let members: std::collections::BTreeSet<&str> = c.node_ids.iter().map(String::as_str).collect();
    let edges: Vec<Edge> = s
        .clustered
        .edges()
        .filter(|e| members.contains(e.a.as_str()))
        .collect();
    Json(json!({ "component": c, "nodes": nodes, "edges": edges })).into_response()
}

async fn post_edit(State(s): State<Shared>, body: Bytes) -> Response {
    let mut v: Value = match serde_json::from_slice(&body) {
        Ok(v) => v,
        Err(e) => return reject(StatusCode::BAD_REQUEST, "malformed_edit", e.to_string()),
    };
    if let Some(obj) = v.as_object_mut() {
        obj.entry("timestamp").or_insert_with(|| json!(Utc::now()));
    }
    let edit: GraphEdit = match serde_json::from_value(v) {
        Ok(e) => e,
        Err(e) => return reject(StatusCode::BAD_REQUEST, "malformed_edit", e.to_string()),
    };
    let mut s = s.lock().unwrap();
    match s.apply(edit.clone()) {
        Ok(()) => (
            StatusCode::CREATED,
            Json(json!({ "accepted": edit, "edits": s.log.len() })),
        )
            .into_response(),
        Err(e) => core_reject(e),
    }
}

async fn recluster(State(s): State<Shared>) -> Response {
    let mut s = s.lock().unwrap();
    match s.recluster() {
        Ok(()) => Json(listing(&s)).into_response(),
        Err(e) => core_reject(e),
    }
}

async fn taxon_query(State(s): State<Shared>, Path(id): Path<String>) -> Response {
    let s = s.lock().unwrap();
    let Some(taxon) = derive_taxa(&s.clustered)
        .into_iter()
        .find(|t| t.taxon_id == id)
    else {
        return reject(StatusCode::NOT_FOUND, "not_found", format!("no taxon {id}"));
    };
    match split_queries(&taxon, &s.constraints) {
        Ok(queries) => Json(json!({ "taxon": taxon, "queries": queries })).into_response(),
        Err(e) => reject(StatusCode::UNPROCESSABLE_ENTITY, "query", e.to_string()),
    }
}

async fn export(State(s): State<Shared>) -> Json<TaxonomyFile> {
    let s = s.lock().unwrap();
    Json(TaxonomyFile::new(derive_taxa(&s.clustered)))
}

/// The `/api/v1` routes over a shared session.
pub fn router(session: CurationSession) -> Router {
    let api = Router::new()
        .route("/components", get(list_components))
        .route("/components/{id}", get(component))
        .route("/edits", post(post_edit))
        .route("/recluster", post(recluster))
        .route("/taxa/{id}/query", get(taxon_query))
        .route("/export", get(export))
        .with_state(Arc::new(Mutex::new(session)));
    Router::new().nest("/api/v1", api)
}

/// Serve until ctrl-c.
pub async fn serve(session: CurationSession, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "curation api listening");
    axum::serve(listener, router(session))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
