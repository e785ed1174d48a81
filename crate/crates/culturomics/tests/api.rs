mod common;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use chrono::{TimeZone, Utc};
use common::taxonomy_dir;
use culturomics::api::{router, CurationSession};
use culturomics::core::retrieval::QueryConstraints;
use culturomics::core::taxonomy::{
    apply_edit, build_graph, connected_components, EditAction, EditLog, GraphEdit,
};
use culturomics::store::{read_edit_log, read_species_file};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn constraints() -> QueryConstraints {
    QueryConstraints::new(
        "english",
        Utc.with_ymd_and_hms(2019, 1, 1, 0, 0, 0).unwrap(),
        Utc.with_ymd_and_hms(2022, 1, 1, 0, 0, 0).unwrap(),
    )
    .unwrap()
}

fn app(species: &str, log_path: Option<std::path::PathBuf>) -> Router {
    let g = build_graph(&read_species_file(&taxonomy_dir().join(species)).unwrap()).unwrap();
    router(CurationSession::new(g, EditLog::new(), log_path, constraints()).unwrap())
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json");
    let req = match body {
        Some(b) => req.body(Body::from(b.to_string())).unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (
        status,
        serde_json::from_slice(&bytes).unwrap_or(Value::Null),
    )
}

fn component_with(components: &[Value], species: &str) -> usize {
    components
        .iter()
        .find(|c| {
            c["component"]["species"]
                .as_array()
                .unwrap()
                .iter()
                .any(|s| s == species)
        })
        .map(|c| c["component"]["id"].as_u64().unwrap() as usize)
        .unwrap()
}

#[tokio::test]
async fn prune_and_recluster_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("edits.jsonl");
    let app = app("carnivora.tsv", Some(log.clone()));

    let (s, before) = call(&app, "GET", "/api/v1/components", None).await;
    assert_eq!(s, StatusCode::OK);
    let n_before = before["count"].as_u64().unwrap();
    let mut details = Vec::new();
    for i in 0..n_before {
        details.push(
            call(&app, "GET", &format!("/api/v1/components/{i}"), None)
                .await
                .1,
        );
    }
    let lion = component_with(&details, "panthera leo");
    let lion_detail = &details[lion];
    let species: Vec<&str> = lion_detail["component"]["species"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap())
        .collect();
    assert!(species.contains(&"puma concolor") && species.contains(&"otaria byronia"));
    let edges = lion_detail["edges"].as_array().unwrap();
    assert!(edges
        .iter()
        .any(|e| e["a"] == "sub:lion" && e["b"] == "sub:sea lion"));
    assert_eq!(
        lion_detail["nodes"].as_array().unwrap().len(),
        lion_detail["component"]["node_ids"]
            .as_array()
            .unwrap()
            .len()
    );

    let edit =
        json!({"edit_kind": "remove_edge", "a": "sub:lion", "b": "sub:sea lion", "author": "t"});
    let (s, _) = call(&app, "POST", "/api/v1/edits", Some(edit)).await;
    assert_eq!(s, StatusCode::CREATED);
    // The listing only changes on recluster.
    assert_eq!(
        call(&app, "GET", "/api/v1/components", None).await.1["count"],
        n_before
    );
    let (s, after) = call(&app, "POST", "/api/v1/recluster", None).await;
    assert_eq!(s, StatusCode::OK);
    let n_after = after["count"].as_u64().unwrap();
    assert!(n_after > n_before);

    // Oracle: the same edit applied directly.
    let g =
        build_graph(&read_species_file(&taxonomy_dir().join("carnivora.tsv")).unwrap()).unwrap();
    let at = Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap();
    let direct = apply_edit(
        &g,
        &GraphEdit::new(
            EditAction::RemoveEdge {
                a: "sub:lion".into(),
                b: "sub:sea lion".into(),
            },
            at,
            "t",
        ),
    )
    .unwrap();
    assert_eq!(n_after as usize, connected_components(&direct).len());

    // The edit reached the log file.
    let saved = read_edit_log(&log).unwrap();
    assert_eq!(saved.len(), 1);
    assert_eq!(saved.replay(&g).unwrap(), direct);
}

#[tokio::test]
async fn rejections() {
    let app = app("carnivora.tsv", None);
    let (s, v) = call(
        &app,
        "POST",
        "/api/v1/edits",
        Some(json!({"edit_kind": "remove_node", "node": "sub:nope"})),
    )
    .await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["error"], "not_found");

    let (s, v) = call(
        &app,
        "POST",
        "/api/v1/edits",
        Some(json!({"edit_kind": "explode"})),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "malformed_edit");
    assert!(v["reason"].as_str().unwrap().len() > 3);

    let (s, v) = call(
        &app,
        "POST",
        "/api/v1/edits",
        Some(json!({"edit_kind": "merge_components", "a": "sub:lion", "b": "sub:lion"})),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "invalid_edit");

    let req = Request::builder()
        .method("POST")
        .uri("/api/v1/edits")
        .body(Body::from("{not json"))
        .unwrap();
    assert_eq!(
        app.clone().oneshot(req).await.unwrap().status(),
        StatusCode::BAD_REQUEST
    );

    assert_eq!(
        call(&app, "GET", "/api/v1/components/999", None).await.0,
        StatusCode::NOT_FOUND
    );
    assert_eq!(
        call(&app, "GET", "/api/v1/components/abc", None).await.0,
        StatusCode::NOT_FOUND
    );
    assert_eq!(
        call(&app, "GET", "/api/v1/taxa/unicorn/query", None)
            .await
            .0,
        StatusCode::NOT_FOUND
    );
    // Rejected edits do not enter the log.
    assert_eq!(
        call(&app, "POST", "/api/v1/recluster", None).await.1["edits"],
        0
    );
}

#[tokio::test]
async fn query_preview_and_export() {
    let app = app("mammals.tsv", None);
    for (a, b) in [
        ("sub:lion", "sub:sea lion"),
        ("common:mountain lion", "sub:lion"),
    ] {
        let (s, _) = call(
            &app,
            "POST",
            "/api/v1/edits",
            Some(json!({"edit_kind": "remove_edge", "a": a, "b": b})),
        )
        .await;
        assert_eq!(s, StatusCode::CREATED);
    }
    call(&app, "POST", "/api/v1/recluster", None).await;
    let (s, v) = call(&app, "GET", "/api/v1/taxa/lion/query", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["taxon"]["positive_keywords"], json!(["lion"]));
    let q = v["queries"][0].as_str().unwrap();
    assert!(q.starts_with("(\"lion\") AND NOT"), "{q}");
    assert!(q.contains("NOT \"sea lion\"") && q.ends_with("sourcelang:english"));

    let (s, v) = call(&app, "GET", "/api/v1/export", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["format_version"], 1);
    let ids: Vec<&str> = v["taxa"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["taxon_id"].as_str().unwrap())
        .collect();
    assert!(ids.contains(&"lion") && ids.contains(&"pangolin") && ids.contains(&"elephant"));
}
