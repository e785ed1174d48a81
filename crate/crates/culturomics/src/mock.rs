//! In-process HTTP stand-ins for the news API, the classifier service and
//! web pages, used by tests and offline demos.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use culturomics_core::relevance::KeywordScorer;
use culturomics_core::retrieval::TimeWindow;
use tokio::sync::oneshot;

use crate::classifier::{ClassifyRequest, ClassifyResponse};
use crate::provider::{format_seendate, parse_datetime, ArtList, FixtureProvider, GdeltArticle};

/// A server on an ephemeral local port, stopped on drop.
pub struct MockServer {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<std::thread::JoinHandle<()>>,
}

impl MockServer {
    pub fn start(router: Router) -> std::io::Result<Self> {
        let listener = std::net::TcpListener::bind("127.0.0.1:0")?;
        listener.set_nonblocking(true)?;
        let addr = listener.local_addr()?;
        let (tx, rx) = oneshot::channel::<()>();
        let thread = std::thread::spawn(move || {
            let rt = tokio::runtime::Builder::new_multi_thread()
                .worker_threads(2)
                .enable_all()
                .build()
                .unwrap();
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(listener).unwrap();
                axum::serve(listener, router)
                    .with_graceful_shutdown(async {
                        let _ = rx.await;
                    })
                    .await
                    .unwrap();
            });
        });
        Ok(Self {
            addr,
            shutdown: Some(tx),
            thread: Some(thread),
        })
    }

    pub fn url(&self, path: &str) -> String {
        format!("http://{}{}", self.addr, path)
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

/// Request counter shared with a router.
#[derive(Debug, Clone, Default)]
pub struct Counter(Arc<AtomicUsize>);

impl Counter {
    pub fn get(&self) -> usize {
        self.0.load(Ordering::SeqCst)
    }

    pub fn bump(&self) {
        self.0.fetch_add(1, Ordering::SeqCst);
    }
}

/// `GET /api/v2/doc/doc` answering `artlist` queries from a store.
pub fn gdelt_router(store: FixtureProvider, calls: Counter) -> Router {
    async fn doc(
        State((store, calls)): State<(Arc<FixtureProvider>, Counter)>,
        Query(q): Query<BTreeMap<String, String>>,
    ) -> axum::response::Response {
        calls.bump();
        let param = |k: &str| q.get(k).cloned().unwrap_or_default();
        if param("mode") != "artlist" || param("format") != "json" {
            return (StatusCode::BAD_REQUEST, "unsupported mode").into_response();
        }
        let (Some(start), Some(end)) = (
            parse_datetime(&param("startdatetime")),
            parse_datetime(&param("enddatetime")),
        ) else {
            return (StatusCode::BAD_REQUEST, "bad datetime").into_response();
        };
        let max: usize = param("maxrecords").parse().unwrap_or(75);
        let window = TimeWindow::new(start, end + chrono::TimeDelta::seconds(1));
        let hits = match store.matching(&param("query"), window) {
            Ok(h) => h,
            Err(_) => {
                return (StatusCode::OK, "Your search contained an invalid term.").into_response()
            }
        };
        if hits.is_empty() {
            return Json(serde_json::json!({})).into_response();
        }
        let articles = hits
            .into_iter()
            .take(max)
            .map(|a| GdeltArticle {
                url: a.url.clone(),
                title: a.title.clone(),
                seendate: format_seendate(a.published_at),
                domain: a.domain.clone(),
                language: a.language.clone(),
                sourcecountry: a.country.clone().unwrap_or_default(),
            })
            .collect();
        Json(ArtList { articles }).into_response()
    }
    Router::new()
        .route("/api/v2/doc/doc", get(doc))
        .with_state((Arc::new(store), calls))
}

/// `POST /classify` served by the keyword scorer.
pub fn classify_router(scorer: KeywordScorer) -> Router {
    async fn classify(
        State(s): State<Arc<KeywordScorer>>,
        Json(req): Json<ClassifyRequest>,
    ) -> Json<ClassifyResponse> {
        Json(ClassifyResponse {
            scores: req.titles.iter().map(|t| s.score(t, &req.labels)).collect(),
        })
    }
    Router::new()
        .route("/classify", post(classify))
        .route("/health", get(|| async { "ok" }))
        .with_state(Arc::new(scorer))
}
