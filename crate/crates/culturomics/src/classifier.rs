//! Title classifier backends: the built-in keyword scorer and a client for
//! a remote service speaking the `POST /classify` contract.

use culturomics_core::relevance::{KeywordScorer, TopicClassifier};
use serde::{Deserialize, Serialize};

use crate::http::HttpClient;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyRequest {
    pub titles: Vec<String>,
    pub labels: Vec<String>,
    pub multi_label: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyResponse {
    pub scores: Vec<Vec<f64>>,
}

/// Client for a classification service. Transport failures and non-2xx
/// answers are `BackendUnavailable`; shape is checked by the caller
/// (`classify_titles`).
#[derive(Debug, Clone)]
pub struct RemoteClassifier {
    client: HttpClient,
    endpoint: String,
}

impl RemoteClassifier {
    /// `base_url` is the service root; requests go to `{base_url}/classify`.
    pub fn new(client: HttpClient, base_url: &str) -> Self {
        Self {
            client,
            endpoint: format!("{}/classify", base_url.trim_end_matches('/')),
        }
    }
}

impl TopicClassifier for RemoteClassifier {
    type Error = Error;

    fn classify(&self, titles: &[String], labels: &[String]) -> Result<Vec<Vec<f64>>> {
        let req = ClassifyRequest {
            titles: titles.to_vec(),
            labels: labels.to_vec(),
            multi_label: true,
        };
        let resp = self
            .client
            .post_json(&self.endpoint, &req)
            .map_err(|e| Error::BackendUnavailable(format!("{}: {e}", self.endpoint)))?;
        if !resp.is_success() {
            return Err(Error::BackendUnavailable(format!(
                "{}: HTTP {}",
                self.endpoint, resp.status
            )));
        }
        let raw = String::from_utf8_lossy(&resp.body);
        let parsed: ClassifyResponse = serde_json::from_str(&raw).map_err(|e| Error::Parse {
            reason: e.to_string(),
            raw: raw.to_string(),
        })?;
        Ok(parsed.scores)
    }
}

/// Backend selected by configuration.
#[derive(Debug, Clone)]
pub enum Backend {
    Fallback(KeywordScorer),
    Remote(RemoteClassifier),
}

impl Backend {
    pub fn id(&self) -> String {
        match self {
            Backend::Fallback(s) => format!("fallback-keywords-{}", s.version()),
            Backend::Remote(r) => format!("remote:{}", r.endpoint),
        }
    }
}

impl TopicClassifier for Backend {
    type Error = Error;

    fn classify(&self, titles: &[String], labels: &[String]) -> Result<Vec<Vec<f64>>> {
        match self {
            Backend::Fallback(s) => Ok(titles.iter().map(|t| s.score(t, labels)).collect()),
            Backend::Remote(r) => r.classify(titles, labels),
        }
    }
}
