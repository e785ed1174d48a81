//! Blocking HTTP with politeness: per-host token buckets, bounded
//! redirects, body size and time limits, and retry with exponential
//! backoff on transient failures.

use std::collections::HashMap;
use std::io::Read;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use ureq::ResponseExt;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HttpConfig {
    pub user_agent: String,
    pub timeout_secs: f64,
    pub max_body_bytes: u64,
    pub max_redirects: u32,
    /// Sustained request rate per host; 0 disables limiting.
    pub requests_per_second: f64,
    pub max_attempts: u32,
    pub backoff_base_ms: u64,
}

impl Default for HttpConfig {
    fn default() -> Self {
        Self {
            user_agent: concat!(
                "culturomics/",
                env!("CARGO_PKG_VERSION"),
                " (research crawler)"
            )
            .into(),
            timeout_secs: 30.0,
            max_body_bytes: 5 * 1024 * 1024,
            max_redirects: 10,
            requests_per_second: 1.0,
            max_attempts: 4,
            backoff_base_ms: 500,
        }
    }
}

/// Token bucket per host, capacity one request.
#[derive(Debug)]
pub struct RateLimiter {
    interval: Option<Duration>,
    next_slot: Mutex<HashMap<String, Instant>>,
}

impl RateLimiter {
    pub fn new(requests_per_second: f64) -> Self {
        let interval =
            (requests_per_second > 0.0).then(|| Duration::from_secs_f64(1.0 / requests_per_second));
        Self {
            interval,
            next_slot: Mutex::new(HashMap::new()),
        }
    }

    /// Block until `host` may be contacted again.
    pub fn acquire(&self, host: &str) {
        let Some(interval) = self.interval else {
            return;
        };
        let wait = {
            let mut slots = self.next_slot.lock().unwrap();
            let now = Instant::now();
            let slot = slots.entry(host.to_string()).or_insert(now);
            let start = (*slot).max(now);
            *slot = start + interval;
            start - now
        };
        if !wait.is_zero() {
            std::thread::sleep(wait);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub content_type: Option<String>,
    pub final_url: String,
    pub body: Vec<u8>,
}

impl HttpResponse {
    pub fn is_success(&self) -> bool {
        (200..300).contains(&self.status)
    }

    /// Media type without parameters, lowercased.
    pub fn media_type(&self) -> Option<String> {
        self.content_type.as_deref().map(|c| {
            c.split(';')
                .next()
                .unwrap_or("")
                .trim()
                .to_ascii_lowercase()
        })
    }

    /// The `charset` parameter of the content type, if any.
    pub fn charset(&self) -> Option<String> {
        let ct = self.content_type.as_deref()?;
        ct.split(';').skip(1).find_map(|p| {
            let (k, v) = p.split_once('=')?;
            k.trim()
                .eq_ignore_ascii_case("charset")
                .then(|| v.trim().trim_matches('"').to_string())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HttpError {
    #[error("invalid url {0}")]
    InvalidUrl(String),
    #[error("timed out")]
    Timeout,
    #[error("body exceeds {0} bytes")]
    TooLarge(u64),
    #[error("too many redirects")]
    TooManyRedirects,
    #[error("network: {0}")]
    Network(String),
}

impl HttpError {
    fn is_transient(&self) -> bool {
        matches!(self, HttpError::Timeout | HttpError::Network(_))
    }
}

fn is_transient_status(status: u16) -> bool {
    status == 429 || (500..600).contains(&status)
}

/// Shareable client; clones share the agent and the rate limiter.
#[derive(Clone)]
pub struct HttpClient {
    agent: ureq::Agent,
    config: HttpConfig,
    limiter: Arc<RateLimiter>,
}

impl std::fmt::Debug for HttpClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpClient")
            .field("config", &self.config)
            .finish()
    }
}

impl HttpClient {
    pub fn new(config: HttpConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .max_redirects(config.max_redirects)
            .max_redirects_will_error(true)
            .timeout_global(Some(Duration::from_secs_f64(config.timeout_secs)))
            .user_agent(config.user_agent.as_str())
            .build()
            .into();
        let limiter = Arc::new(RateLimiter::new(config.requests_per_second));
        Self {
            agent,
            config,
            limiter,
        }
    }

    pub fn config(&self) -> &HttpConfig {
        &self.config
    }

    fn host_of(url: &str) -> Result<String, HttpError> {
        let parsed = url::Url::parse(url).map_err(|_| HttpError::InvalidUrl(url.into()))?;
        if !matches!(parsed.scheme(), "http" | "https") {
            return Err(HttpError::InvalidUrl(url.into()));
        }
        let host = parsed
            .host_str()
            .ok_or_else(|| HttpError::InvalidUrl(url.into()))?;
        Ok(match parsed.port() {
            Some(p) => format!("{host}:{p}"),
            None => host.to_string(),
        })
    }

    fn finish(
        &self,
        result: Result<ureq::http::Response<ureq::Body>, ureq::Error>,
    ) -> Result<HttpResponse, HttpError> {
        let mut resp = result.map_err(map_error)?;
        let status = resp.status().as_u16();
        let content_type = resp
            .headers()
            .get("content-type")
            .and_then(|v| v.to_str().ok())
            .map(String::from);
        let final_url = resp.get_uri().to_string();
        let limit = self.config.max_body_bytes;
        let mut body = Vec::new();
        resp.body_mut()
            .as_reader()
            .take(limit + 1)
            .read_to_end(&mut body)
            .map_err(|e| map_error(ureq::Error::Io(e)))?;
        if body.len() as u64 > limit {
            return Err(HttpError::TooLarge(limit));
        }
        Ok(HttpResponse {
            status,
            content_type,
            final_url,
            body,
        })
    }

    /// One rate-limited GET. HTTP error statuses are responses, not errors.
    pub fn get_once(&self, url: &str) -> Result<HttpResponse, HttpError> {
        self.limiter.acquire(&Self::host_of(url)?);
        self.finish(self.agent.get(url).call())
    }

    /// GET, retrying timeouts, connection failures, 429 and 5xx with
    /// exponential backoff. The last response or error is returned when
    /// attempts run out.
    pub fn get(&self, url: &str) -> Result<HttpResponse, HttpError> {
        self.with_retry(|| self.get_once(url))
    }

    /// POST a JSON body, with the same retry policy as [`HttpClient::get`].
    pub fn post_json<T: Serialize>(&self, url: &str, body: &T) -> Result<HttpResponse, HttpError> {
        let host = Self::host_of(url)?;
        let payload = serde_json::to_vec(body).expect("serializable body");
        self.with_retry(|| {
            self.limiter.acquire(&host);
            self.finish(
                self.agent
                    .post(url)
                    .content_type("application/json")
                    .send(&payload[..]),
            )
        })
    }

    fn with_retry(
        &self,
        mut call: impl FnMut() -> Result<HttpResponse, HttpError>,
    ) -> Result<HttpResponse, HttpError> {
        let attempts = self.config.max_attempts.max(1);
        let mut attempt = 1;
        loop {
            let result = call();
            let transient = match &result {
                Ok(r) => is_transient_status(r.status),
                Err(e) => e.is_transient(),
            };
            if !transient || attempt >= attempts {
                return result;
            }
            let backoff = self
                .config
                .backoff_base_ms
                .saturating_mul(1 << (attempt - 1).min(10));
            tracing::debug!(attempt, backoff_ms = backoff, "retrying transient failure");
            std::thread::sleep(Duration::from_millis(backoff));
            attempt += 1;
        }
    }
}

fn map_error(e: ureq::Error) -> HttpError {
    match e {
        ureq::Error::Timeout(_) => HttpError::Timeout,
        ureq::Error::BodyExceedsLimit(n) => HttpError::TooLarge(n),
        ureq::Error::TooManyRedirects => HttpError::TooManyRedirects,
        ureq::Error::BadUri(u) => HttpError::InvalidUrl(u),
        ureq::Error::Io(io) if io.kind() == std::io::ErrorKind::TimedOut => HttpError::Timeout,
        other => HttpError::Network(other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limiter_spaces_requests_per_host() {
        let l = RateLimiter::new(20.0);
        let t = Instant::now();
        for _ in 0..3 {
            l.acquire("a");
        }
        l.acquire("b");
        let e = t.elapsed();
        assert!(
            e >= Duration::from_millis(95) && e < Duration::from_millis(400),
            "{e:?}"
        );
        let t = Instant::now();
        RateLimiter::new(0.0).acquire("a");
        assert!(t.elapsed() < Duration::from_millis(5));
    }

    #[test]
    fn content_type_parts() {
        let r = HttpResponse {
            status: 200,
            content_type: Some("Text/HTML; Charset=\"ISO-8859-1\"".into()),
            final_url: String::new(),
            body: vec![],
        };
        assert_eq!(r.media_type().as_deref(), Some("text/html"));
        assert_eq!(r.charset().as_deref(), Some("ISO-8859-1"));
    }

    #[test]
    fn rejects_non_http_urls() {
        let c = HttpClient::new(HttpConfig::default());
        assert!(matches!(c.get("ftp://x/y"), Err(HttpError::InvalidUrl(_))));
        assert!(matches!(c.get("not a url"), Err(HttpError::InvalidUrl(_))));
    }
}
