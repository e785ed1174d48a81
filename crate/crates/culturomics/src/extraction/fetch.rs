//! Page fetching: live HTTP with limits, web-archive snapshot lookup, and
//! a fixture directory standing in for both.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use culturomics_core::Timestamp;
use serde::{Deserialize, Serialize};

use crate::http::{HttpClient, HttpError, HttpResponse};
use crate::store::read_jsonl;
use crate::Result;

pub const WAYBACK_AVAILABILITY_ENDPOINT: &str = "https://archive.org/wayback/available";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FetchStatus {
    Ok,
    HttpError { code: u16 },
    NetworkError { reason: String },
    NotHtml { content_type: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Live,
    Archive,
}

/// Outcome of one page fetch. `html` is present exactly when the status
/// is `Ok`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchResult {
    pub url: String,
    pub status: FetchStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub html: Option<String>,
    pub fetched_from: Provenance,
}

impl FetchResult {
    pub fn ok(url: &str, html: String, fetched_from: Provenance) -> Self {
        Self {
            url: url.into(),
            status: FetchStatus::Ok,
            html: Some(html),
            fetched_from,
        }
    }

    pub fn failed(url: &str, status: FetchStatus, fetched_from: Provenance) -> Self {
        debug_assert!(status != FetchStatus::Ok);
        Self {
            url: url.into(),
            status,
            html: None,
            fetched_from,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == FetchStatus::Ok
    }
}

/// Where article HTML comes from.
pub trait PageSource: Sync {
    fn fetch_html(&self, url: &str) -> FetchResult;

    /// Closest archived snapshot of `url`, near `around` when given.
    fn archive_fallback(&self, url: &str, around: Option<Timestamp>) -> FetchResult;
}

fn meta_charset(head: &[u8]) -> Option<String> {
    let text = String::from_utf8_lossy(head).to_ascii_lowercase();
    let at = text.find("charset=")? + "charset=".len();
    let rest = text[at..].trim_start_matches(['"', '\'', ' ']);
    let end = rest
        .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-' || c == '_'))
        .unwrap_or(rest.len());
    Some(rest[..end].to_string()).filter(|s| !s.is_empty())
}

/// Decode with the header charset, else a `<meta>` charset in the first
/// kilobyte, else UTF-8. Undecodable bytes become U+FFFD.
pub fn decode_html(body: &[u8], header_charset: Option<&str>) -> String {
    let label = header_charset
        .map(String::from)
        .or_else(|| meta_charset(&body[..body.len().min(1024)]));
    let encoding = label
        .and_then(|l| encoding_rs::Encoding::for_label(l.as_bytes()))
        .unwrap_or(encoding_rs::UTF_8);
    let (text, _, _) = encoding.decode(body);
    text.into_owned()
}

fn from_response(
    url: &str,
    resp: Result<HttpResponse, HttpError>,
    from: Provenance,
) -> FetchResult {
    let resp = match resp {
        Ok(r) => r,
        Err(e) => {
            return FetchResult::failed(
                url,
                FetchStatus::NetworkError {
                    reason: e.to_string(),
                },
                from,
            )
        }
    };
    if !resp.is_success() {
        return FetchResult::failed(url, FetchStatus::HttpError { code: resp.status }, from);
    }
    match resp.media_type().as_deref() {
        Some("text/html") | Some("application/xhtml+xml") => FetchResult::ok(
            url,
            decode_html(&resp.body, resp.charset().as_deref()),
            from,
        ),
        other => FetchResult::failed(
            url,
            FetchStatus::NotHtml {
                content_type: other.unwrap_or("").into(),
            },
            from,
        ),
    }
}

#[derive(Debug, Deserialize)]
struct Availability {
    #[serde(default)]
    archived_snapshots: Snapshots,
}

#[derive(Debug, Default, Deserialize)]
struct Snapshots {
    closest: Option<Snapshot>,
}

#[derive(Debug, Deserialize)]
struct Snapshot {
    #[serde(default = "yes")]
    available: bool,
    url: String,
}

fn yes() -> bool {
    true
}

/// Live web plus the archive availability API.
#[derive(Debug, Clone)]
pub struct WebPages {
    client: HttpClient,
    archive_endpoint: String,
}

impl WebPages {
    pub fn new(client: HttpClient, archive_endpoint: impl Into<String>) -> Self {
        Self {
            client,
            archive_endpoint: archive_endpoint.into(),
        }
    }

    fn availability_url(
        &self,
        url: &str,
        around: Option<Timestamp>,
    ) -> std::result::Result<String, String> {
        let mut u = url::Url::parse(&self.archive_endpoint).map_err(|e| e.to_string())?;
        u.query_pairs_mut().append_pair("url", url);
        if let Some(t) = around {
            u.query_pairs_mut()
                .append_pair("timestamp", &t.format("%Y%m%d%H%M%S").to_string());
        }
        Ok(u.into())
    }
}

impl PageSource for WebPages {
    fn fetch_html(&self, url: &str) -> FetchResult {
        from_response(url, self.client.get(url), Provenance::Live)
    }

    fn archive_fallback(&self, url: &str, around: Option<Timestamp>) -> FetchResult {
        let from = Provenance::Archive;
        let net =
            |reason: String| FetchResult::failed(url, FetchStatus::NetworkError { reason }, from);
        let lookup = match self.availability_url(url, around) {
            Ok(u) => u,
            Err(e) => return net(e),
        };
        let resp = match self.client.get(&lookup) {
            Ok(r) if r.is_success() => r,
            Ok(r) => {
                return FetchResult::failed(url, FetchStatus::HttpError { code: r.status }, from)
            }
            Err(e) => return net(e.to_string()),
        };
        let snapshot = serde_json::from_slice::<Availability>(&resp.body)
            .ok()
            .and_then(|a| a.archived_snapshots.closest)
            .filter(|s| s.available && !s.url.is_empty());
        match snapshot {
            Some(s) => {
                let mut r = from_response(url, self.client.get(&s.url), from);
                r.url = url.to_string();
                r
            }
            None => FetchResult::failed(url, FetchStatus::HttpError { code: 404 }, from),
        }
    }
}

/// One page of a fixture directory index (`index.jsonl`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixturePage {
    pub url: String,
    /// HTTP status of the live page; absent means the host is unreachable.
    #[serde(default)]
    pub live_status: Option<u16>,
    #[serde(default)]
    pub live_file: Option<String>,
    #[serde(default)]
    pub content_type: Option<String>,
    #[serde(default)]
    pub archive_file: Option<String>,
}

/// Pages served from files, for offline runs.
#[derive(Debug, Clone)]
pub struct FixturePages {
    dir: PathBuf,
    pages: HashMap<String, FixturePage>,
}

impl FixturePages {
    pub fn open(dir: &Path) -> Result<Self> {
        let pages = read_jsonl::<FixturePage>(&dir.join("index.jsonl"))?
            .into_iter()
            .map(|p| (p.url.clone(), p))
            .collect();
        Ok(Self {
            dir: dir.to_path_buf(),
            pages,
        })
    }

    fn read(&self, file: &str) -> std::io::Result<Vec<u8>> {
        fs::read(self.dir.join(file))
    }
}

impl PageSource for FixturePages {
    fn fetch_html(&self, url: &str) -> FetchResult {
        let from = Provenance::Live;
        let Some(page) = self.pages.get(url) else {
            return FetchResult::failed(
                url,
                FetchStatus::NetworkError {
                    reason: "unknown host".into(),
                },
                from,
            );
        };
        let Some(status) = page.live_status else {
            return FetchResult::failed(
                url,
                FetchStatus::NetworkError {
                    reason: "connection refused".into(),
                },
                from,
            );
        };
        if !(200..300).contains(&status) {
            return FetchResult::failed(url, FetchStatus::HttpError { code: status }, from);
        }
        let ct = page.content_type.as_deref().unwrap_or("text/html");
        if !ct.starts_with("text/html") {
            return FetchResult::failed(
                url,
                FetchStatus::NotHtml {
                    content_type: ct.into(),
                },
                from,
            );
        }
        match page.live_file.as_deref().map(|f| self.read(f)) {
            Some(Ok(bytes)) => FetchResult::ok(url, decode_html(&bytes, None), from),
            Some(Err(e)) => FetchResult::failed(
                url,
                FetchStatus::NetworkError {
                    reason: e.to_string(),
                },
                from,
            ),
            None => FetchResult::failed(url, FetchStatus::HttpError { code: 204 }, from),
        }
    }

    fn archive_fallback(&self, url: &str, _around: Option<Timestamp>) -> FetchResult {
        let from = Provenance::Archive;
        match self
            .pages
            .get(url)
            .and_then(|p| p.archive_file.as_deref())
            .map(|f| self.read(f))
        {
            Some(Ok(bytes)) => FetchResult::ok(url, decode_html(&bytes, None), from),
            Some(Err(e)) => FetchResult::failed(
                url,
                FetchStatus::NetworkError {
                    reason: e.to_string(),
                },
                from,
            ),
            None => FetchResult::failed(url, FetchStatus::HttpError { code: 404 }, from),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charset_sniffing() {
        let latin1 = b"<html><head><meta charset=\"iso-8859-1\"></head><body>caf\xe9</body></html>";
        assert!(decode_html(latin1, None).contains("café"));
        let meta =
            b"<meta http-equiv='Content-Type' content='text/html; charset=windows-1252'>\x93hi\x94";
        assert!(decode_html(meta, None).contains("\u{201c}hi\u{201d}"));
        assert!(decode_html("café".as_bytes(), None).contains("café"));
        assert!(decode_html(b"caf\xe9", Some("latin1")).contains("café"));
    }
}
