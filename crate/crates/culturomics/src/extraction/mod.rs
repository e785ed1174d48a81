//! Full text for relevant articles: live fetch, body extraction, archive
//! fallback, and a content-addressed cache so each URL is fetched once.

mod body;
mod fetch;

pub use body::{extract_body, ExtractedArticle, CASCADE, MIN_BODY_CHARS};
pub use fetch::{
    decode_html, FetchResult, FetchStatus, FixturePage, FixturePages, PageSource, Provenance,
    WebPages, WAYBACK_AVAILABILITY_ENDPOINT,
};

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use culturomics_core::Timestamp;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::store::{append_jsonl, read_jsonl, write_atomic};
use crate::{Error, Result};

/// One line of the cache index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub url: String,
    /// `ok` or `unavailable`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fetched_from: Option<Provenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extractor_id: Option<String>,
    /// Object path relative to the cache directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub char_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Extracted bodies stored under their SHA-256, indexed by URL in
/// `index.jsonl`. Failures are cached too.
#[derive(Debug)]
pub struct FullTextCache {
    dir: PathBuf,
    index: Mutex<HashMap<String, CacheEntry>>,
}

impl FullTextCache {
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(Error::io(dir))?;
        let mut index = HashMap::new();
        for e in read_jsonl::<CacheEntry>(&dir.join("index.jsonl"))? {
            index.insert(e.url.clone(), e);
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            index: Mutex::new(index),
        })
    }

    pub fn get(&self, url: &str) -> Option<CacheEntry> {
        self.index.lock().unwrap().get(url).cloned()
    }

    pub fn len(&self) -> usize {
        self.index.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn object_path(&self, entry: &CacheEntry) -> Option<PathBuf> {
        entry.path.as_ref().map(|p| self.dir.join(p))
    }

    pub fn read_text(&self, entry: &CacheEntry) -> Result<String> {
        let path = self
            .object_path(entry)
            .ok_or_else(|| Error::FullTextUnavailable {
                url: entry.url.clone(),
                reason: entry.reason.clone().unwrap_or_default(),
            })?;
        fs::read_to_string(&path).map_err(Error::io(path))
    }

    fn record(&self, entry: CacheEntry) -> Result<()> {
        let mut index = self.index.lock().unwrap();
        append_jsonl(&self.dir.join("index.jsonl"), [&entry])?;
        index.insert(entry.url.clone(), entry);
        Ok(())
    }

    pub fn put_ok(&self, article: &ExtractedArticle, from: Provenance) -> Result<CacheEntry> {
        let digest = hex::encode(Sha256::digest(article.body_text.as_bytes()));
        let rel = format!("objects/{}/{}.txt", &digest[..2], digest);
        let path = self.dir.join(&rel);
        if !path.exists() {
            write_atomic(&path, article.body_text.as_bytes())?;
        }
        let entry = CacheEntry {
            url: article.url.clone(),
            status: "ok".into(),
            fetched_from: Some(from),
            extractor_id: Some(article.extractor_id.clone()),
            path: Some(rel),
            char_count: article.char_count,
            reason: None,
        };
        self.record(entry.clone())?;
        Ok(entry)
    }

    pub fn put_unavailable(&self, url: &str, reason: &str) -> Result<CacheEntry> {
        let entry = CacheEntry {
            url: url.into(),
            status: "unavailable".into(),
            fetched_from: None,
            extractor_id: None,
            path: None,
            char_count: 0,
            reason: Some(reason.into()),
        };
        self.record(entry.clone())?;
        Ok(entry)
    }
}

/// A successfully obtained body and where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullText {
    pub article: ExtractedArticle,
    pub fetched_from: Provenance,
}

fn describe(r: &FetchResult) -> String {
    match &r.status {
        FetchStatus::Ok => "extraction failed".into(),
        FetchStatus::HttpError { code } => format!("http {code}"),
        FetchStatus::NetworkError { reason } => format!("network: {reason}"),
        FetchStatus::NotHtml { content_type } => format!("not html: {content_type}"),
    }
}

fn try_extract(r: &FetchResult) -> Option<ExtractedArticle> {
    r.html.as_deref().and_then(|h| extract_body(&r.url, h).ok())
}

/// Live fetch and extract, else archive snapshot and extract. Results,
/// failures included, are cached by URL.
pub fn get_full_text<P: PageSource + ?Sized>(
    pages: &P,
    cache: &FullTextCache,
    url: &str,
    published_at: Option<Timestamp>,
) -> Result<FullText> {
    if let Some(entry) = cache.get(url) {
        if entry.status == "ok" {
            let body_text = cache.read_text(&entry)?;
            return Ok(FullText {
                article: ExtractedArticle {
                    url: url.into(),
                    char_count: body_text.chars().count(),
                    body_text,
                    extractor_id: entry.extractor_id.unwrap_or_default(),
                },
                fetched_from: entry.fetched_from.unwrap_or(Provenance::Live),
            });
        }
        return Err(Error::FullTextUnavailable {
            url: url.into(),
            reason: entry.reason.unwrap_or_default(),
        });
    }
    let live = pages.fetch_html(url);
    let (article, from, reasons) = match try_extract(&live) {
        Some(a) => (Some(a), Provenance::Live, String::new()),
        None => {
            let archived = pages.archive_fallback(url, published_at);
            let reasons = format!("live {}; archive {}", describe(&live), describe(&archived));
            (try_extract(&archived), Provenance::Archive, reasons)
        }
    };
    match article {
        Some(article) => {
            cache.put_ok(&article, from)?;
            Ok(FullText {
                article,
                fetched_from: from,
            })
        }
        None => {
            cache.put_unavailable(url, &reasons)?;
            Err(Error::FullTextUnavailable {
                url: url.into(),
                reason: reasons,
            })
        }
    }
}
