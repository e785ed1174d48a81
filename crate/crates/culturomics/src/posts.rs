//! Social-media post archives (one JSON record per line).

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use culturomics_core::retrieval::PostRecord;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PostIngest {
    pub records: Vec<PostRecord>,
    pub rejected: Vec<RejectedLine>,
}

impl PostIngest {
    pub fn error_count(&self) -> usize {
        self.rejected.len()
    }
}

#[derive(Deserialize)]
struct RawPost {
    post_id: String,
    text: String,
    published_at: culturomics_core::Timestamp,
    #[serde(default)]
    geo: Option<culturomics_core::retrieval::GeoPoint>,
    #[serde(default)]
    taxon_id: String,
}

/// Parse an archive. Malformed, invalid and repeated-id lines are counted
/// and skipped; only an unreadable file is an error.
pub fn ingest_post_archive(path: &Path) -> Result<PostIngest> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    Ok(parse_post_archive(&text))
}

pub fn parse_post_archive(text: &str) -> PostIngest {
    let mut out = PostIngest::default();
    let mut ids = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let reject = |reason: String| RejectedLine {
            line: i + 1,
            reason,
        };
        let raw: RawPost = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => {
                out.rejected.push(reject(e.to_string()));
                continue;
            }
        };
        let rec = PostRecord {
            post_id: raw.post_id,
            text: raw.text,
            published_at: raw.published_at,
            geo: raw.geo,
            taxon_id: raw.taxon_id,
        };
        if let Err(reason) = rec.validate() {
            out.rejected.push(reject(reason));
        } else if !ids.insert(rec.post_id.clone()) {
            out.rejected
                .push(reject(format!("duplicate post_id {}", rec.post_id)));
        } else {
            out.records.push(rec);
        }
    }
    out
}
