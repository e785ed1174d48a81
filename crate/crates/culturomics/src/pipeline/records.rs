use culturomics_core::Timestamp;
use serde::{Deserialize, Serialize};

use crate::extraction::Provenance;

/// Funnel stages an article passes through, in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStage {
    Queried,
    Relevant,
    Scraped,
    Deduped,
    Analyzed,
}

/// One line of the stage log: an article reached `stage` with `status`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub taxon_id: String,
    pub url: String,
    pub stage: RecordStage,
    pub status: String,
    pub recorded_at: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalSummary {
    pub taxon_id: String,
    pub queries: Vec<String>,
    pub calls: usize,
    pub hits: usize,
    pub capped_windows: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapWarningRecord {
    pub taxon_id: String,
    pub window_start: Timestamp,
    pub window_end: Timestamp,
    pub returned: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedRecord {
    pub taxon_id: String,
    pub url: String,
    pub title: String,
    pub scores: Vec<f64>,
    pub relevant: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScrapedRecord {
    pub taxon_id: String,
    pub url: String,
    /// `ok` or `unavailable`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fetched_from: Option<Provenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extractor_id: Option<String>,
    #[serde(default)]
    pub char_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DedupRecord {
    pub taxon_id: String,
    pub url: String,
    pub published_at: Timestamp,
    pub is_original: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duplicate_of: Option<String>,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MentionRecord {
    pub taxon_id: String,
    /// `news` or `posts`.
    pub source: String,
    pub source_id: String,
    pub position: usize,
    pub published_at: Timestamp,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredMention {
    #[serde(flatten)]
    pub mention: MentionRecord,
    pub sentiment: f64,
}
