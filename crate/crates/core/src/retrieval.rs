//! Keyword query compilation and cap-aware window slicing over a news
//! search provider.
//!
//! Providers return at most `max_records_per_call` hits per query window.
//! [`adaptive_slice`] bisects any window that comes back full until every
//! leaf is under the cap or has shrunk to the minimum width.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use chrono::TimeDelta;
use serde::{Deserialize, Serialize};

use crate::taxonomy::FolkTaxon;
use crate::{Error, Result, Timestamp};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryConstraints {
    pub language: String,
    pub start: Timestamp,
    pub end: Timestamp,
    pub max_records_per_call: usize,
    /// Longest query text the provider accepts.
    pub max_query_len: usize,
}

impl QueryConstraints {
    pub const DEFAULT_MAX_RECORDS: usize = 250;
    pub const DEFAULT_MAX_QUERY_LEN: usize = 2048;

    pub fn new(language: impl Into<String>, start: Timestamp, end: Timestamp) -> Result<Self> {
        let c = Self {
            language: language.into(),
            start,
            end,
            max_records_per_call: Self::DEFAULT_MAX_RECORDS,
            max_query_len: Self::DEFAULT_MAX_QUERY_LEN,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.start >= self.end {
            return Err(Error::InvalidConstraints("start must precede end".into()));
        }
        if self.max_records_per_call == 0 {
            return Err(Error::InvalidConstraints(
                "max_records_per_call must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn window(&self) -> TimeWindow {
        TimeWindow {
            start: self.start,
            end: self.end,
        }
    }
}

/// Metadata for one news hit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleMeta {
    pub title: String,
    pub url: String,
    pub domain: String,
    pub published_at: Timestamp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub country: Option<String>,
    pub taxon_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub latitude: f64,
    pub longitude: f64,
}

/// One social-media post from an archive export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostRecord {
    pub post_id: String,
    pub text: String,
    pub published_at: Timestamp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geo: Option<GeoPoint>,
    pub taxon_id: String,
}

impl PostRecord {
    pub fn validate(&self) -> core::result::Result<(), String> {
        if self.post_id.trim().is_empty() {
            return Err("empty post_id".into());
        }
        if let Some(g) = self.geo {
            if !(-90.0..=90.0).contains(&g.latitude) {
                return Err(format!("latitude {} out of range", g.latitude));
            }
            if !(-180.0..=180.0).contains(&g.longitude) {
                return Err(format!("longitude {} out of range", g.longitude));
            }
        }
        Ok(())
    }
}

/// URL with any `#fragment` removed; the key used for exact-URL dedup.
pub fn url_key(url: &str) -> &str {
    url.split_once('#').map_or(url, |(u, _)| u).trim()
}

fn quoted(k: &str) -> String {
    format!("\"{}\"", k.replace('"', ""))
}

fn compose(positives: &[&String], negatives: &[&String], language: &str) -> String {
    let mut q = if positives.len() == 1 && negatives.is_empty() {
        quoted(positives[0])
    } else {
        let ors: Vec<String> = positives.iter().map(|k| quoted(k)).collect();
        format!("({})", ors.join(" OR "))
    };
    for n in negatives {
        q.push_str(" AND NOT ");
        q.push_str(&quoted(n));
    }
    if !language.is_empty() {
        q.push_str(" sourcelang:");
        q.push_str(language);
    }
    q
}

/// Boolean provider query: OR over the quoted positive keywords, one
/// `AND NOT` per negative keyword, then the language clause. Keywords are
/// emitted in sorted order.
pub fn build_query_string(taxon: &FolkTaxon, constraints: &QueryConstraints) -> Result<String> {
    let positives: Vec<&String> = taxon.positive_keywords.iter().collect();
    let negatives: Vec<&String> = taxon.negative_keywords.iter().collect();
    let q = compose(&positives, &negatives, &constraints.language);
    if q.chars().count() > constraints.max_query_len {
        return Err(Error::QueryTooLong {
            len: q.chars().count(),
            limit: constraints.max_query_len,
        });
    }
    Ok(q)
}

/// Queries covering a taxon within the length limit: the whole taxon when it
/// fits, otherwise consecutive groups of positive keywords, each carrying
/// every negative keyword. Results of the parts are merged by URL.
pub fn split_queries(taxon: &FolkTaxon, constraints: &QueryConstraints) -> Result<Vec<String>> {
    match build_query_string(taxon, constraints) {
        Ok(q) => return Ok(alloc::vec![q]),
        Err(Error::QueryTooLong { .. }) => {}
        Err(e) => return Err(e),
    }
    let negatives: Vec<&String> = taxon.negative_keywords.iter().collect();
    let mut out = Vec::new();
    let mut group: Vec<&String> = Vec::new();
    for kw in &taxon.positive_keywords {
        group.push(kw);
        let q = compose(&group, &negatives, &constraints.language);
        if q.chars().count() > constraints.max_query_len {
            if group.len() == 1 {
                return Err(Error::QueryTooLong {
                    len: q.chars().count(),
                    limit: constraints.max_query_len,
                });
            }
            group.pop();
            out.push(compose(&group, &negatives, &constraints.language));
            group.clear();
            group.push(kw);
        }
    }
    if !group.is_empty() {
        out.push(compose(&group, &negatives, &constraints.language));
    }
    Ok(out)
}

/// Half-open time interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TimeWindow {
    pub start: Timestamp,
    pub end: Timestamp,
}

impl TimeWindow {
    pub fn new(start: Timestamp, end: Timestamp) -> Self {
        Self { start, end }
    }

    pub fn width(&self) -> TimeDelta {
        self.end - self.start
    }

    pub fn contains(&self, t: Timestamp) -> bool {
        self.start <= t && t < self.end
    }

    /// Split at the midpoint, rounded down to whole seconds.
    pub fn bisect(&self) -> (TimeWindow, TimeWindow) {
        let half = TimeDelta::seconds(self.width().num_seconds() / 2);
        let mid = self.start + half;
        (
            TimeWindow::new(self.start, mid),
            TimeWindow::new(mid, self.end),
        )
    }
}

/// Hits for one window; `hit_cap` is set when the provider returned a full
/// page and more hits may exist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowFetch {
    pub hits: Vec<ArticleMeta>,
    pub hit_cap: bool,
}

impl WindowFetch {
    pub fn new(hits: Vec<ArticleMeta>, max_records: usize) -> Self {
        let hit_cap = hits.len() >= max_records;
        Self { hits, hit_cap }
    }
}

/// A capped keyword search over time windows.
pub trait ArticleSource {
    type Error;

    fn fetch_window(
        &self,
        query: &str,
        window: TimeWindow,
        max_records: usize,
    ) -> Result<WindowFetch, Self::Error>;
}

/// Window that still returned a full page at the minimum width; hits past
/// the cap were not retrieved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapWarning {
    pub window: TimeWindow,
    pub returned: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SliceOutcome {
    /// Unique by URL key, ordered by `(published_at, url)`.
    pub records: Vec<ArticleMeta>,
    pub warnings: Vec<CapWarning>,
    /// Windows whose results were kept; they tile the requested window.
    pub leaves: Vec<TimeWindow>,
    pub calls: usize,
}

pub const DEFAULT_MIN_WINDOW: TimeDelta = TimeDelta::hours(1);

/// Retrieve every hit in `window`, bisecting capped windows.
pub fn adaptive_slice<S: ArticleSource + ?Sized>(
    source: &S,
    query: &str,
    window: TimeWindow,
    max_records: usize,
    min_width: TimeDelta,
) -> Result<SliceOutcome, S::Error> {
    let mut out = SliceOutcome::default();
    let mut by_url: BTreeMap<String, ArticleMeta> = BTreeMap::new();
    let mut stack = alloc::vec![window];
    while let Some(w) = stack.pop() {
        let fetched = source.fetch_window(query, w, max_records)?;
        out.calls += 1;
        if fetched.hit_cap && w.width() > min_width && w.width().num_seconds() >= 2 {
            let (left, right) = w.bisect();
            stack.push(right);
            stack.push(left);
            continue;
        }
        if fetched.hit_cap {
            out.warnings.push(CapWarning {
                window: w,
                returned: fetched.hits.len(),
            });
        }
        out.leaves.push(w);
        for hit in fetched.hits {
            by_url.entry(String::from(url_key(&hit.url))).or_insert(hit);
        }
    }
    out.records = by_url.into_values().collect();
    out.records.sort_by(|a, b| {
        a.published_at
            .cmp(&b.published_at)
            .then_with(|| a.url.cmp(&b.url))
    });
    Ok(out)
}
