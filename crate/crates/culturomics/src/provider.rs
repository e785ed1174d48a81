//! News providers: the GDELT-style document API over HTTP and a
//! file-backed store that answers the same queries offline.

use std::path::Path;

use chrono::{NaiveDateTime, TimeDelta, TimeZone, Utc};
use culturomics_core::retrieval::{url_key, ArticleMeta, ArticleSource, TimeWindow, WindowFetch};
use culturomics_core::text::KeywordMatcher;
use culturomics_core::Timestamp;
use serde::{Deserialize, Serialize};

use crate::http::HttpClient;
use crate::store::read_jsonl;
use crate::{Error, Result};

pub const GDELT_DOC_ENDPOINT: &str = "https://api.gdeltproject.org/api/v2/doc/doc";

const DATETIME_FORMAT: &str = "%Y%m%d%H%M%S";

pub fn format_datetime(t: Timestamp) -> String {
    t.format(DATETIME_FORMAT).to_string()
}

pub fn parse_datetime(s: &str) -> Option<Timestamp> {
    NaiveDateTime::parse_from_str(s, DATETIME_FORMAT)
        .ok()
        .map(|n| Utc.from_utc_datetime(&n))
}

/// `seendate` values look like `20200131T154500Z`.
pub fn parse_seendate(s: &str) -> Option<Timestamp> {
    NaiveDateTime::parse_from_str(s, "%Y%m%dT%H%M%SZ")
        .ok()
        .map(|n| Utc.from_utc_datetime(&n))
}

pub fn format_seendate(t: Timestamp) -> String {
    t.format("%Y%m%dT%H%M%SZ").to_string()
}

/// One entry of an `artlist` response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GdeltArticle {
    pub url: String,
    #[serde(default)]
    pub title: String,
    pub seendate: String,
    #[serde(default)]
    pub domain: String,
    #[serde(default)]
    pub language: String,
    #[serde(default)]
    pub sourcecountry: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ArtList {
    #[serde(default)]
    pub articles: Vec<GdeltArticle>,
}

/// Parse an `artlist` JSON payload. The API answers `{}` when nothing
/// matches.
pub fn parse_artlist(raw: &str, taxon_id: &str) -> Result<Vec<ArticleMeta>> {
    let parse_err = |reason: String| Error::Parse {
        reason,
        raw: raw.to_string(),
    };
    let list: ArtList = serde_json::from_str(raw).map_err(|e| parse_err(e.to_string()))?;
    list.articles
        .into_iter()
        .map(|a| {
            let published_at = parse_seendate(&a.seendate)
                .ok_or_else(|| parse_err(format!("bad seendate {:?}", a.seendate)))?;
            if a.url.trim().is_empty() {
                return Err(parse_err("article without url".into()));
            }
            Ok(ArticleMeta {
                title: a.title.trim().to_string(),
                url: a.url,
                domain: a.domain,
                published_at,
                country: Some(a.sourcecountry).filter(|c| !c.trim().is_empty()),
                taxon_id: taxon_id.to_string(),
            })
        })
        .collect()
}

/// Client for the document API in `artlist` mode.
#[derive(Debug, Clone)]
pub struct GdeltProvider {
    client: HttpClient,
    endpoint: String,
    taxon_id: String,
}

impl GdeltProvider {
    pub fn new(
        client: HttpClient,
        endpoint: impl Into<String>,
        taxon_id: impl Into<String>,
    ) -> Self {
        Self {
            client,
            endpoint: endpoint.into(),
            taxon_id: taxon_id.into(),
        }
    }

    /// Request URL for a half-open window. The API's end bound is
    /// inclusive at one-second resolution, so the last second of the window
    /// is `end - 1s`.
    pub fn request_url(
        &self,
        query: &str,
        window: TimeWindow,
        max_records: usize,
    ) -> Result<String> {
        let mut url = url::Url::parse(&self.endpoint)
            .map_err(|e| Error::Config(format!("provider endpoint: {e}")))?;
        url.query_pairs_mut()
            .append_pair("query", query)
            .append_pair("mode", "artlist")
            .append_pair("format", "json")
            .append_pair("startdatetime", &format_datetime(window.start))
            .append_pair(
                "enddatetime",
                &format_datetime(window.end - TimeDelta::seconds(1)),
            )
            .append_pair("maxrecords", &max_records.to_string());
        Ok(url.into())
    }
}

impl ArticleSource for GdeltProvider {
    type Error = Error;

    fn fetch_window(
        &self,
        query: &str,
        window: TimeWindow,
        max_records: usize,
    ) -> Result<WindowFetch> {
        let url = self.request_url(query, window, max_records)?;
        let resp = self
            .client
            .get(&url)
            .map_err(|e| Error::Provider(format!("{url}: {e}")))?;
        if !resp.is_success() {
            return Err(Error::Provider(format!("{url}: HTTP {}", resp.status)));
        }
        let raw = String::from_utf8_lossy(&resp.body);
        let hits = parse_artlist(&raw, &self.taxon_id)?;
        let returned = hits.len();
        let hits: Vec<ArticleMeta> = hits
            .into_iter()
            .filter(|h| window.contains(h.published_at))
            .collect();
        Ok(WindowFetch {
            hits,
            hit_cap: returned >= max_records,
        })
    }
}

/// A query in the provider syntax produced by
/// [`culturomics_core::retrieval::build_query_string`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedQuery {
    pub positives: Vec<String>,
    pub negatives: Vec<String>,
    pub language: Option<String>,
}

impl ParsedQuery {
    pub fn parse(query: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Parse {
            reason: reason.into(),
            raw: query.into(),
        };
        let mut out = ParsedQuery::default();
        let mut negate = false;
        let mut rest = query.trim();
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix('"') {
                let end = r.find('"').ok_or_else(|| bad("unterminated quote"))?;
                let term = r[..end].to_string();
                if negate {
                    out.negatives.push(term);
                } else {
                    out.positives.push(term);
                }
                negate = false;
                rest = &r[end + 1..];
            } else if let Some(r) = rest.strip_prefix(['(', ')']) {
                rest = r;
            } else {
                let end = rest
                    .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
                    .unwrap_or(rest.len());
                match &rest[..end] {
                    "OR" | "AND" => {}
                    "NOT" => negate = true,
                    w => match w.split_once(':') {
                        Some(("sourcelang", lang)) => out.language = Some(lang.to_string()),
                        _ => return Err(bad("unsupported query term")),
                    },
                }
                rest = &rest[end..];
            }
            rest = rest.trim_start();
        }
        if out.positives.is_empty() {
            return Err(bad("query has no positive term"));
        }
        Ok(out)
    }

    /// Boolean semantics of the query: some positive phrase occurs and no
    /// negative phrase occurs anywhere in the text.
    pub fn matches(&self, text: &str) -> bool {
        let pos = KeywordMatcher::new(&self.positives, std::iter::empty::<&String>());
        let neg = KeywordMatcher::new(&self.negatives, std::iter::empty::<&String>());
        pos.is_mention(text) && !neg.is_mention(text)
    }
}

/// A document in the offline store: what the provider indexes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredArticle {
    pub url: String,
    pub title: String,
    pub domain: String,
    pub published_at: Timestamp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub country: Option<String>,
    #[serde(default)]
    pub language: String,
    /// Text the provider matches keywords against; the title when empty.
    #[serde(default)]
    pub text: String,
}

impl StoredArticle {
    fn searchable(&self) -> String {
        format!("{}\n{}", self.title, self.text)
    }
}

/// Articles answering provider queries from a JSON-lines file, with the
/// same hit semantics as the live API: keyword match, window filter,
/// earliest first, truncated to `max_records`.
#[derive(Debug, Clone)]
pub struct FixtureProvider {
    articles: Vec<StoredArticle>,
    taxon_id: String,
}

impl FixtureProvider {
    pub fn new(mut articles: Vec<StoredArticle>, taxon_id: impl Into<String>) -> Self {
        articles.sort_by(|a, b| {
            a.published_at
                .cmp(&b.published_at)
                .then_with(|| a.url.cmp(&b.url))
        });
        Self {
            articles,
            taxon_id: taxon_id.into(),
        }
    }

    pub fn load(path: &Path) -> Result<Vec<StoredArticle>> {
        read_jsonl(path)
    }

    pub fn for_taxon(&self, taxon_id: &str) -> Self {
        Self {
            articles: self.articles.clone(),
            taxon_id: taxon_id.into(),
        }
    }

    /// Every stored article the query matches in the window, uncapped.
    pub fn matching(&self, query: &str, window: TimeWindow) -> Result<Vec<&StoredArticle>> {
        let q = ParsedQuery::parse(query)?;
        Ok(self
            .articles
            .iter()
            .filter(|a| window.contains(a.published_at))
            .filter(|a| {
                q.language
                    .as_deref()
                    .is_none_or(|l| a.language.is_empty() || a.language.eq_ignore_ascii_case(l))
            })
            .filter(|a| q.matches(&a.searchable()))
            .collect())
    }
}

impl ArticleSource for FixtureProvider {
    type Error = Error;

    fn fetch_window(
        &self,
        query: &str,
        window: TimeWindow,
        max_records: usize,
    ) -> Result<WindowFetch> {
        let hits = self
            .matching(query, window)?
            .into_iter()
            .take(max_records)
            .map(|a| ArticleMeta {
                title: a.title.clone(),
                url: a.url.clone(),
                domain: a.domain.clone(),
                published_at: a.published_at,
                country: a.country.clone(),
                taxon_id: self.taxon_id.clone(),
            })
            .collect();
        Ok(WindowFetch::new(hits, max_records))
    }
}

/// Either provider behind one type, chosen by configuration.
#[derive(Debug, Clone)]
pub enum Provider {
    Gdelt(GdeltProvider),
    Fixture(FixtureProvider),
}

impl ArticleSource for Provider {
    type Error = Error;

    fn fetch_window(
        &self,
        query: &str,
        window: TimeWindow,
        max_records: usize,
    ) -> Result<WindowFetch> {
        match self {
            Provider::Gdelt(p) => p.fetch_window(query, window, max_records),
            Provider::Fixture(p) => p.fetch_window(query, window, max_records),
        }
    }
}

/// Merge hit lists from several queries of one taxon. URLs are reduced to
/// their key (fragment dropped); the first hit per key wins,
/// and output is ordered by `(published_at, url)`.
pub fn merge_hits(lists: impl IntoIterator<Item = Vec<ArticleMeta>>) -> Vec<ArticleMeta> {
    let mut seen = std::collections::BTreeMap::new();
    for list in lists {
        for mut h in list {
            h.url = url_key(&h.url).to_string();
            seen.entry(h.url.clone()).or_insert(h);
        }
    }
    let mut out: Vec<ArticleMeta> = seen.into_values().collect();
    out.sort_by(|a, b| {
        a.published_at
            .cmp(&b.published_at)
            .then_with(|| a.url.cmp(&b.url))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use culturomics_core::retrieval::{build_query_string, QueryConstraints};
    use culturomics_core::taxonomy::FolkTaxon;

    fn ts(y: i32, m: u32, d: u32) -> Timestamp {
        Utc.with_ymd_and_hms(y, m, d, 0, 0, 0).unwrap()
    }

    #[test]
    fn artlist_parsing() {
        let raw = r#"{"articles":[{"url":"https://a.example/1","url_mobile":"","title":" Lion cubs born ",
            "seendate":"20200131T154500Z","socialimage":"","domain":"a.example","language":"English",
            "sourcecountry":"Kenya"}]}"#;
        let hits = parse_artlist(raw, "lion").unwrap();
        assert_eq!(hits[0].title, "Lion cubs born");
        assert_eq!(
            hits[0].published_at,
            Utc.with_ymd_and_hms(2020, 1, 31, 15, 45, 0).unwrap()
        );
        assert_eq!(hits[0].country.as_deref(), Some("Kenya"));
        assert!(parse_artlist("{}", "lion").unwrap().is_empty());
        match parse_artlist("Your search contained invalid terms", "lion") {
            Err(Error::Parse { raw, .. }) => assert!(raw.starts_with("Your search")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_artlist(r#"{"articles":[{"url":"u","seendate":"2020"}]}"#, "x"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn request_url_parameters() {
        let p = GdeltProvider::new(
            HttpClient::new(Default::default()),
            "http://127.0.0.1:9/doc",
            "lion",
        );
        let url = p
            .request_url(
                "\"lion\"",
                TimeWindow::new(ts(2020, 1, 1), ts(2020, 2, 1)),
                250,
            )
            .unwrap();
        let parsed = url::Url::parse(&url).unwrap();
        let pairs: std::collections::BTreeMap<_, _> = parsed.query_pairs().into_owned().collect();
        assert_eq!(pairs["query"], "\"lion\"");
        assert_eq!(pairs["mode"], "artlist");
        assert_eq!(pairs["format"], "json");
        assert_eq!(pairs["startdatetime"], "20200101000000");
        assert_eq!(pairs["enddatetime"], "20200131235959");
        assert_eq!(pairs["maxrecords"], "250");
    }

    #[test]
    fn query_round_trip() {
        let taxon = FolkTaxon {
            taxon_id: "lion".into(),
            display_name: "Lion".into(),
            member_species: ["panthera leo".to_string()].into(),
            positive_keywords: ["lion".to_string(), "african lion".to_string()].into(),
            negative_keywords: ["sea lion".to_string(), "mountain lion".to_string()].into(),
        };
        let c = QueryConstraints::new("english", ts(2020, 1, 1), ts(2021, 1, 1)).unwrap();
        let q = ParsedQuery::parse(&build_query_string(&taxon, &c).unwrap()).unwrap();
        assert_eq!(q.positives, ["african lion", "lion"]);
        assert_eq!(q.negatives, ["mountain lion", "sea lion"]);
        assert_eq!(q.language.as_deref(), Some("english"));
        assert_eq!(
            ParsedQuery::parse("\"pangolin\"").unwrap().positives,
            ["pangolin"]
        );
        assert!(ParsedQuery::parse("lion OR").is_err());
    }

    #[test]
    fn fixture_store_applies_keywords_and_window() {
        let art = |url: &str, title: &str, d: u32| StoredArticle {
            url: url.into(),
            title: title.into(),
            domain: "x".into(),
            published_at: ts(2020, 1, d),
            country: None,
            language: "english".into(),
            text: String::new(),
        };
        let p = FixtureProvider::new(
            vec![
                art("u1", "Lion escapes", 2),
                art("u2", "Sea lion pup rescued", 3),
                art("u3", "Lions roar", 20),
            ],
            "lion",
        );
        let w = TimeWindow::new(ts(2020, 1, 1), ts(2020, 1, 10));
        let f = p
            .fetch_window("(\"lion\") AND NOT \"sea lion\" sourcelang:english", w, 250)
            .unwrap();
        assert_eq!(
            f.hits.iter().map(|h| h.url.as_str()).collect::<Vec<_>>(),
            ["u1"]
        );
        assert!(!f.hit_cap);
        let f = p
            .fetch_window(
                "\"lion\"",
                TimeWindow::new(ts(2020, 1, 1), ts(2020, 2, 1)),
                2,
            )
            .unwrap();
        assert!(f.hit_cap);
    }
}
