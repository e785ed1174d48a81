//! Staged, resumable pipeline over an output directory.
//!
//! Each stage reads the stores of the stage before it and writes its own
//! JSON-lines store. Work already present in a store is skipped, so a
//! stage can be rerun after an interruption without duplicating records.
//! `manifest.json` lists completed stages; `stage_log.jsonl` records every
//! article's progress through the funnel.

mod export;
mod records;

pub use export::{
    write_exports, AnalyticsResults, BreakpointRow, CooccurrenceRow, CountryRow, ExportFormat,
    FunnelRow, SeriesRow, TableRow, EXPORT_SCHEMA_VERSION,
};
pub use records::{
    CapWarningRecord, ClassifiedRecord, DedupRecord, MentionRecord, RecordStage, RetrievalSummary,
    ScoredMention, ScrapedRecord, StageRecord,
};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use chrono::{TimeDelta, Utc};
use culturomics_core::analytics::{
    article_sentiment, correct_significance, detect_breakpoints, month_country_counts,
    sentiment_series, topic_cooccurrence, volume_series, BinSpec, BreakpointConfig, Penalty,
    SentimentAnalyzer, SeriesKind, SeriesPoint, Source, MIN_SERIES_LEN,
};
use culturomics_core::postprocess::{
    detect_mentions, mark_syndication, tfidf_vectors, DatedVector, SyndicationConfig,
};
use culturomics_core::relevance::{
    classify_titles, decide_relevance, ClassifyError, KeywordScorer, TopicSchema, TopicScores,
};
use culturomics_core::retrieval::{
    adaptive_slice, split_queries, url_key, ArticleMeta, PostRecord,
};
use culturomics_core::sentences::SentenceSplitter;
use culturomics_core::taxonomy::{build_graph, derive_taxa, FolkTaxon, NameGraph};
use culturomics_core::text::{KeywordMatcher, Stopwords};
use culturomics_core::Timestamp;
use serde::{Deserialize, Serialize};

use crate::classifier::{Backend, RemoteClassifier};
use crate::config::{ClassifierConfig, PagesConfig, PipelineConfig, ProviderConfig};
use crate::extraction::{get_full_text, FixturePages, FullTextCache, PageSource, WebPages};
use crate::http::HttpClient;
use crate::posts::ingest_post_archive;
use crate::provider::{merge_hits, FixtureProvider, GdeltProvider, Provider, StoredArticle};
use crate::store::{
    append_jsonl, read_edit_log, read_json, read_jsonl, read_species_file, write_json, TaxonomyFile,
};
use crate::{Error, Result};

/// Pipeline stages in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Taxonomy,
    Retrieve,
    Classify,
    Scrape,
    Dedup,
    Analyze,
    Export,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Taxonomy,
        Stage::Retrieve,
        Stage::Classify,
        Stage::Scrape,
        Stage::Dedup,
        Stage::Analyze,
        Stage::Export,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Taxonomy => "taxonomy",
            Stage::Retrieve => "retrieve",
            Stage::Classify => "classify",
            Stage::Scrape => "scrape",
            Stage::Dedup => "dedup",
            Stage::Analyze => "analyze",
            Stage::Export => "export",
        }
    }

    /// The stage whose output this one reads.
    pub fn requires(self) -> Option<Stage> {
        let i = Stage::ALL.iter().position(|s| *s == self).unwrap();
        i.checked_sub(1).map(|j| Stage::ALL[j])
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
struct Manifest {
    completed: BTreeSet<Stage>,
}

/// Summary of one `run` call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub stages: Vec<Stage>,
    pub funnel: Vec<FunnelRow>,
    pub cap_warnings: usize,
    pub rejected_posts: usize,
    pub breakpoints: usize,
    pub significant_breakpoints: usize,
}

/// File layout of an output directory.
#[derive(Debug, Clone)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn manifest(&self) -> PathBuf {
        self.root.join("manifest.json")
    }
    pub fn stage_log(&self) -> PathBuf {
        self.root.join("stage_log.jsonl")
    }
    pub fn graph(&self) -> PathBuf {
        self.root.join("taxonomy/graph.json")
    }
    pub fn curated_graph(&self) -> PathBuf {
        self.root.join("taxonomy/curated_graph.json")
    }
    pub fn taxa(&self) -> PathBuf {
        self.root.join("taxonomy/taxa.json")
    }
    pub fn queried(&self) -> PathBuf {
        self.root.join("stages/queried.jsonl")
    }
    pub fn retrieval_summary(&self) -> PathBuf {
        self.root.join("stages/retrieval.jsonl")
    }
    pub fn cap_warnings(&self) -> PathBuf {
        self.root.join("stages/cap_warnings.jsonl")
    }
    pub fn posts(&self) -> PathBuf {
        self.root.join("stages/posts.jsonl")
    }
    pub fn posts_rejected(&self) -> PathBuf {
        self.root.join("stages/posts_rejected.json")
    }
    pub fn classified(&self) -> PathBuf {
        self.root.join("stages/classified.jsonl")
    }
    pub fn scraped(&self) -> PathBuf {
        self.root.join("stages/scraped.jsonl")
    }
    pub fn fulltext(&self) -> PathBuf {
        self.root.join("fulltext")
    }
    pub fn deduped(&self) -> PathBuf {
        self.root.join("stages/deduped.jsonl")
    }
    pub fn mentions(&self) -> PathBuf {
        self.root.join("stages/mentions.jsonl")
    }
    pub fn scored_mentions(&self) -> PathBuf {
        self.root.join("analytics/mentions_scored.jsonl")
    }
    pub fn analytics(&self) -> PathBuf {
        self.root.join("analytics/results.json")
    }
    pub fn exports(&self) -> PathBuf {
        self.root.join("exports")
    }
    pub fn report(&self) -> PathBuf {
        self.root.join("report.json")
    }
}

type Key = (String, String);

fn key(taxon_id: &str, url: &str) -> Key {
    (taxon_id.to_string(), url.to_string())
}

pub struct Pipeline {
    config: PipelineConfig,
    layout: Layout,
    http: HttpClient,
    export_format: ExportFormat,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        let layout = Layout {
            root: config.output_dir.clone(),
        };
        std::fs::create_dir_all(&layout.root).map_err(Error::io(&layout.root))?;
        let http = HttpClient::new(config.http.clone());
        Ok(Self {
            config,
            layout,
            http,
            export_format: ExportFormat::Csv,
        })
    }

    pub fn with_export_format(mut self, format: ExportFormat) -> Self {
        self.export_format = format;
        self
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    fn manifest(&self) -> Result<Manifest> {
        let p = self.layout.manifest();
        if p.exists() {
            read_json(&p)
        } else {
            Ok(Manifest::default())
        }
    }

    fn mark_complete(&self, stage: Stage) -> Result<()> {
        let mut m = self.manifest()?;
        m.completed.insert(stage);
        write_json(&self.layout.manifest(), &m)
    }

    pub fn completed(&self) -> Result<BTreeSet<Stage>> {
        Ok(self.manifest()?.completed)
    }

    /// Run the requested stages in pipeline order. Each stage's
    /// prerequisite must have completed earlier or be part of this run.
    pub fn run(&self, stages: &[Stage]) -> Result<RunReport> {
        let wanted: BTreeSet<Stage> = stages.iter().copied().collect();
        let mut done = self.completed()?;
        for &stage in &wanted {
            if let Some(req) = stage.requires() {
                if !done.contains(&req) && !wanted.contains(&req) {
                    return Err(Error::Dependency {
                        stage: stage.name().into(),
                        missing: req.name().into(),
                    });
                }
            }
        }
        for &stage in &wanted {
            tracing::info!(stage = stage.name(), "running stage");
            self.run_stage(stage)?;
            done.insert(stage);
        }
        self.report(wanted.into_iter().collect())
    }

    pub fn run_all(&self) -> Result<RunReport> {
        self.run(&Stage::ALL)
    }

    fn run_stage(&self, stage: Stage) -> Result<()> {
        match stage {
            Stage::Taxonomy => self.taxonomy()?,
            Stage::Retrieve => self.retrieve()?,
            Stage::Classify => self.classify()?,
            Stage::Scrape => self.scrape()?,
            Stage::Dedup => self.dedup()?,
            Stage::Analyze => self.analyze()?,
            Stage::Export => self.export()?,
        }
        self.mark_complete(stage)
    }

    fn log_stage<'a, I>(&self, stage: RecordStage, entries: I) -> Result<()>
    where
        I: IntoIterator<Item = (&'a str, &'a str, &'a str)>,
    {
        let existing: BTreeSet<Key> = read_jsonl::<StageRecord>(&self.layout.stage_log())?
            .into_iter()
            .filter(|r| r.stage == stage)
            .map(|r| (r.taxon_id, r.url))
            .collect();
        let now = Utc::now();
        let fresh: Vec<StageRecord> = entries
            .into_iter()
            .filter(|(t, u, _)| !existing.contains(&key(t, u)))
            .map(|(t, u, s)| StageRecord {
                taxon_id: t.into(),
                url: u.into(),
                stage,
                status: s.into(),
                recorded_at: now,
            })
            .collect();
        append_jsonl(&self.layout.stage_log(), &fresh)
    }

    pub fn load_taxa(&self) -> Result<Vec<FolkTaxon>> {
        Ok(TaxonomyFile::load(&self.layout.taxa())?.taxa)
    }

    /// Base graph from the species list, and the curated graph after
    /// replaying the edit log.
    pub fn build_graphs(&self) -> Result<(NameGraph, NameGraph)> {
        let species = read_species_file(&self.config.taxonomy.species)?;
        let base = build_graph(&species)?;
        let curated = match &self.config.taxonomy.edits {
            Some(p) => read_edit_log(p)?.replay(&base)?,
            None => base.clone(),
        };
        Ok((base, curated))
    }

    fn taxonomy(&self) -> Result<()> {
        let (base, curated) = self.build_graphs()?;
        let mut taxa = derive_taxa(&curated);
        let select = &self.config.taxonomy.select;
        if !select.is_empty() {
            let known: BTreeSet<&str> = taxa.iter().map(|t| t.taxon_id.as_str()).collect();
            if let Some(missing) = select.iter().find(|s| !known.contains(s.as_str())) {
                return Err(Error::Config(format!(
                    "taxonomy.select: no taxon {missing:?} in the curated graph"
                )));
            }
            taxa.retain(|t| select.contains(&t.taxon_id));
        }
        write_json(&self.layout.graph(), &base)?;
        write_json(&self.layout.curated_graph(), &curated)?;
        write_json(&self.layout.taxa(), &TaxonomyFile::new(taxa))
    }

    fn provider_for(&self, store: &Option<FixtureProvider>, taxon_id: &str) -> Provider {
        match (&self.config.retrieval.provider, store) {
            (ProviderConfig::Fixture { .. }, Some(s)) => Provider::Fixture(s.for_taxon(taxon_id)),
            (ProviderConfig::Gdelt { endpoint }, _) => Provider::Gdelt(GdeltProvider::new(
                self.http.clone(),
                endpoint.clone(),
                taxon_id,
            )),
            (ProviderConfig::Fixture { .. }, None) => {
                unreachable!("fixture store is loaded up front")
            }
        }
    }

    fn retrieve(&self) -> Result<()> {
        let taxa = self.load_taxa()?;
        let rc = &self.config.retrieval;
        let constraints = rc.constraints()?;
        let store = match &rc.provider {
            ProviderConfig::Fixture { articles } => Some(FixtureProvider::new(
                read_jsonl::<StoredArticle>(articles)?,
                "",
            )),
            ProviderConfig::Gdelt { .. } => None,
        };
        let done: BTreeSet<String> =
            read_jsonl::<RetrievalSummary>(&self.layout.retrieval_summary())?
                .into_iter()
                .map(|s| s.taxon_id)
                .collect();
        let mut have: BTreeSet<Key> = read_jsonl::<ArticleMeta>(&self.layout.queried())?
            .into_iter()
            .map(|a| key(&a.taxon_id, url_key(&a.url)))
            .collect();
        for taxon in taxa.iter().filter(|t| !done.contains(&t.taxon_id)) {
            let provider = self.provider_for(&store, &taxon.taxon_id);
            let queries = split_queries(taxon, &constraints)?;
            let mut lists = Vec::new();
            let mut warnings = Vec::new();
            let mut calls = 0;
            for q in &queries {
                let out = adaptive_slice(
                    &provider,
                    q,
                    constraints.window(),
                    rc.max_records_per_call,
                    rc.min_window(),
                )?;
                calls += out.calls;
                for w in &out.warnings {
                    tracing::warn!(taxon = %taxon.taxon_id, start = %w.window.start, returned = w.returned, "window capped at minimum width");
                    warnings.push(CapWarningRecord {
                        taxon_id: taxon.taxon_id.clone(),
                        window_start: w.window.start,
                        window_end: w.window.end,
                        returned: w.returned,
                    });
                }
                lists.push(out.records);
            }
            let hits = merge_hits(lists);
            let fresh: Vec<&ArticleMeta> = hits
                .iter()
                .filter(|h| have.insert(key(&h.taxon_id, url_key(&h.url))))
                .collect();
            append_jsonl(&self.layout.queried(), fresh.iter().copied())?;
            append_jsonl(&self.layout.cap_warnings(), &warnings)?;
            self.log_stage(
                RecordStage::Queried,
                hits.iter()
                    .map(|h| (h.taxon_id.as_str(), url_key(&h.url), "ok")),
            )?;
            let summary = RetrievalSummary {
                taxon_id: taxon.taxon_id.clone(),
                queries,
                calls,
                hits: hits.len(),
                capped_windows: warnings.len(),
            };
            append_jsonl(&self.layout.retrieval_summary(), [&summary])?;
        }
        self.assign_posts(&taxa)
    }

    /// Posts carrying a taxon id go to that taxon; the rest go to every
    /// taxon they mention. Only posts inside the date range are kept.
    fn assign_posts(&self, taxa: &[FolkTaxon]) -> Result<()> {
        let Some(path) = &self.config.retrieval.posts else {
            return Ok(());
        };
        let ingest = ingest_post_archive(path)?;
        if ingest.error_count() > 0 {
            tracing::warn!(
                rejected = ingest.error_count(),
                "post archive lines rejected"
            );
        }
        let window = self.config.retrieval.constraints()?.window();
        let matchers: Vec<(&str, KeywordMatcher)> = taxa
            .iter()
            .map(|t| {
                (
                    t.taxon_id.as_str(),
                    KeywordMatcher::new(&t.positive_keywords, &t.negative_keywords),
                )
            })
            .collect();
        let known: BTreeSet<&str> = matchers.iter().map(|(t, _)| *t).collect();
        let mut assigned: Vec<PostRecord> = Vec::new();
        for post in ingest
            .records
            .iter()
            .filter(|p| window.contains(p.published_at))
        {
            if !post.taxon_id.is_empty() {
                if known.contains(post.taxon_id.as_str()) {
                    assigned.push(post.clone());
                }
                continue;
            }
            for (taxon_id, m) in &matchers {
                if m.is_mention(&post.text) {
                    assigned.push(PostRecord {
                        taxon_id: (*taxon_id).into(),
                        ..post.clone()
                    });
                }
            }
        }
        assigned.sort_by(|a, b| {
            (&a.taxon_id, a.published_at, &a.post_id).cmp(&(
                &b.taxon_id,
                b.published_at,
                &b.post_id,
            ))
        });
        let mut bytes = Vec::new();
        for p in &assigned {
            serde_json::to_writer(&mut bytes, p).expect("serializable post");
            bytes.push(b'\n');
        }
        crate::store::write_atomic(&self.layout.posts(), &bytes)?;
        write_json(&self.layout.posts_rejected(), &ingest.rejected)
    }

    fn schema(&self) -> Result<TopicSchema> {
        match &self.config.relevance.schema {
            Some(p) => read_json(p),
            None => Ok(TopicSchema::standard()),
        }
    }

    fn backend(&self) -> Backend {
        match &self.config.relevance.backend {
            ClassifierConfig::Fallback => Backend::Fallback(KeywordScorer::default()),
            ClassifierConfig::Remote { url } => {
                Backend::Remote(RemoteClassifier::new(self.http.clone(), url))
            }
        }
    }

    fn classify(&self) -> Result<()> {
        let schema = self.schema()?;
        let backend = self.backend();
        let rc = &self.config.relevance;
        let have: BTreeSet<Key> = read_jsonl::<ClassifiedRecord>(&self.layout.classified())?
            .into_iter()
            .map(|c| (c.taxon_id, c.url))
            .collect();
        let todo: Vec<ArticleMeta> = read_jsonl::<ArticleMeta>(&self.layout.queried())?
            .into_iter()
            .filter(|a| !have.contains(&key(&a.taxon_id, &a.url)))
            .collect();
        tracing::info!(backend = %backend.id(), articles = todo.len(), "classifying titles");
        for chunk in todo.chunks(rc.batch_size * 8) {
            let titles: Vec<String> = chunk.iter().map(|a| a.title.clone()).collect();
            let scores = classify_titles(&titles, &schema, &backend, rc.batch_size).map_err(
                |e| match e {
                    ClassifyError::Backend(e) => e,
                    ClassifyError::Contract(e) => Error::Core(e),
                },
            )?;
            let mut out = Vec::with_capacity(chunk.len());
            for (a, s) in chunk.iter().zip(scores) {
                let relevant = decide_relevance(&s, &schema, rc.threshold)?;
                out.push(ClassifiedRecord {
                    taxon_id: a.taxon_id.clone(),
                    url: a.url.clone(),
                    title: a.title.clone(),
                    scores: s.0,
                    relevant,
                });
            }
            append_jsonl(&self.layout.classified(), &out)?;
            self.log_stage(
                RecordStage::Relevant,
                out.iter().map(|c| {
                    (
                        c.taxon_id.as_str(),
                        c.url.as_str(),
                        if c.relevant { "relevant" } else { "irrelevant" },
                    )
                }),
            )?;
        }
        Ok(())
    }

    fn pages(&self) -> Result<Box<dyn PageSource>> {
        Ok(match &self.config.extraction.pages {
            PagesConfig::Web { archive_endpoint } => {
                Box::new(WebPages::new(self.http.clone(), archive_endpoint.clone()))
            }
            PagesConfig::Fixture { dir } => Box::new(FixturePages::open(dir)?),
        })
    }

    fn scrape(&self) -> Result<()> {
        let pages = self.pages()?;
        let cache = FullTextCache::open(&self.layout.fulltext())?;
        let published: HashMap<Key, Timestamp> = read_jsonl::<ArticleMeta>(&self.layout.queried())?
            .into_iter()
            .map(|a| ((a.taxon_id, a.url), a.published_at))
            .collect();
        let have: BTreeSet<Key> = read_jsonl::<ScrapedRecord>(&self.layout.scraped())?
            .into_iter()
            .map(|s| (s.taxon_id, s.url))
            .collect();
        let todo: Vec<ClassifiedRecord> =
            read_jsonl::<ClassifiedRecord>(&self.layout.classified())?
                .into_iter()
                .filter(|c| c.relevant && !have.contains(&key(&c.taxon_id, &c.url)))
                .collect();

        // Several taxa may share a URL; the cache lock serializes nothing
        // else, so distinct URLs are fetched in parallel.
        let urls: Vec<(String, Option<Timestamp>)> = {
            let mut seen = BTreeMap::new();
            for c in &todo {
                seen.entry(c.url.clone())
                    .or_insert_with(|| published.get(&key(&c.taxon_id, &c.url)).copied());
            }
            seen.into_iter().collect()
        };
        let next = AtomicUsize::new(0);
        let results: Mutex<
            HashMap<String, std::result::Result<crate::extraction::FullText, String>>,
        > = Mutex::new(HashMap::new());
        let fatal: Mutex<Option<Error>> = Mutex::new(None);
        let workers = self
            .config
            .concurrency
            .fetch_workers
            .clamp(1, 64)
            .min(urls.len().max(1));
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some((url, at)) = urls.get(i) else { break };
                    let r = match get_full_text(pages.as_ref(), &cache, url, *at) {
                        Ok(ft) => Ok(ft),
                        Err(Error::FullTextUnavailable { reason, .. }) => Err(reason),
                        Err(e) => {
                            *fatal.lock().unwrap() = Some(e);
                            break;
                        }
                    };
                    results.lock().unwrap().insert(url.clone(), r);
                });
            }
        });
        if let Some(e) = fatal.into_inner().unwrap() {
            return Err(e);
        }
        let results = results.into_inner().unwrap();
        let out: Vec<ScrapedRecord> = todo
            .iter()
            .map(|c| match &results[&c.url] {
                Ok(ft) => ScrapedRecord {
                    taxon_id: c.taxon_id.clone(),
                    url: c.url.clone(),
                    status: "ok".into(),
                    fetched_from: Some(ft.fetched_from),
                    extractor_id: Some(ft.article.extractor_id.clone()),
                    char_count: ft.article.char_count,
                    reason: None,
                },
                Err(reason) => ScrapedRecord {
                    taxon_id: c.taxon_id.clone(),
                    url: c.url.clone(),
                    status: "unavailable".into(),
                    fetched_from: None,
                    extractor_id: None,
                    char_count: 0,
                    reason: Some(reason.clone()),
                },
            })
            .collect();
        append_jsonl(&self.layout.scraped(), &out)?;
        self.log_stage(
            RecordStage::Scraped,
            out.iter()
                .map(|s| (s.taxon_id.as_str(), s.url.as_str(), s.status.as_str())),
        )
    }

    fn dedup(&self) -> Result<()> {
        let taxa = self.load_taxa()?;
        let cache = FullTextCache::open(&self.layout.fulltext())?;
        let stopwords = Stopwords::default();
        let splitter = SentenceSplitter::default();
        let cfg = SyndicationConfig {
            threshold: self.config.postprocess.similarity_threshold,
            window: TimeDelta::days(self.config.postprocess.window_days),
        };
        let published: HashMap<Key, Timestamp> = read_jsonl::<ArticleMeta>(&self.layout.queried())?
            .into_iter()
            .map(|a| ((a.taxon_id, a.url), a.published_at))
            .collect();
        let mut by_taxon: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for s in read_jsonl::<ScrapedRecord>(&self.layout.scraped())? {
            if s.status == "ok" {
                by_taxon.entry(s.taxon_id).or_default().push(s.url);
            }
        }
        let mut verdicts = Vec::new();
        let mut mentions = Vec::new();
        for taxon in &taxa {
            let mut urls = by_taxon.remove(&taxon.taxon_id).unwrap_or_default();
            urls.sort();
            urls.dedup();
            let mut texts = Vec::with_capacity(urls.len());
            for u in &urls {
                let entry = cache.get(u).ok_or_else(|| Error::FullTextUnavailable {
                    url: u.clone(),
                    reason: "missing from full-text cache".into(),
                })?;
                texts.push(cache.read_text(&entry)?);
            }
            let vectors = tfidf_vectors(&texts, &stopwords);
            let dated: Vec<DatedVector> = urls
                .iter()
                .zip(vectors)
                .map(|(u, v)| DatedVector {
                    url: u.clone(),
                    published_at: published[&key(&taxon.taxon_id, u)],
                    vector: v,
                })
                .collect();
            let text_of: HashMap<&str, &str> = urls
                .iter()
                .map(String::as_str)
                .zip(texts.iter().map(String::as_str))
                .collect();
            for v in mark_syndication(&dated, &cfg) {
                let at = published[&key(&taxon.taxon_id, &v.url)];
                if v.is_original {
                    for m in detect_mentions(&v.url, text_of[v.url.as_str()], taxon, &splitter) {
                        mentions.push(MentionRecord {
                            taxon_id: m.taxon_id,
                            source: Source::News.as_str().into(),
                            source_id: m.source_id,
                            position: m.position,
                            published_at: at,
                            text: m.text,
                        });
                    }
                }
                verdicts.push(DedupRecord {
                    taxon_id: taxon.taxon_id.clone(),
                    url: v.url,
                    published_at: at,
                    is_original: v.is_original,
                    duplicate_of: v.duplicate_of,
                    similarity: v.similarity,
                });
            }
        }
        for p in read_jsonl::<PostRecord>(&self.layout.posts())? {
            let Some(taxon) = taxa.iter().find(|t| t.taxon_id == p.taxon_id) else {
                continue;
            };
            for m in detect_mentions(&p.post_id, &p.text, taxon, &splitter) {
                mentions.push(MentionRecord {
                    taxon_id: m.taxon_id,
                    source: Source::Posts.as_str().into(),
                    source_id: m.source_id,
                    position: m.position,
                    published_at: p.published_at,
                    text: m.text,
                });
            }
        }
        write_jsonl_sorted(&self.layout.deduped(), &mut verdicts, |a, b| {
            (&a.taxon_id, a.published_at, &a.url).cmp(&(&b.taxon_id, b.published_at, &b.url))
        })?;
        write_jsonl_sorted(&self.layout.mentions(), &mut mentions, |a, b| {
            (&a.taxon_id, &a.source, &a.source_id, a.position).cmp(&(
                &b.taxon_id,
                &b.source,
                &b.source_id,
                b.position,
            ))
        })?;
        self.log_stage(
            RecordStage::Deduped,
            verdicts.iter().map(|v| {
                (
                    v.taxon_id.as_str(),
                    v.url.as_str(),
                    if v.is_original {
                        "original"
                    } else {
                        "syndicate"
                    },
                )
            }),
        )
    }

    fn bins(&self) -> BinSpec {
        let a = &self.config.analytics;
        BinSpec {
            start: self.config.retrieval.start,
            end: self.config.retrieval.end,
            width: TimeDelta::days(a.bin_days),
            stride: TimeDelta::days(a.stride_days),
        }
    }

    fn analyze(&self) -> Result<()> {
        let taxa = self.load_taxa()?;
        let schema = self.schema()?;
        let ac = &self.config.analytics;
        let analyzer = SentimentAnalyzer::default();
        let bins = self.bins();

        let mut scored: Vec<ScoredMention> = read_jsonl::<MentionRecord>(&self.layout.mentions())?
            .into_iter()
            .map(|m| ScoredMention {
                sentiment: analyzer.score(&m.text).0,
                mention: m,
            })
            .collect();
        write_jsonl_sorted(&self.layout.scored_mentions(), &mut scored, |a, b| {
            let k = |m: &ScoredMention| {
                (
                    m.mention.taxon_id.clone(),
                    m.mention.source.clone(),
                    m.mention.source_id.clone(),
                    m.mention.position,
                )
            };
            k(a).cmp(&k(b))
        })?;

        let queried: HashMap<Key, ArticleMeta> = read_jsonl::<ArticleMeta>(&self.layout.queried())?
            .into_iter()
            .map(|a| ((a.taxon_id.clone(), a.url.clone()), a))
            .collect();
        let originals: Vec<DedupRecord> = read_jsonl::<DedupRecord>(&self.layout.deduped())?
            .into_iter()
            .filter(|d| d.is_original)
            .collect();
        let posts: Vec<PostRecord> = read_jsonl(&self.layout.posts())?;
        let classified: Vec<ClassifiedRecord> = read_jsonl(&self.layout.classified())?;
        let have_posts = self.config.retrieval.posts.is_some();

        let mut results = AnalyticsResults::default();
        // (taxon, source, metric, points, kind)
        let mut series: Vec<(String, Source, &'static str, Vec<SeriesPoint>)> = Vec::new();
        for taxon in &taxa {
            let tid = taxon.taxon_id.as_str();
            let news: Vec<&DedupRecord> = originals.iter().filter(|d| d.taxon_id == tid).collect();
            series.push((
                tid.into(),
                Source::News,
                "volume",
                volume_series(
                    tid,
                    Source::News,
                    news.iter().map(|d| d.published_at),
                    &bins,
                    ac.normalize_volume,
                ),
            ));
            let mut per_source: BTreeMap<(Source, &str), (Timestamp, Vec<f64>)> = BTreeMap::new();
            for s in scored.iter().filter(|s| s.mention.taxon_id == tid) {
                let src = if s.mention.source == "posts" {
                    Source::Posts
                } else {
                    Source::News
                };
                per_source
                    .entry((src, s.mention.source_id.as_str()))
                    .or_insert((s.mention.published_at, Vec::new()))
                    .1
                    .push(s.sentiment);
            }
            let article_scores = |src: Source| -> Vec<(Timestamp, f64)> {
                per_source
                    .iter()
                    .filter(|((s, _), _)| *s == src)
                    .filter_map(|(_, (t, v))| article_sentiment(v).map(|m| (*t, m)))
                    .collect()
            };
            series.push((
                tid.into(),
                Source::News,
                "sentiment",
                sentiment_series(tid, Source::News, article_scores(Source::News), &bins),
            ));
            if have_posts {
                let times = posts
                    .iter()
                    .filter(|p| p.taxon_id == tid)
                    .map(|p| p.published_at);
                series.push((
                    tid.into(),
                    Source::Posts,
                    "volume",
                    volume_series(tid, Source::Posts, times, &bins, ac.normalize_volume),
                ));
                series.push((
                    tid.into(),
                    Source::Posts,
                    "sentiment",
                    sentiment_series(tid, Source::Posts, article_scores(Source::Posts), &bins),
                ));
            }

            let cells = month_country_counts(news.iter().map(|d| {
                (
                    d.published_at,
                    queried
                        .get(&key(tid, &d.url))
                        .and_then(|a| a.country.as_deref()),
                )
            }));
            results
                .country
                .extend(cells.into_iter().map(|c| CountryRow {
                    taxon_id: tid.into(),
                    month: c.month,
                    country: c.country,
                    count: c.count,
                }));

            let scores: Vec<TopicScores> = classified
                .iter()
                .filter(|c| c.taxon_id == tid && c.relevant)
                .map(|c| TopicScores(c.scores.clone()))
                .collect();
            let matrix = topic_cooccurrence(&scores, &schema, ac.topic_threshold)?;
            results
                .cooccurrence
                .extend(
                    matrix
                        .long_form()
                        .into_iter()
                        .map(|(a, b, n)| CooccurrenceRow {
                            taxon_id: tid.into(),
                            label_i: a.into(),
                            label_j: b.into(),
                            count: n,
                        }),
                );
        }

        let bp_cfg = BreakpointConfig {
            penalty: Penalty::Bic { p: ac.penalty_p },
            min_segment: ac.min_segment,
            alpha: ac.alpha,
        };
        let mut found = Vec::new();
        let mut tests = 0;
        for (tid, source, metric, points) in &series {
            if points.len() < MIN_SERIES_LEN {
                continue;
            }
            tests += 1;
            let (values, kind): (Vec<f64>, SeriesKind) = if *metric == "volume" {
                (
                    points.iter().map(|p| p.n as f64).collect(),
                    SeriesKind::Counts,
                )
            } else {
                (
                    points.iter().map(|p| p.value).collect(),
                    SeriesKind::Continuous,
                )
            };
            let series_key = format!("{tid}/{}/{metric}", source.as_str());
            for bp in detect_breakpoints(&series_key, &values, kind, &bp_cfg)? {
                found.push((
                    tid.clone(),
                    *source,
                    *metric,
                    points[bp.index].bin_start,
                    bp,
                ));
            }
        }
        let mut bps: Vec<_> = found.iter().map(|f| f.4.clone()).collect();
        correct_significance(&mut bps, ac.alpha, tests);
        results.tests = tests;
        results.breakpoints = found
            .into_iter()
            .zip(bps)
            .map(|((tid, source, metric, bin_start, _), bp)| BreakpointRow {
                taxon_id: tid,
                source: source.as_str().into(),
                metric: metric.into(),
                index: bp.index,
                bin_start,
                pre_mean: bp.pre_mean,
                post_mean: bp.post_mean,
                p_value: bp.p_value,
                significant: bp.significant,
            })
            .collect();
        results.series = series
            .into_iter()
            .flat_map(|(tid, source, metric, points)| {
                points.into_iter().map(move |p| SeriesRow {
                    taxon_id: tid.clone(),
                    source: source.as_str().into(),
                    metric: metric.into(),
                    bin_start: p.bin_start,
                    bin_width_days: p.bin_width_secs as f64 / 86_400.0,
                    value: p.value,
                    n: p.n,
                })
            })
            .collect();
        results.country.sort();
        results.cooccurrence.sort();
        write_json(&self.layout.analytics(), &results)?;

        let analyzed: BTreeSet<(&str, &str)> = scored
            .iter()
            .filter(|s| s.mention.source == "news")
            .map(|s| (s.mention.taxon_id.as_str(), s.mention.source_id.as_str()))
            .collect();
        self.log_stage(
            RecordStage::Analyzed,
            analyzed.iter().map(|(t, u)| (*t, *u, "ok")),
        )
    }

    fn export(&self) -> Result<()> {
        let results: AnalyticsResults = read_json(&self.layout.analytics())?;
        let funnel = self.funnel()?;
        write_exports(
            &self.layout.exports(),
            self.export_format,
            &funnel,
            &results,
        )?;
        Ok(())
    }

    /// Per-taxon funnel counts from the stage stores.
    pub fn funnel(&self) -> Result<Vec<FunnelRow>> {
        let taxa = match self.layout.taxa().exists() {
            true => self.load_taxa()?,
            false => Vec::new(),
        };
        let mut rows: BTreeMap<String, FunnelRow> = taxa
            .iter()
            .map(|t| {
                (
                    t.taxon_id.clone(),
                    FunnelRow {
                        taxon_id: t.taxon_id.clone(),
                        ..Default::default()
                    },
                )
            })
            .collect();
        for a in read_jsonl::<ArticleMeta>(&self.layout.queried())? {
            if let Some(r) = rows.get_mut(&a.taxon_id) {
                r.queried += 1;
            }
        }
        for c in read_jsonl::<ClassifiedRecord>(&self.layout.classified())? {
            if let Some(r) = rows.get_mut(&c.taxon_id) {
                if c.relevant {
                    r.relevant += 1;
                } else {
                    r.irrelevant += 1;
                }
            }
        }
        for s in read_jsonl::<ScrapedRecord>(&self.layout.scraped())? {
            if let Some(r) = rows.get_mut(&s.taxon_id) {
                if s.status == "ok" {
                    r.scraped += 1;
                } else {
                    r.full_text_unavailable += 1;
                }
            }
        }
        for d in read_jsonl::<DedupRecord>(&self.layout.deduped())? {
            if let Some(r) = rows.get_mut(&d.taxon_id) {
                if d.is_original {
                    r.original += 1;
                } else {
                    r.syndicated += 1;
                }
            }
        }
        for p in read_jsonl::<PostRecord>(&self.layout.posts())? {
            if let Some(r) = rows.get_mut(&p.taxon_id) {
                r.posts += 1;
            }
        }
        let mut analyzed: BTreeSet<(String, String, String)> = BTreeSet::new();
        for m in read_jsonl::<MentionRecord>(&self.layout.mentions())? {
            analyzed.insert((m.taxon_id, m.source, m.source_id));
        }
        for (t, source, _) in analyzed {
            if let Some(r) = rows.get_mut(&t) {
                if source == "posts" {
                    r.posts_analyzed += 1;
                } else {
                    r.analyzed += 1;
                }
            }
        }
        Ok(rows.into_values().collect())
    }

    fn report(&self, stages: Vec<Stage>) -> Result<RunReport> {
        let results: AnalyticsResults = if self.layout.analytics().exists() {
            read_json(&self.layout.analytics())?
        } else {
            AnalyticsResults::default()
        };
        let rejected: Vec<crate::posts::RejectedLine> = if self.layout.posts_rejected().exists() {
            read_json(&self.layout.posts_rejected())?
        } else {
            Vec::new()
        };
        let report = RunReport {
            stages,
            funnel: self.funnel()?,
            cap_warnings: read_jsonl::<CapWarningRecord>(&self.layout.cap_warnings())?.len(),
            rejected_posts: rejected.len(),
            breakpoints: results.breakpoints.len(),
            significant_breakpoints: results.breakpoints.iter().filter(|b| b.significant).count(),
        };
        write_json(&self.layout.report(), &report)?;
        Ok(report)
    }
}

fn write_jsonl_sorted<T: Serialize>(
    path: &Path,
    rows: &mut [T],
    cmp: impl FnMut(&T, &T) -> std::cmp::Ordering,
) -> Result<()> {
    rows.sort_by(cmp);
    let mut bytes = Vec::new();
    for r in rows.iter() {
        serde_json::to_writer(&mut bytes, r).expect("serializable row");
        bytes.push(b'\n');
    }
    crate::store::write_atomic(path, &bytes)
}
