//! Pipeline configuration, read from TOML. Relative paths resolve against
//! the configuration file's directory.

use std::path::{Path, PathBuf};

use chrono::TimeDelta;
use culturomics_core::postprocess::{DEFAULT_SIMILARITY_THRESHOLD, DEFAULT_WINDOW_DAYS};
use culturomics_core::relevance::RELEVANCE_THRESHOLD;
use culturomics_core::retrieval::QueryConstraints;
use culturomics_core::Timestamp;
use serde::{Deserialize, Serialize};

use crate::extraction::WAYBACK_AVAILABILITY_ENDPOINT;
use crate::http::HttpConfig;
use crate::provider::GDELT_DOC_ENDPOINT;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub output_dir: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub taxonomy: TaxonomyConfig,
    pub retrieval: RetrievalConfig,
    #[serde(default)]
    pub relevance: RelevanceConfig,
    #[serde(default)]
    pub extraction: ExtractionConfig,
    #[serde(default)]
    pub postprocess: PostprocessConfig,
    #[serde(default)]
    pub analytics: AnalyticsConfig,
    #[serde(default)]
    pub http: HttpConfig,
    #[serde(default)]
    pub concurrency: ConcurrencyConfig,
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaxonomyConfig {
    /// Species list (TSV).
    pub species: PathBuf,
    /// Curation edit log (JSON lines); optional.
    #[serde(default)]
    pub edits: Option<PathBuf>,
    /// Restrict the run to these taxon ids; empty means every taxon.
    #[serde(default)]
    pub select: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProviderConfig {
    Gdelt {
        #[serde(default = "gdelt_endpoint")]
        endpoint: String,
    },
    /// Offline article store (JSON lines of stored articles).
    Fixture { articles: PathBuf },
}

fn gdelt_endpoint() -> String {
    GDELT_DOC_ENDPOINT.into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetrievalConfig {
    #[serde(default = "default_language")]
    pub language: String,
    pub start: Timestamp,
    pub end: Timestamp,
    #[serde(default = "default_max_records")]
    pub max_records_per_call: usize,
    #[serde(default = "default_max_query_len")]
    pub max_query_len: usize,
    #[serde(default = "default_min_window_minutes")]
    pub min_window_minutes: i64,
    pub provider: ProviderConfig,
    /// Social-media post archive (JSON lines); optional.
    #[serde(default)]
    pub posts: Option<PathBuf>,
}

fn default_language() -> String {
    "english".into()
}
fn default_max_records() -> usize {
    QueryConstraints::DEFAULT_MAX_RECORDS
}
fn default_max_query_len() -> usize {
    QueryConstraints::DEFAULT_MAX_QUERY_LEN
}
fn default_min_window_minutes() -> i64 {
    60
}

impl RetrievalConfig {
    pub fn constraints(&self) -> Result<QueryConstraints> {
        let c = QueryConstraints {
            language: self.language.clone(),
            start: self.start,
            end: self.end,
            max_records_per_call: self.max_records_per_call,
            max_query_len: self.max_query_len,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn min_window(&self) -> TimeDelta {
        TimeDelta::minutes(self.min_window_minutes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassifierConfig {
    Fallback,
    /// Service root; requests go to `{url}/classify`.
    Remote {
        url: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelevanceConfig {
    pub threshold: f64,
    pub batch_size: usize,
    pub backend: ClassifierConfig,
    /// Topic schema (JSON); the built-in 23-label schema when absent.
    pub schema: Option<PathBuf>,
}

impl Default for RelevanceConfig {
    fn default() -> Self {
        Self {
            threshold: RELEVANCE_THRESHOLD,
            batch_size: 32,
            backend: ClassifierConfig::Fallback,
            schema: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PagesConfig {
    Web {
        #[serde(default = "wayback_endpoint")]
        archive_endpoint: String,
    },
    /// Directory with `index.jsonl` and HTML files.
    Fixture { dir: PathBuf },
}

fn wayback_endpoint() -> String {
    WAYBACK_AVAILABILITY_ENDPOINT.into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractionConfig {
    pub pages: PagesConfig,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            pages: PagesConfig::Web {
                archive_endpoint: wayback_endpoint(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PostprocessConfig {
    pub similarity_threshold: f64,
    pub window_days: i64,
}

impl Default for PostprocessConfig {
    fn default() -> Self {
        Self {
            similarity_threshold: DEFAULT_SIMILARITY_THRESHOLD,
            window_days: DEFAULT_WINDOW_DAYS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyticsConfig {
    pub bin_days: i64,
    pub stride_days: i64,
    /// Divide volume series by their maximum.
    pub normalize_volume: bool,
    pub alpha: f64,
    /// BIC multiplier `p` in the `p * ln n` penalty.
    pub penalty_p: f64,
    pub min_segment: usize,
    /// Topic presence threshold for co-occurrence.
    pub topic_threshold: f64,
}

impl Default for AnalyticsConfig {
    fn default() -> Self {
        Self {
            bin_days: 14,
            stride_days: 14,
            normalize_volume: false,
            alpha: 0.05,
            penalty_p: 3.0,
            min_segment: 2,
            topic_threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConcurrencyConfig {
    pub fetch_workers: usize,
}

impl Default for ConcurrencyConfig {
    fn default() -> Self {
        Self { fetch_workers: 4 }
    }
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.resolve_paths(base_dir);
        Ok(cfg)
    }

    /// Load, resolve paths and validate.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let cfg = Self::from_toml(&text, base)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        resolve(base, &mut self.output_dir);
        resolve(base, &mut self.taxonomy.species);
        if let Some(p) = self.taxonomy.edits.as_mut() {
            resolve(base, p);
        }
        if let ProviderConfig::Fixture { articles } = &mut self.retrieval.provider {
            resolve(base, articles);
        }
        if let Some(p) = self.retrieval.posts.as_mut() {
            resolve(base, p);
        }
        if let Some(p) = self.relevance.schema.as_mut() {
            resolve(base, p);
        }
        if let PagesConfig::Fixture { dir } = &mut self.extraction.pages {
            resolve(base, dir);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        unit("relevance.threshold", self.relevance.threshold)?;
        unit(
            "postprocess.similarity_threshold",
            self.postprocess.similarity_threshold,
        )?;
        unit("analytics.alpha", self.analytics.alpha)?;
        unit("analytics.topic_threshold", self.analytics.topic_threshold)?;
        self.retrieval
            .constraints()
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.postprocess.window_days < 0 {
            return Err(Error::Config(
                "postprocess.window_days must be non-negative".into(),
            ));
        }
        if self.analytics.bin_days <= 0 || self.analytics.stride_days <= 0 {
            return Err(Error::Config(
                "analytics bin and stride must be positive".into(),
            ));
        }
        if self.retrieval.min_window_minutes <= 0 {
            return Err(Error::Config(
                "retrieval.min_window_minutes must be positive".into(),
            ));
        }
        if self.relevance.batch_size == 0 {
            return Err(Error::Config(
                "relevance.batch_size must be positive".into(),
            ));
        }
        let mut files: Vec<(&str, &Path)> = vec![("taxonomy.species", &self.taxonomy.species)];
        if let Some(p) = &self.taxonomy.edits {
            files.push(("taxonomy.edits", p));
        }
        if let ProviderConfig::Fixture { articles } = &self.retrieval.provider {
            files.push(("retrieval.provider.articles", articles));
        }
        if let Some(p) = &self.retrieval.posts {
            files.push(("retrieval.posts", p));
        }
        if let Some(p) = &self.relevance.schema {
            files.push(("relevance.schema", p));
        }
        if let PagesConfig::Fixture { dir } = &self.extraction.pages {
            files.push(("extraction.pages.dir", dir));
        }
        for (name, p) in files {
            if !p.exists() {
                return Err(Error::Config(format!(
                    "{name}: {} does not exist",
                    p.display()
                )));
            }
        }
        Ok(())
    }
}
