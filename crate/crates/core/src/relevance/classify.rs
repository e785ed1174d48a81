use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::convert::Infallible;

use super::schema::{TopicSchema, TopicScores};
use crate::text::{fold_plural, tokenize_words};
use crate::{Error, Result};

const RULES: &str = include_str!("../../data/topic_rules.tsv");

/// Scores titles against a label list; rows follow `titles`, columns
/// follow `labels`.
pub trait TopicClassifier {
    type Error;

    fn classify(
        &self,
        titles: &[String],
        labels: &[String],
    ) -> core::result::Result<Vec<Vec<f64>>, Self::Error>;
}

#[derive(Debug, thiserror::Error)]
pub enum ClassifyError<E> {
    #[error("classifier backend failed: {0}")]
    Backend(E),
    #[error(transparent)]
    Contract(#[from] Error),
}

/// Classify in batches of `batch_size`, checking every returned row
/// against the schema.
pub fn classify_titles<C: TopicClassifier + ?Sized>(
    titles: &[String],
    schema: &TopicSchema,
    backend: &C,
    batch_size: usize,
) -> core::result::Result<Vec<TopicScores>, ClassifyError<C::Error>> {
    let mut out = Vec::with_capacity(titles.len());
    for batch in titles.chunks(batch_size.max(1)) {
        let rows = backend
            .classify(batch, schema.labels())
            .map_err(ClassifyError::Backend)?;
        if rows.len() != batch.len() {
            return Err(Error::SchemaMismatch {
                expected: batch.len(),
                got: rows.len(),
            }
            .into());
        }
        for row in rows {
            if row.len() != schema.len() {
                return Err(Error::SchemaMismatch {
                    expected: schema.len(),
                    got: row.len(),
                }
                .into());
            }
            let scores = TopicScores(row);
            scores.validate()?;
            out.push(scores);
        }
    }
    Ok(out)
}

fn folded_words(text: &str) -> Vec<String> {
    tokenize_words(text)
        .iter()
        .map(|t| fold_plural(&t.word))
        .collect()
}

/// Transparent keyword scorer: a label scores `h / (h + 0.5)` where `h`
/// counts the distinct rule keywords found in the title, so one hit gives
/// 2/3 and no hit gives 0.
#[derive(Debug, Clone)]
pub struct KeywordScorer {
    version: String,
    rules: Vec<(String, Vec<Vec<String>>)>,
}

impl Default for KeywordScorer {
    fn default() -> Self {
        Self::parse(RULES).expect("built-in rule table is valid")
    }
}

impl KeywordScorer {
    /// Parse a rule table: `label<TAB>kw,kw,...` per line, `#` comments,
    /// and an optional `# version N` line.
    pub fn parse(table: &str) -> Result<Self> {
        let mut version = String::from("0");
        let mut rules = Vec::new();
        for (i, line) in table.lines().enumerate() {
            let line = line.trim_end();
            if let Some(c) = line.strip_prefix('#') {
                if let Some(v) = c.trim().strip_prefix("version ") {
                    version = v.trim().into();
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let (label, kws) = line.split_once('\t').ok_or_else(|| Error::Data {
                line: i + 1,
                reason: "expected label<TAB>keywords".into(),
            })?;
            let kws = kws
                .split(',')
                .map(folded_words)
                .filter(|w| !w.is_empty())
                .collect();
            rules.push((String::from(label.trim()), kws));
        }
        Ok(Self { version, rules })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn score(&self, title: &str, labels: &[String]) -> Vec<f64> {
        let words = folded_words(title);
        labels
            .iter()
            .map(|label| {
                let hits: BTreeSet<&Vec<String>> = self
                    .rules
                    .iter()
                    .filter(|(l, _)| l == label)
                    .flat_map(|(_, kws)| kws)
                    .filter(|kw| words.windows(kw.len()).any(|w| w == kw.as_slice()))
                    .collect();
                let h = hits.len() as f64;
                h / (h + 0.5)
            })
            .collect()
    }
}

impl TopicClassifier for KeywordScorer {
    type Error = Infallible;

    fn classify(
        &self,
        titles: &[String],
        labels: &[String],
    ) -> core::result::Result<Vec<Vec<f64>>, Infallible> {
        Ok(titles.iter().map(|t| self.score(t, labels)).collect())
    }
}
