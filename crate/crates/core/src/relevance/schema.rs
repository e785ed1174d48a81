use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const RELEVANCE_THRESHOLD: f64 = 0.5;

const RELEVANT: [&str; 15] = [
    "agriculture",
    "climate change",
    "conservation",
    "energy",
    "health",
    "infrastructure",
    "natural disasters",
    "nature",
    "outdoor recreation",
    "science and technology",
    "tourism",
    "wildlife",
    "habitat loss",
    "invasive species",
    "pollution",
];

const IRRELEVANT: [&str; 8] = [
    "business",
    "crime",
    "education",
    "entertainment",
    "food",
    "holidays",
    "politics",
    "sports",
];

/// Ordered topic labels split into relevant and irrelevant groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SchemaFile", into = "SchemaFile")]
pub struct TopicSchema {
    labels: Vec<String>,
    relevant: BTreeSet<String>,
}

#[derive(Serialize, Deserialize)]
struct SchemaFile {
    labels: Vec<String>,
    relevant: Vec<String>,
    irrelevant: Vec<String>,
}

impl TryFrom<SchemaFile> for TopicSchema {
    type Error = Error;

    fn try_from(f: SchemaFile) -> Result<Self> {
        let s = TopicSchema::new(f.labels, f.relevant)?;
        let irrelevant: BTreeSet<String> = f.irrelevant.into_iter().collect();
        if irrelevant != s.irrelevant().map(ToString::to_string).collect() {
            return Err(Error::InvalidSchema(
                "irrelevant labels must be the complement of relevant".into(),
            ));
        }
        Ok(s)
    }
}

impl From<TopicSchema> for SchemaFile {
    fn from(s: TopicSchema) -> Self {
        SchemaFile {
            irrelevant: s.irrelevant().map(ToString::to_string).collect(),
            relevant: s
                .labels
                .iter()
                .filter(|l| s.relevant.contains(*l))
                .cloned()
                .collect(),
            labels: s.labels,
        }
    }
}

impl Default for TopicSchema {
    fn default() -> Self {
        Self::standard()
    }
}

impl TopicSchema {
    /// The 23-label schema: 15 relevant topics followed by 8 irrelevant ones.
    pub fn standard() -> Self {
        let labels = RELEVANT
            .iter()
            .chain(IRRELEVANT.iter())
            .map(|s| s.to_string())
            .collect();
        Self::new(labels, RELEVANT.iter().map(|s| s.to_string())).expect("built-in schema is valid")
    }

    pub fn new(labels: Vec<String>, relevant: impl IntoIterator<Item = String>) -> Result<Self> {
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::InvalidSchema("duplicate label".into()));
        }
        if labels.is_empty() {
            return Err(Error::InvalidSchema("no labels".into()));
        }
        let relevant: BTreeSet<String> = relevant.into_iter().collect();
        if let Some(bad) = relevant.iter().find(|r| !distinct.contains(r)) {
            return Err(Error::InvalidSchema(alloc::format!(
                "unknown relevant label {bad:?}"
            )));
        }
        Ok(Self { labels, relevant })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn is_relevant(&self, label: &str) -> bool {
        self.relevant.contains(label)
    }

    pub fn relevant(&self) -> impl Iterator<Item = &str> {
        self.labels
            .iter()
            .filter(|l| self.relevant.contains(*l))
            .map(String::as_str)
    }

    pub fn irrelevant(&self) -> impl Iterator<Item = &str> {
        self.labels
            .iter()
            .filter(|l| !self.relevant.contains(*l))
            .map(String::as_str)
    }
}

/// Per-label scores aligned with a schema's label order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TopicScores(pub Vec<f64>);

impl TopicScores {
    pub fn zeros(n: usize) -> Self {
        Self(alloc::vec![0.0; n])
    }

    pub fn validate(&self) -> Result<()> {
        match self.0.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            Some(s) => Err(Error::InvalidSchema(alloc::format!(
                "score {s} outside [0, 1]"
            ))),
            None => Ok(()),
        }
    }

    pub fn is_unit_sum(&self) -> bool {
        libm::fabs(self.0.iter().sum::<f64>() - 1.0) <= 1e-6
    }

    /// Labels scoring strictly above `threshold`.
    pub fn present(&self, threshold: f64) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(move |(_, &s)| s > threshold)
            .map(|(i, _)| i)
    }
}

/// True when any relevant label scores strictly above `threshold`.
pub fn decide_relevance(
    scores: &TopicScores,
    schema: &TopicSchema,
    threshold: f64,
) -> Result<bool> {
    if scores.0.len() != schema.len() {
        return Err(Error::SchemaMismatch {
            expected: schema.len(),
            got: scores.0.len(),
        });
    }
    Ok(schema
        .labels
        .iter()
        .zip(&scores.0)
        .any(|(l, &s)| s > threshold && schema.relevant.contains(l)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_schema_partition() {
        let s = TopicSchema::standard();
        assert_eq!(s.len(), 23);
        assert_eq!(s.relevant().count(), 15);
        assert_eq!(s.irrelevant().count(), 8);
        assert!(s.is_relevant("wildlife"));
        assert!(!s.is_relevant("sports"));
    }

    #[test]
    fn decision_rule() {
        let s = TopicSchema::standard();
        let w = s.index_of("wildlife").unwrap();
        let mut v = TopicScores::zeros(23);
        v.0[w] = 0.7;
        assert!(decide_relevance(&v, &s, RELEVANCE_THRESHOLD).unwrap());
        v.0[w] = 0.5;
        assert!(!decide_relevance(&v, &s, RELEVANCE_THRESHOLD).unwrap());
        v.0[s.index_of("sports").unwrap()] = 0.99;
        assert!(!decide_relevance(&v, &s, RELEVANCE_THRESHOLD).unwrap());
    }

    #[test]
    fn misaligned_scores() {
        let r = decide_relevance(&TopicScores::zeros(22), &TopicSchema::standard(), 0.5);
        assert!(matches!(
            r,
            Err(Error::SchemaMismatch {
                expected: 23,
                got: 22
            })
        ));
    }

    #[test]
    fn schema_json_round_trip() {
        let s = TopicSchema::standard();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<TopicSchema>(&json).unwrap(), s);
        let bad = r#"{"labels":["a","b"],"relevant":["a"],"irrelevant":["a"]}"#;
        assert!(serde_json::from_str::<TopicSchema>(bad).is_err());
    }
}
