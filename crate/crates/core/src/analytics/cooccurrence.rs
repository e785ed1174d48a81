use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::relevance::{TopicSchema, TopicScores};
use crate::{Error, Result};

/// Symmetric label × label article counts; the diagonal counts articles
/// in which each label is present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CooccurrenceMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl CooccurrenceMatrix {
    pub fn totals(&self) -> Vec<u64> {
        (0..self.labels.len()).map(|i| self.counts[i][i]).collect()
    }

    /// `(label_i, label_j, count)` for `i ≤ j` and nonzero counts.
    pub fn long_form(&self) -> Vec<(&str, &str, u64)> {
        let mut out = Vec::new();
        for i in 0..self.labels.len() {
            for j in i..self.labels.len() {
                if self.counts[i][j] > 0 {
                    out.push((
                        self.labels[i].as_str(),
                        self.labels[j].as_str(),
                        self.counts[i][j],
                    ));
                }
            }
        }
        out
    }
}

/// A label is present in an article when its score is strictly above
/// `threshold`.
pub fn topic_cooccurrence(
    articles: &[TopicScores],
    schema: &TopicSchema,
    threshold: f64,
) -> Result<CooccurrenceMatrix> {
    let k = schema.len();
    let mut counts = vec![vec![0u64; k]; k];
    for scores in articles {
        if scores.0.len() != k {
            return Err(Error::SchemaMismatch {
                expected: k,
                got: scores.0.len(),
            });
        }
        let present: Vec<usize> = scores.present(threshold).collect();
        for (a, &i) in present.iter().enumerate() {
            counts[i][i] += 1;
            for &j in &present[a + 1..] {
                counts[i][j] += 1;
                counts[j][i] += 1;
            }
        }
    }
    Ok(CooccurrenceMatrix {
        labels: schema.labels().to_vec(),
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scores(schema: &TopicSchema, present: &[&str]) -> TopicScores {
        let mut s = TopicScores::zeros(schema.len());
        for p in present {
            s.0[schema.index_of(p).unwrap()] = 0.9;
        }
        s
    }

    #[test]
    fn pair_and_single() {
        let schema = TopicSchema::standard();
        let (w, h) = (
            schema.index_of("wildlife").unwrap(),
            schema.index_of("health").unwrap(),
        );
        let m =
            topic_cooccurrence(&[scores(&schema, &["wildlife", "health"])], &schema, 0.5).unwrap();
        assert_eq!((m.counts[w][h], m.counts[h][w], m.counts[w][w]), (1, 1, 1));
        let m = topic_cooccurrence(&[scores(&schema, &["wildlife"])], &schema, 0.5).unwrap();
        assert_eq!(m.counts.iter().flatten().sum::<u64>(), 1);
        assert_eq!(m.counts[w][w], 1);
    }

    #[test]
    fn threshold_is_strict() {
        let schema = TopicSchema::standard();
        let mut s = TopicScores::zeros(23);
        s.0[0] = 0.5;
        let m = topic_cooccurrence(&[s], &schema, 0.5).unwrap();
        assert_eq!(m.totals().iter().sum::<u64>(), 0);
    }
}
