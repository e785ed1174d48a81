use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::text::{bag_of_words, Stopwords};

/// Sparse TF-IDF weights with their cached Euclidean norm.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TfidfVector {
    pub weights: BTreeMap<String, f64>,
    pub norm: f64,
}

impl TfidfVector {
    pub fn from_weights(weights: BTreeMap<String, f64>) -> Self {
        let norm = libm::sqrt(weights.values().map(|w| w * w).sum());
        Self { weights, norm }
    }
}

/// Raw term counts times `ln((1 + N) / (1 + df)) + 1`.
pub fn tfidf_vectors<S: AsRef<str>>(corpus: &[S], stopwords: &Stopwords) -> Vec<TfidfVector> {
    let counts: Vec<BTreeMap<String, u32>> = corpus
        .iter()
        .map(|doc| {
            let mut tf = BTreeMap::new();
            for w in bag_of_words(doc.as_ref(), stopwords) {
                *tf.entry(w).or_insert(0) += 1;
            }
            tf
        })
        .collect();
    let mut df: BTreeMap<&str, u32> = BTreeMap::new();
    for tf in &counts {
        for w in tf.keys() {
            *df.entry(w).or_insert(0) += 1;
        }
    }
    let n = corpus.len() as f64;
    let idf: BTreeMap<&str, f64> = df
        .iter()
        .map(|(w, &d)| (*w, libm::log((1.0 + n) / (1.0 + f64::from(d))) + 1.0))
        .collect();
    counts
        .iter()
        .map(|tf| {
            TfidfVector::from_weights(
                tf.iter()
                    .map(|(w, &c)| (w.clone(), f64::from(c) * idf[w.as_str()]))
                    .collect(),
            )
        })
        .collect()
}

/// Cosine similarity clamped to `[0, 1]`; zero when either vector is zero.
pub fn cosine(a: &TfidfVector, b: &TfidfVector) -> f64 {
    if a.norm == 0.0 || b.norm == 0.0 {
        return 0.0;
    }
    let (small, large) = if a.weights.len() <= b.weights.len() {
        (a, b)
    } else {
        (b, a)
    };
    let dot: f64 = small
        .weights
        .iter()
        .filter_map(|(w, x)| large.weights.get(w).map(|y| x * y))
        .sum();
    (dot / (a.norm * b.norm)).clamp(0.0, 1.0)
}
