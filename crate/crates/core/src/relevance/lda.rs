//! Latent Dirichlet allocation fitted by collapsed Gibbs sampling.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::text::{bag_of_words, Stopwords};
use crate::{Error, Result};

/// Documents as indices into a sorted vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub vocabulary: Vec<String>,
    pub docs: Vec<Vec<u32>>,
}

impl Corpus {
    pub fn token_count(&self) -> usize {
        self.docs.iter().map(Vec::len).sum()
    }
}

/// Tokenize, drop stopwords and words found in fewer than `min_df`
/// documents. Documents left empty are kept so indices line up with input.
pub fn prepare_corpus<S: AsRef<str>>(
    texts: &[S],
    stopwords: &Stopwords,
    min_df: usize,
) -> Result<Corpus> {
    let tokenized: Vec<Vec<String>> = texts
        .iter()
        .map(|t| bag_of_words(t.as_ref(), stopwords))
        .collect();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in &tokenized {
        let mut seen: Vec<&str> = doc.iter().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for w in seen {
            *df.entry(w).or_default() += 1;
        }
    }
    let vocabulary: Vec<String> = df
        .iter()
        .filter(|(_, &n)| n >= min_df)
        .map(|(w, _)| String::from(*w))
        .collect();
    let docs: Vec<Vec<u32>> = tokenized
        .iter()
        .map(|doc| {
            doc.iter()
                .filter_map(|w| vocabulary.binary_search(w).ok().map(|i| i as u32))
                .collect()
        })
        .collect();
    if docs.iter().all(Vec::is_empty) {
        return Err(Error::EmptyCorpus);
    }
    Ok(Corpus { vocabulary, docs })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub topics: usize,
    pub iterations: usize,
    /// Document-topic prior; `None` means `50 / topics`.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub seed: u64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        Self {
            topics: 40,
            iterations: 150,
            alpha: None,
            beta: 0.01,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    pub topic_count: usize,
    pub vocabulary: Vec<String>,
    /// `K × V`.
    pub topic_word_counts: Vec<Vec<u32>>,
    /// `D × K`.
    pub doc_topic_counts: Vec<Vec<u32>>,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
}

/// Per-topic ranked words; `clamped` is set when fewer than the requested
/// number of words exist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopWords {
    pub topics: Vec<Vec<String>>,
    pub clamped: bool,
}

impl LdaModel {
    pub fn topic_totals(&self) -> Vec<u64> {
        self.topic_word_counts
            .iter()
            .map(|r| r.iter().map(|&c| u64::from(c)).sum())
            .collect()
    }

    /// Smoothed `θ_d`.
    pub fn doc_topic_distribution(&self, doc: usize) -> Vec<f64> {
        let row = &self.doc_topic_counts[doc];
        let n: u32 = row.iter().sum();
        let denom = f64::from(n) + self.topic_count as f64 * self.alpha;
        row.iter()
            .map(|&c| (f64::from(c) + self.alpha) / denom)
            .collect()
    }

    /// The `n` most probable words per topic, ties broken by word order.
    pub fn top_words(&self, n: usize) -> TopWords {
        let clamped = n > self.vocabulary.len();
        let n = n.min(self.vocabulary.len());
        let topics = self
            .topic_word_counts
            .iter()
            .map(|row| {
                let mut idx: Vec<usize> = (0..row.len()).collect();
                idx.sort_by(|&a, &b| {
                    row[b]
                        .cmp(&row[a])
                        .then_with(|| self.vocabulary[a].cmp(&self.vocabulary[b]))
                });
                idx.into_iter()
                    .take(n)
                    .map(|i| self.vocabulary[i].clone())
                    .collect()
            })
            .collect();
        TopWords { topics, clamped }
    }
}

pub fn lda_fit(corpus: &Corpus, config: &LdaConfig) -> Result<LdaModel> {
    lda_fit_observed(corpus, config, |_, _| {})
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// As [`lda_fit`], calling `observe(iteration, model)` after each sweep.
pub fn lda_fit_observed<F>(corpus: &Corpus, config: &LdaConfig, mut observe: F) -> Result<LdaModel>
where
    F: FnMut(usize, &LdaModel),
{
    if corpus.token_count() == 0 {
        return Err(Error::EmptyCorpus);
    }
    let k = config.topics;
    if k == 0
        || config.beta.is_nan()
        || config.beta <= 0.0
        || config.alpha.is_some_and(|a| a.is_nan() || a <= 0.0)
    {
        return Err(Error::InvalidConstraints(
            "topics, alpha and beta must be positive".into(),
        ));
    }
    let v = corpus.vocabulary.len();
    let alpha = config.alpha.unwrap_or(50.0 / k as f64);
    let beta = config.beta;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = LdaModel {
        topic_count: k,
        vocabulary: corpus.vocabulary.clone(),
        topic_word_counts: vec![vec![0; v]; k],
        doc_topic_counts: vec![vec![0; k]; corpus.docs.len()],
        alpha,
        beta,
        seed: config.seed,
    };
    let mut totals = vec![0u32; k];
    let mut z: Vec<Vec<usize>> = corpus
        .docs
        .iter()
        .enumerate()
        .map(|(d, doc)| {
            doc.iter()
                .map(|&w| {
                    let t = (rng.next_u64() % k as u64) as usize;
                    model.topic_word_counts[t][w as usize] += 1;
                    model.doc_topic_counts[d][t] += 1;
                    totals[t] += 1;
                    t
                })
                .collect()
        })
        .collect();
    let vbeta = v as f64 * beta;
    let mut weights = vec![0.0f64; k];
    for it in 0..config.iterations {
        for (d, doc) in corpus.docs.iter().enumerate() {
            for (i, &w) in doc.iter().enumerate() {
                let w = w as usize;
                let old = z[d][i];
                model.topic_word_counts[old][w] -= 1;
                model.doc_topic_counts[d][old] -= 1;
                totals[old] -= 1;
                let mut acc = 0.0;
                for (t, slot) in weights.iter_mut().enumerate() {
                    acc += (f64::from(model.doc_topic_counts[d][t]) + alpha)
                        * (f64::from(model.topic_word_counts[t][w]) + beta)
                        / (f64::from(totals[t]) + vbeta);
                    *slot = acc;
                }
                let u = uniform(&mut rng) * acc;
                let new = weights.iter().position(|&c| u < c).unwrap_or(k - 1);
                z[d][i] = new;
                model.topic_word_counts[new][w] += 1;
                model.doc_topic_counts[d][new] += 1;
                totals[new] += 1;
            }
        }
        observe(it, &model);
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn two_theme_texts(n: usize, seed: u64) -> Vec<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|d| {
                let theme = if d % 2 == 0 { "alpha" } else { "omega" };
                (0..30)
                    .map(|_| format!("{theme}{}", rng.next_u64() % 50))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }

    #[test]
    fn single_topic_is_certain() {
        let corpus = prepare_corpus(&two_theme_texts(20, 1), &Stopwords::default(), 2).unwrap();
        let cfg = LdaConfig {
            topics: 1,
            iterations: 5,
            ..LdaConfig::default()
        };
        let m = lda_fit(&corpus, &cfg).unwrap();
        for d in 0..corpus.docs.len() {
            assert_eq!(m.doc_topic_distribution(d), vec![1.0]);
        }
    }

    #[test]
    fn empty_corpus() {
        let r = prepare_corpus(&["the and of", "a an"], &Stopwords::default(), 1);
        assert!(matches!(r, Err(Error::EmptyCorpus)));
    }

    #[test]
    fn min_df_filters_rare_words() {
        let c = prepare_corpus(
            &["bats caves", "bats roost", "owls"],
            &Stopwords::default(),
            2,
        )
        .unwrap();
        assert_eq!(c.vocabulary, vec!["bats"]);
        assert_eq!(c.docs, vec![vec![0], vec![0], vec![]]);
    }

    #[test]
    fn top_words_ties_are_lexicographic() {
        let m = LdaModel {
            topic_count: 1,
            vocabulary: vec!["ant".into(), "bee".into(), "cat".into()],
            topic_word_counts: vec![vec![2, 5, 5]],
            doc_topic_counts: vec![],
            alpha: 1.0,
            beta: 0.01,
            seed: 0,
        };
        assert_eq!(m.top_words(2).topics, vec![vec!["bee", "cat"]]);
        assert!(m.top_words(0).topics[0].is_empty());
        let all = m.top_words(10);
        assert!(all.clamped);
        assert_eq!(all.topics[0].len(), 3);
    }

    #[test]
    fn counts_are_conserved_each_sweep() {
        let corpus = prepare_corpus(&two_theme_texts(40, 2), &Stopwords::default(), 2).unwrap();
        let total = corpus.token_count() as u64;
        let cfg = LdaConfig {
            topics: 3,
            iterations: 10,
            seed: 5,
            ..LdaConfig::default()
        };
        let mut sweeps = 0;
        lda_fit_observed(&corpus, &cfg, |_, m| {
            sweeps += 1;
            assert_eq!(m.topic_totals().iter().sum::<u64>(), total);
            let doc_total: u64 = m
                .doc_topic_counts
                .iter()
                .flatten()
                .map(|&c| u64::from(c))
                .sum();
            assert_eq!(doc_total, total);
        })
        .unwrap();
        assert_eq!(sweeps, 10);
    }
}
