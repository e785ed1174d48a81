use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;
use chrono::TimeDelta;
use serde::{Deserialize, Serialize};

use super::tfidf::{cosine, TfidfVector};
use crate::Timestamp;

pub const DEFAULT_SIMILARITY_THRESHOLD: f64 = 0.95;
pub const DEFAULT_WINDOW_DAYS: i64 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyndicationConfig {
    pub threshold: f64,
    pub window: TimeDelta,
}

impl Default for SyndicationConfig {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_SIMILARITY_THRESHOLD,
            window: TimeDelta::days(DEFAULT_WINDOW_DAYS),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatedVector {
    pub url: String,
    pub published_at: Timestamp,
    pub vector: TfidfVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DedupVerdict {
    pub url: String,
    pub is_original: bool,
    pub duplicate_of: Option<String>,
    /// Similarity to `duplicate_of`, or the highest similarity seen in the
    /// window for originals.
    pub similarity: f64,
}

/// Verdicts in `(published_at, url)` order.
///
/// An article is a syndicate when some earlier article at most
/// `config.window` older has cosine similarity strictly above
/// `config.threshold`; it then points at the earliest such article.
/// Syndicates stay in the window and can themselves be matched.
pub fn mark_syndication(articles: &[DatedVector], config: &SyndicationConfig) -> Vec<DedupVerdict> {
    let mut order: Vec<&DatedVector> = articles.iter().collect();
    order.sort_by(|a, b| {
        a.published_at
            .cmp(&b.published_at)
            .then_with(|| a.url.cmp(&b.url))
    });
    let mut window: VecDeque<&DatedVector> = VecDeque::new();
    let mut out = Vec::with_capacity(order.len());
    for art in order {
        while window
            .front()
            .is_some_and(|f| art.published_at - f.published_at > config.window)
        {
            window.pop_front();
        }
        let mut best = 0.0f64;
        let mut hit = None;
        for prev in &window {
            let s = cosine(&prev.vector, &art.vector);
            if s > config.threshold {
                hit = Some((prev, s));
                break;
            }
            best = best.max(s);
        }
        out.push(match hit {
            Some((prev, s)) => DedupVerdict {
                url: art.url.clone(),
                is_original: false,
                duplicate_of: Some(prev.url.clone()),
                similarity: s,
            },
            None => DedupVerdict {
                url: art.url.clone(),
                is_original: true,
                duplicate_of: None,
                similarity: best,
            },
        });
        window.push_back(art);
    }
    out
}
