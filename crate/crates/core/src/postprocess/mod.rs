//! Syndication detection and mention snippets.

mod mentions;
mod syndication;
mod tfidf;

pub use crate::sentences::split_sentences;
pub use mentions::{detect_mentions, MentionSnippet};
pub use syndication::{
    mark_syndication, DatedVector, DedupVerdict, SyndicationConfig, DEFAULT_SIMILARITY_THRESHOLD,
    DEFAULT_WINDOW_DAYS,
};
pub use tfidf::{cosine, tfidf_vectors, TfidfVector};
