use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::sentences::SentenceSplitter;
use crate::taxonomy::FolkTaxon;
use crate::text::KeywordMatcher;

pub const SNIPPET_HALF_WINDOW: usize = 3;

/// Context window around one sentence that mentions a taxon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snippet {
    pub article_url: String,
    pub taxon_id: String,
    pub sentences: Vec<String>,
    /// Position of the mention sentence within `sentences`.
    pub mention_index: usize,
}

/// Indices of sentences holding at least one unsubsumed keyword hit.
pub fn mention_sentences(sentences: &[String], matcher: &KeywordMatcher) -> Vec<usize> {
    sentences
        .iter()
        .enumerate()
        .filter(|(_, s)| matcher.is_mention(s))
        .map(|(i, _)| i)
        .collect()
}

pub fn extract_snippets(
    article_url: &str,
    document_text: &str,
    taxon: &FolkTaxon,
    half_window: usize,
    splitter: &SentenceSplitter,
) -> Vec<Snippet> {
    let sentences = splitter.split(document_text);
    let matcher = KeywordMatcher::new(&taxon.positive_keywords, &taxon.negative_keywords);
    mention_sentences(&sentences, &matcher)
        .into_iter()
        .map(|i| {
            let lo = i.saturating_sub(half_window);
            let hi = (i + half_window + 1).min(sentences.len());
            Snippet {
                article_url: article_url.into(),
                taxon_id: taxon.taxon_id.clone(),
                sentences: sentences[lo..hi].to_vec(),
                mention_index: i - lo,
            }
        })
        .collect()
}
