use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::relevance::mention_sentences;
use crate::sentences::SentenceSplitter;
use crate::taxonomy::FolkTaxon;
use crate::text::KeywordMatcher;

/// A mention sentence together with the sentence before it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionSnippet {
    /// Article URL or post id.
    pub source_id: String,
    pub taxon_id: String,
    pub text: String,
    /// Sentence index of the mention within the document.
    pub position: usize,
}

pub fn detect_mentions(
    source_id: &str,
    text: &str,
    taxon: &FolkTaxon,
    splitter: &SentenceSplitter,
) -> Vec<MentionSnippet> {
    let sentences = splitter.split(text);
    let matcher = KeywordMatcher::new(&taxon.positive_keywords, &taxon.negative_keywords);
    mention_sentences(&sentences, &matcher)
        .into_iter()
        .map(|i| MentionSnippet {
            source_id: source_id.into(),
            taxon_id: taxon.taxon_id.clone(),
            text: sentences[i.saturating_sub(1)..=i].join(" "),
            position: i,
        })
        .collect()
}
