//! Topic schema, title classification and the relevance decision.

mod classify;
mod lda;
mod schema;
mod snippets;

pub use classify::{classify_titles, ClassifyError, KeywordScorer, TopicClassifier};
pub use lda::{lda_fit, lda_fit_observed, prepare_corpus, Corpus, LdaConfig, LdaModel, TopWords};
pub use schema::{decide_relevance, TopicSchema, TopicScores, RELEVANCE_THRESHOLD};
pub use snippets::{extract_snippets, mention_sentences, Snippet, SNIPPET_HALF_WINDOW};
