//! Sentiment, aggregation, changepoints and topic co-occurrence.

mod aggregate;
mod breakpoints;
mod cooccurrence;
mod sentiment;
pub mod stats;

pub use aggregate::{
    article_sentiment, month_country_counts, sentiment_series, volume_series, BinSpec, SeriesPoint,
    Source, VolumeCell,
};
pub use breakpoints::{
    anscombe, correct_significance, detect_breakpoints, difference_variance, optimal_partition,
    pelt, Breakpoint, BreakpointConfig, MeanCost, Penalty, SeriesKind, MIN_SERIES_LEN,
};
pub use cooccurrence::{topic_cooccurrence, CooccurrenceMatrix};
pub use sentiment::{SentimentAnalyzer, SentimentScore};
