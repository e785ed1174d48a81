//! Pure algorithms behind the culturomics pipeline.
//!
//! Everything here runs on `alloc` alone: folk-taxonomy graph construction
//! and curation, keyword query compilation, adaptive window slicing over an
//! abstract article source, topic modelling and the relevance rule, TF-IDF
//! syndication detection, mention extraction, lexicon sentiment scoring and
//! mean-shift breakpoint detection. IO, HTTP and file formats live in the
//! `culturomics` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analytics;
mod error;
pub mod postprocess;
pub mod relevance;
pub mod retrieval;
pub mod sentences;
pub mod taxonomy;
pub mod text;

pub use error::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// UTC instant used for every record timestamp.
pub type Timestamp = chrono::DateTime<chrono::Utc>;
