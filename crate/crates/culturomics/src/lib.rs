//! IO side of the culturomics pipeline.
//!
//! The algorithms live in [`culturomics_core`]; this crate adds file
//! formats, the news provider and archive clients, HTML body extraction,
//! the remote classifier client, the staged pipeline with its JSON-lines
//! stores and CSV exports, and the curation HTTP API.

pub mod api;
pub mod classifier;
pub mod config;
mod error;
pub mod extraction;
pub mod http;
pub mod mock;
pub mod pipeline;
pub mod posts;
pub mod provider;
pub mod store;

pub use culturomics_core as core;
pub use error::{Error, Result};
