#![allow(dead_code)]

use std::path::PathBuf;

use culturomics::http::{HttpClient, HttpConfig};

pub fn fast_client() -> HttpClient {
    HttpClient::new(HttpConfig {
        requests_per_second: 0.0,
        max_attempts: 1,
        backoff_base_ms: 1,
        timeout_secs: 5.0,
        ..Default::default()
    })
}

pub fn mini_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/mini")
}

pub fn taxonomy_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/taxonomy")
}

pub fn article_html(body: &str) -> String {
    format!(
        "<html><head><title>t</title></head><body>\
         <nav><a href=\"/\">Home</a> <a href=\"/news\">News</a> Navigation menu text</nav>\
         <article><p>{body}</p><p>{body}</p></article>\
         <footer>Footer copyright text</footer></body></html>"
    )
}

pub const STORY: &str =
    "Rangers in the northern reserve counted forty lions during the dry season survey, \
    a result that surprised the ecologists who had expected far fewer after last year's drought. \
    The count used camera traps, spoor tracking and aerial photographs over six weeks.";
