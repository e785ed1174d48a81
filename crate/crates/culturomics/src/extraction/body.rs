//! Main-content extraction: a fixed cascade of heuristic extractors over a
//! tolerant HTML parse.

use std::collections::HashMap;

use scraper::{ElementRef, Html, Node};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MIN_BODY_CHARS: usize = 200;

/// Extractor ids in cascade order. Changing an extractor bumps its suffix.
pub const CASCADE: [&str; 2] = ["readability-v1", "largest-block-v1"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractedArticle {
    pub url: String,
    pub body_text: String,
    pub extractor_id: String,
    pub char_count: usize,
}

const BOILERPLATE_TAGS: &[&str] = &[
    "nav", "footer", "header", "aside", "script", "style", "noscript", "form", "iframe", "svg",
    "button", "select", "template", "menu", "dialog", "head", "title", "canvas", "video", "audio",
    "figure",
];

const BLOCK_TAGS: &[&str] = &[
    "p",
    "div",
    "article",
    "section",
    "main",
    "blockquote",
    "pre",
    "li",
    "ul",
    "ol",
    "dl",
    "dd",
    "dt",
    "table",
    "tr",
    "td",
    "th",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "br",
    "hr",
    "body",
    "tbody",
    "thead",
];

const PARAGRAPH_TAGS: &[&str] = &["p", "pre", "blockquote", "td", "li", "h2", "h3", "h4"];

const UNLIKELY: &[&str] = &[
    "nav",
    "menu",
    "footer",
    "sidebar",
    "comment",
    "share",
    "social",
    "cookie",
    "banner",
    "advert",
    "promo",
    "related",
    "subscribe",
    "newsletter",
    "masthead",
    "breadcrumb",
    "popup",
    "sponsor",
    "widget",
    "skip",
    "header",
    "signup",
];

const LIKELY: &[&str] = &[
    "article", "body", "content", "entry", "main", "post", "story", "text", "column",
];

fn class_and_id(el: &ElementRef) -> String {
    let v = el.value();
    format!("{} {}", v.attr("class").unwrap_or(""), v.id().unwrap_or("")).to_ascii_lowercase()
}

fn has_any(haystack: &str, words: &[&str]) -> bool {
    words.iter().any(|w| haystack.contains(w))
}

/// Elements never read as content: chrome tags and containers whose
/// class or id marks them as navigation, sharing or similar furniture.
fn is_boilerplate(el: &ElementRef) -> bool {
    let name = el.value().name();
    if BOILERPLATE_TAGS.contains(&name) {
        return true;
    }
    if matches!(name, "body" | "html" | "article" | "main") {
        return false;
    }
    let ci = class_and_id(el);
    has_any(&ci, UNLIKELY) && !has_any(&ci, LIKELY)
}

fn inside_boilerplate(el: &ElementRef) -> bool {
    is_boilerplate(el)
        || el
            .ancestors()
            .filter_map(ElementRef::wrap)
            .any(|a| is_boilerplate(&a))
}

fn collapse(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Visible text under `el`, skipping boilerplate subtrees. Block elements
/// become line breaks.
fn visible_text(el: ElementRef, out: &mut String) {
    for child in el.children() {
        match child.value() {
            Node::Text(t) => out.push_str(t),
            Node::Element(e) => {
                let Some(ce) = ElementRef::wrap(child) else {
                    continue;
                };
                if is_boilerplate(&ce) {
                    continue;
                }
                let block = BLOCK_TAGS.contains(&e.name());
                if block {
                    out.push('\n');
                }
                visible_text(ce, out);
                if block {
                    out.push('\n');
                }
            }
            _ => {}
        }
    }
}

fn text_of(el: ElementRef) -> String {
    let mut s = String::new();
    visible_text(el, &mut s);
    s
}

fn link_text_len(el: ElementRef) -> usize {
    el.descendent_elements()
        .filter(|d| d.value().name() == "a")
        .map(|a| collapse(&a.text().collect::<String>()).chars().count())
        .sum()
}

fn link_density(el: ElementRef) -> f64 {
    let total = collapse(&text_of(el)).chars().count();
    if total == 0 {
        return 1.0;
    }
    (link_text_len(el) as f64 / total as f64).min(1.0)
}

fn tag_weight(el: &ElementRef) -> f64 {
    let base = match el.value().name() {
        "article" => 10.0,
        "div" | "main" | "section" => 5.0,
        "pre" | "td" | "blockquote" => 3.0,
        "address" | "ol" | "ul" | "dl" | "dd" | "dt" | "li" | "form" => -3.0,
        "h1" | "h2" | "h3" | "h4" | "h5" | "h6" | "th" => -5.0,
        _ => 0.0,
    };
    let ci = class_and_id(el);
    let mut w = base;
    if has_any(&ci, LIKELY) {
        w += 25.0;
    }
    if has_any(&ci, UNLIKELY) {
        w -= 25.0;
    }
    w
}

/// Paragraph-level blocks under `root` in document order, link-heavy
/// ones dropped.
fn paragraphs(root: ElementRef) -> Vec<String> {
    let mut out = Vec::new();
    for el in std::iter::once(root).chain(root.descendent_elements()) {
        if !PARAGRAPH_TAGS.contains(&el.value().name()) || inside_boilerplate(&el) {
            continue;
        }
        // Nested paragraph tags are read through their outermost one.
        if el
            .ancestors()
            .filter_map(ElementRef::wrap)
            .take_while(|a| a.id() != root.id())
            .any(|a| PARAGRAPH_TAGS.contains(&a.value().name()))
        {
            continue;
        }
        let t = collapse(&text_of(el));
        if t.is_empty() || link_density(el) > 0.5 {
            continue;
        }
        out.push(t);
    }
    out
}

/// Block scoring by text length, commas, link density and tag/class
/// weight; the best container plus strong siblings.
fn readability(doc: &Html) -> Option<String> {
    let mut scores: HashMap<ego_tree::NodeId, f64> = HashMap::new();
    let mut order: Vec<ElementRef> = Vec::new();
    for el in doc.root_element().descendent_elements() {
        if !matches!(el.value().name(), "p" | "pre" | "td" | "blockquote")
            || inside_boilerplate(&el)
        {
            continue;
        }
        let text = collapse(&text_of(el));
        let len = text.chars().count();
        if len < 25 {
            continue;
        }
        let score =
            1.0 + text.matches([',', '\u{ff0c}']).count() as f64 + (len as f64 / 100.0).min(3.0);
        let mut ancestors = el.ancestors().filter_map(ElementRef::wrap);
        for (level, anc) in ancestors.by_ref().take(2).enumerate() {
            let entry = scores.entry(anc.id()).or_insert_with(|| {
                order.push(anc);
                tag_weight(&anc)
            });
            *entry += if level == 0 { score } else { score / 2.0 };
        }
    }
    let adjusted = |el: &ElementRef| scores[&el.id()] * (1.0 - link_density(*el));
    let top = order
        .iter()
        .copied()
        .max_by(|a, b| adjusted(a).total_cmp(&adjusted(b)))?;
    let top_score = adjusted(&top);
    let threshold = (top_score * 0.2).max(10.0);
    let mut parts = Vec::new();
    let siblings: Vec<ElementRef> = match top.parent().and_then(ElementRef::wrap) {
        Some(p) => p.child_elements().collect(),
        None => vec![top],
    };
    for sib in siblings {
        let keep = sib.id() == top.id()
            || scores
                .get(&sib.id())
                .is_some_and(|_| adjusted(&sib) >= threshold);
        if keep && !is_boilerplate(&sib) {
            parts.extend(paragraphs(sib));
        }
    }
    Some(parts.join("\n\n"))
}

/// Text held directly by `el`: its text nodes, inline children and direct
/// paragraph children.
fn own_text(el: ElementRef) -> String {
    let mut out = String::new();
    for child in el.children() {
        match child.value() {
            Node::Text(t) => out.push_str(t),
            Node::Element(e) => {
                let Some(ce) = ElementRef::wrap(child) else {
                    continue;
                };
                if is_boilerplate(&ce) {
                    continue;
                }
                let name = e.name();
                if !BLOCK_TAGS.contains(&name) {
                    out.push_str(&text_of(ce));
                } else if matches!(name, "p" | "blockquote" | "pre") {
                    out.push_str("\n\n");
                    out.push_str(&collapse(&text_of(ce)));
                    out.push_str("\n\n");
                }
            }
            _ => {}
        }
    }
    out
}

/// The container holding the most directly attached text.
fn largest_block(doc: &Html) -> Option<String> {
    doc.root_element()
        .descendent_elements()
        .filter(|el| !inside_boilerplate(el))
        .map(|el| {
            own_text(el)
                .split("\n\n")
                .map(collapse)
                .filter(|p| !p.is_empty())
                .collect::<Vec<_>>()
                .join("\n\n")
        })
        .max_by_key(|t| t.chars().count())
}

/// Run the cascade; the first extractor reaching [`MIN_BODY_CHARS`] wins.
pub fn extract_body(url: &str, html: &str) -> Result<ExtractedArticle> {
    let doc = Html::parse_document(html);
    let extractors: [fn(&Html) -> Option<String>; 2] = [readability, largest_block];
    for (id, extract) in CASCADE.iter().zip(extractors) {
        if let Some(body) = extract(&doc) {
            let char_count = body.chars().count();
            if char_count >= MIN_BODY_CHARS {
                return Ok(ExtractedArticle {
                    url: url.to_string(),
                    body_text: body,
                    extractor_id: (*id).to_string(),
                    char_count,
                });
            }
        }
    }
    Err(Error::ExtractionFailed {
        min_chars: MIN_BODY_CHARS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BODY: &str = "Researchers counted more than four thousand fruit bats roosting in the old railway tunnel, \
        the largest colony recorded in the valley since surveys began. Local farmers, who once blamed the animals for \
        damaged orchards, now help the team with nightly counts.";

    fn page(article: &str) -> String {
        format!(
            "<html><head><title>T</title><script>var nav = 'Subscribe now to read';</script></head><body>\
             <nav><a href='/'>Home</a> <a href='/world'>World news menu</a></nav>\
             <header class='masthead'>The Daily Example</header>{article}\
             <div class='share-bar'><a href='#'>Share on social</a></div>\
             <!-- comment with words that are not content -->\
             <footer>Copyright footer text</footer></body></html>"
        )
    }

    #[test]
    fn article_tag_wins_without_boilerplate() {
        let html = page(&format!("<article><h1>Bats return</h1><p>{BODY}</p><p>Second paragraph here, short.</p></article>"));
        let a = extract_body("u", &html).unwrap();
        assert_eq!(a.extractor_id, "readability-v1");
        assert!(a.body_text.contains("largest colony recorded"));
        for junk in [
            "World news menu",
            "Copyright footer",
            "Share on social",
            "Subscribe now",
            "comment with words",
            "Daily Example",
        ] {
            assert!(!a.body_text.contains(junk), "{junk}");
        }
        assert_eq!(a.char_count, a.body_text.chars().count());
    }

    #[test]
    fn navigation_only_page_fails() {
        let links: String = (0..60)
            .map(|i| format!("<li><a href='/{i}'>Section number {i}</a></li>"))
            .collect();
        let html = format!("<html><body><nav><ul>{links}</ul></nav><div class='menu'><ul>{links}</ul></div></body></html>");
        assert!(matches!(
            extract_body("u", &html),
            Err(Error::ExtractionFailed { .. })
        ));
    }

    #[test]
    fn text_without_paragraph_tags_falls_through() {
        let html = page(&format!("<div>{BODY}<br>{BODY}</div>"));
        let a = extract_body("u", &html).unwrap();
        assert_eq!(a.extractor_id, "largest-block-v1");
        assert!(a.body_text.contains("nightly counts"));
        assert!(!a.body_text.contains("World news menu"));
    }

    #[test]
    fn tolerates_broken_markup() {
        let html =
            format!("<html><body><div class=content><p>{BODY}<p>{BODY}</div></span></i></body>");
        assert!(extract_body("u", &html)
            .unwrap()
            .body_text
            .contains("railway tunnel"));
    }
}
