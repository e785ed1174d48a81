//! Name normalization, whole-word keyword matching and bag-of-words tokens.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Canonical form of a species or keyword name.
///
/// Lowercases, trims, collapses internal whitespace and folds hyphens that
/// sit between two letters into a space, so `"horseshoe-bat"` and
/// `"Horseshoe Bat"` both become `"horseshoe bat"`. Apostrophes are kept.
pub fn normalize_name(raw: &str) -> Result<String> {
    let lowered: String = raw.trim().chars().flat_map(char::to_lowercase).collect();
    let chars: Vec<char> = lowered.chars().collect();
    let mut folded = String::with_capacity(lowered.len());
    for (i, &c) in chars.iter().enumerate() {
        let between_letters = c == '-'
            && i > 0
            && chars[i - 1].is_alphabetic()
            && chars.get(i + 1).is_some_and(|n| n.is_alphabetic());
        if between_letters {
            folded.push(' ');
        } else if c == '\u{2019}' {
            folded.push('\'');
        } else {
            folded.push(c);
        }
    }
    let out = folded.split_whitespace().collect::<Vec<_>>().join(" ");
    if out.is_empty() {
        return Err(Error::InvalidName(String::from(raw)));
    }
    Ok(out)
}

/// Words of a canonical label.
pub fn label_words(label: &str) -> Vec<&str> {
    label.split(' ').filter(|w| !w.is_empty()).collect()
}

/// True when `needle`'s words appear as a contiguous run inside `haystack`'s
/// words. Both arguments are canonical labels.
pub fn contains_words(haystack: &str, needle: &str) -> bool {
    let hay = label_words(haystack);
    let pat = label_words(needle);
    find_word_run(&hay, &pat, 0).is_some()
}

/// True when `suffix` is made of whole trailing words of `label`
/// (equality included).
pub fn is_word_suffix(label: &str, suffix: &str) -> bool {
    let hay = label_words(label);
    let pat = label_words(suffix);
    !pat.is_empty() && pat.len() <= hay.len() && hay[hay.len() - pat.len()..] == pat[..]
}

fn find_word_run<S: AsRef<str>>(hay: &[S], pat: &[&str], from: usize) -> Option<usize> {
    if pat.is_empty() || pat.len() > hay.len() {
        return None;
    }
    (from..=hay.len() - pat.len()).find(|&i| {
        hay[i..i + pat.len()]
            .iter()
            .zip(pat)
            .all(|(h, p)| h.as_ref() == *p)
    })
}

/// A lowercase word token of free text with its byte span in the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub word: String,
    pub start: usize,
    pub end: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Split free text into lowercase word tokens.
///
/// Words are runs of alphanumerics; an apostrophe joins two runs
/// (`"bechstein's"`), anything else (hyphens included) separates them.
pub fn tokenize_words(text: &str) -> Vec<Token> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !is_word_char(chars[i].1) {
            i += 1;
            continue;
        }
        let start = chars[i].0;
        let mut word = String::new();
        while i < chars.len() {
            let c = chars[i].1;
            if is_word_char(c) {
                word.extend(c.to_lowercase());
                i += 1;
            } else if is_apostrophe(c) && chars.get(i + 1).is_some_and(|&(_, n)| is_word_char(n)) {
                word.push('\'');
                i += 1;
            } else {
                break;
            }
        }
        let end = chars.get(i).map_or(text.len(), |&(b, _)| b);
        out.push(Token { word, start, end });
    }
    out
}

/// Crude English singular: `"poachers"` → `"poacher"`, `"foxes"` → `"fox"`,
/// `"bodies"` → `"body"`.
pub fn fold_plural(word: &str) -> String {
    let n = word.len();
    if n > 4 && word.ends_with("ies") {
        return alloc::format!("{}y", &word[..n - 3]);
    }
    if n > 3
        && ["ses", "xes", "zes", "ches", "shes"]
            .iter()
            .any(|e| word.ends_with(e))
    {
        return String::from(&word[..n - 2]);
    }
    if n > 3 && word.ends_with('s') && !word.ends_with("ss") && !word.ends_with("us") {
        return String::from(&word[..n - 1]);
    }
    String::from(word)
}

fn folded_tokens(text: &str) -> Vec<String> {
    tokenize_words(text)
        .iter()
        .map(|t| fold_plural(&t.word))
        .collect()
}

/// Matches a taxon's positive keywords in free text while honouring its
/// negative keywords.
///
/// Words on both sides are compared after [`fold_plural`], so `"lions"`
/// mentions `"lion"`. A positive hit at word positions `[i, i + k)` is discarded when some
/// negative keyword hit covers it, so `"sea lion"` never counts as a mention
/// of `"lion"` when `"sea lion"` is a negative keyword.
#[derive(Debug, Clone)]
pub struct KeywordMatcher {
    positives: Vec<Vec<String>>,
    negatives: Vec<Vec<String>>,
}

impl KeywordMatcher {
    pub fn new<'a, P, N>(positives: P, negatives: N) -> Self
    where
        P: IntoIterator<Item = &'a String>,
        N: IntoIterator<Item = &'a String>,
    {
        let split = |k: &String| -> Vec<String> { folded_tokens(k) };
        Self {
            positives: positives
                .into_iter()
                .map(split)
                .filter(|w| !w.is_empty())
                .collect(),
            negatives: negatives
                .into_iter()
                .map(split)
                .filter(|w| !w.is_empty())
                .collect(),
        }
    }

    fn spans(keywords: &[Vec<String>], words: &[String]) -> Vec<(usize, usize)> {
        let mut spans = Vec::new();
        for kw in keywords {
            let pat: Vec<&str> = kw.iter().map(String::as_str).collect();
            let mut from = 0;
            while let Some(i) = find_word_run(words, &pat, from) {
                spans.push((i, i + pat.len()));
                from = i + 1;
            }
        }
        spans
    }

    /// Word spans of positive hits that no negative hit subsumes.
    pub fn mention_spans(&self, text: &str) -> Vec<(usize, usize)> {
        let words = folded_tokens(text);
        let negatives = Self::spans(&self.negatives, &words);
        let mut hits: Vec<(usize, usize)> = Self::spans(&self.positives, &words)
            .into_iter()
            .filter(|&(s, e)| !negatives.iter().any(|&(ns, ne)| ns <= s && e <= ne))
            .collect();
        hits.sort_unstable();
        hits.dedup();
        hits
    }

    pub fn is_mention(&self, text: &str) -> bool {
        !self.mention_spans(text).is_empty()
    }
}

const STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// English stopword list used by the bag-of-words models.
#[derive(Debug, Clone)]
pub struct Stopwords(BTreeSet<String>);

impl Default for Stopwords {
    fn default() -> Self {
        Self::parse(STOPWORDS)
    }
}

impl Stopwords {
    /// One word per line; blank lines and `#` comments skipped.
    pub fn parse(list: &str) -> Self {
        Self(
            list.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }
}

/// Lowercase alphanumeric runs of two or more characters, stopwords
/// removed. Apostrophes and hyphens split words.
pub fn bag_of_words(text: &str, stopwords: &Stopwords) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| w.chars().nth(1).is_some())
        .map(str::to_lowercase)
        .filter(|w| !stopwords.contains(w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn plural_folding() {
        assert_eq!(fold_plural("poachers"), "poacher");
        assert_eq!(fold_plural("foxes"), "fox");
        assert_eq!(fold_plural("bodies"), "body");
        assert_eq!(fold_plural("grass"), "grass");
        assert_eq!(fold_plural("virus"), "virus");
        assert_eq!(fold_plural("bats"), "bat");
    }

    #[test]
    fn normalizes_case_whitespace_and_hyphens() {
        assert_eq!(
            normalize_name("Intermediate Horseshoe Bat").unwrap(),
            "intermediate horseshoe bat"
        );
        assert_eq!(normalize_name("horseshoe-bat").unwrap(), "horseshoe bat");
        assert_eq!(
            normalize_name("  Bechstein's  Bat ").unwrap(),
            "bechstein's bat"
        );
        assert_eq!(
            normalize_name("Galápagos Sea\tLion").unwrap(),
            "galápagos sea lion"
        );
    }

    #[test]
    fn hyphen_not_between_letters_is_kept() {
        assert_eq!(normalize_name("x-2 bat").unwrap(), "x-2 bat");
        assert_eq!(normalize_name("-bat").unwrap(), "-bat");
    }

    #[test]
    fn empty_name_is_rejected() {
        assert!(matches!(normalize_name("   "), Err(Error::InvalidName(_))));
        assert!(matches!(normalize_name(""), Err(Error::InvalidName(_))));
    }

    #[test]
    fn whole_word_containment() {
        assert!(contains_words("south american sea lion", "sea lion"));
        assert!(contains_words("golden lion tamarin", "lion"));
        assert!(!contains_words("combat", "bat"));
        assert!(!contains_words("sea lions", "sea lion"));
        assert!(is_word_suffix("greater horseshoe bat", "horseshoe bat"));
        assert!(is_word_suffix("bat", "bat"));
        assert!(!is_word_suffix("fruit bat eater", "fruit bat"));
    }

    #[test]
    fn tokenizer_keeps_apostrophes_and_splits_hyphens() {
        let words: Vec<String> = tokenize_words("Bechstein’s tube-nosed bat, (rare)!")
            .into_iter()
            .map(|t| t.word)
            .collect();
        assert_eq!(words, vec!["bechstein's", "tube", "nosed", "bat", "rare"]);
    }

    #[test]
    fn negative_keyword_subsumes_positive_hit() {
        let pos = vec!["lion".to_string()];
        let neg = vec!["sea lion".to_string(), "mountain lion".to_string()];
        let m = KeywordMatcher::new(&pos, &neg);
        assert!(!m.is_mention("A sea lion basked on the rocks."));
        assert!(m.is_mention("A lion and a sea lion."));
        assert!(!m.is_mention("The Mountain-Lion returned."));
        assert!(m.is_mention("LION sighted near the river"));
        assert!(m.is_mention("The lions roared."));
        assert!(!m.is_mention("Sea lions basked."));
    }
}
