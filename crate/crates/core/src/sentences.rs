//! Rule-based sentence segmentation.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

const ABBREVIATIONS: &str = include_str!("../data/abbreviations.txt");

/// Splits text on terminal punctuation, guarded against abbreviations,
/// single-letter initials (`"R. affinis"`), decimals and lowercase
/// continuations.
#[derive(Debug, Clone)]
pub struct SentenceSplitter {
    abbreviations: BTreeSet<String>,
}

impl Default for SentenceSplitter {
    fn default() -> Self {
        Self::with_abbreviations(ABBREVIATIONS)
    }
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | '\u{2026}')
}

fn is_closing(c: char) -> bool {
    matches!(
        c,
        '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}' | '\u{bb}'
    )
}

impl SentenceSplitter {
    /// Build from a newline-separated list; `#` starts a comment line.
    pub fn with_abbreviations(list: &str) -> Self {
        let abbreviations = list
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.trim_end_matches('.').to_lowercase())
            .collect();
        Self { abbreviations }
    }

    fn guarded_period(&self, chars: &[(usize, char)], dot: usize) -> bool {
        let mut start = dot;
        while start > 0 && !chars[start - 1].1.is_whitespace() {
            start -= 1;
        }
        let word: String = chars[start..dot]
            .iter()
            .map(|&(_, c)| c)
            .skip_while(|c| !c.is_alphanumeric())
            .collect();
        if word.is_empty() {
            return false;
        }
        let letters: Vec<char> = word.chars().collect();
        if letters.len() == 1 && letters[0].is_alphabetic() {
            return true;
        }
        self.abbreviations.contains(&word.to_lowercase())
    }

    /// Sentences in order, each trimmed of surrounding whitespace.
    pub fn split(&self, text: &str) -> Vec<String> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut out = Vec::new();
        let mut seg_start = 0usize;
        let mut i = 0usize;
        while i < chars.len() {
            if !is_terminal(chars[i].1) {
                i += 1;
                continue;
            }
            let first = i;
            while i < chars.len() && is_terminal(chars[i].1) {
                i += 1;
            }
            let single_period = i - first == 1 && chars[first].1 == '.';
            while i < chars.len() && is_closing(chars[i].1) {
                i += 1;
            }
            let boundary = chars.get(i).map_or(text.len(), |&(b, _)| b);
            if i < chars.len() && !chars[i].1.is_whitespace() {
                continue;
            }
            let next = chars[i..]
                .iter()
                .map(|&(_, c)| c)
                .find(|c| !c.is_whitespace());
            if next.is_some_and(char::is_lowercase) {
                continue;
            }
            if single_period && next.is_some() && self.guarded_period(&chars, first) {
                continue;
            }
            push_trimmed(&mut out, &text[seg_start..boundary]);
            seg_start = boundary;
        }
        push_trimmed(&mut out, &text[seg_start..]);
        out
    }
}

fn push_trimmed(out: &mut Vec<String>, s: &str) {
    let t = s.trim();
    if !t.is_empty() {
        out.push(String::from(t));
    }
}

/// Split with the shipped abbreviation list.
pub fn split_sentences(text: &str) -> Vec<String> {
    SentenceSplitter::default().split(text)
}
