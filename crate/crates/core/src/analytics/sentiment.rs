//! Lexicon and rule based sentiment scoring, compatible with
//! vaderSentiment 3.3.2 `compound` scores.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const LEXICON: &str = include_str!("../../data/vader_lexicon.txt");
const EMOJI_LEXICON: &str = include_str!("../../data/emoji_utf8_lexicon.txt");
const RULES: &str = include_str!("../../data/vader_rules.tsv");

/// Compound valence in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SentimentScore(pub f64);

#[derive(Debug, Clone)]
struct Constants {
    c_incr: f64,
    n_scalar: f64,
    alpha: f64,
    ep_increment: f64,
    ep_max: usize,
    qm_increment: f64,
    qm_max_count: usize,
    qm_cap: f64,
    but_before: f64,
    but_after: f64,
    damp_2: f64,
    damp_3: f64,
    never_so: f64,
}

#[derive(Debug, Clone)]
pub struct SentimentAnalyzer {
    lexicon: BTreeMap<String, f64>,
    emojis: BTreeMap<char, String>,
    negate: BTreeSet<String>,
    boosters: BTreeMap<String, f64>,
    special: BTreeMap<String, f64>,
    k: Constants,
}

impl Default for SentimentAnalyzer {
    fn default() -> Self {
        Self::from_data(LEXICON, EMOJI_LEXICON, RULES).expect("built-in sentiment data is valid")
    }
}

fn data_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Data {
        line,
        reason: reason.into(),
    }
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| data_err(line, format!("bad number {s:?}")))
}

// Python's str.isspace() set, used by str.split() and str.strip().
fn is_py_space(c: char) -> bool {
    c.is_whitespace() || ('\u{1c}'..='\u{1f}').contains(&c)
}

// Python's str.isupper(): at least one cased character and no cased
// character that is not uppercase.
fn is_upper(s: &str) -> bool {
    let mut cased = false;
    for c in s.chars() {
        if c.is_uppercase() {
            cased = true;
        } else if c.is_lowercase() || c.to_uppercase().ne(core::iter::once(c)) {
            return false;
        }
    }
    cased
}

fn strip_punct_if_word(token: &str) -> &str {
    let stripped = token.trim_matches(|c: char| c.is_ascii_punctuation());
    if stripped.chars().count() <= 2 {
        token
    } else {
        stripped
    }
}

impl SentimentAnalyzer {
    /// Build from a word lexicon (`word<TAB>valence...`), an emoji lexicon
    /// (`emoji<TAB>description`) and a rule table.
    pub fn from_data(lexicon: &str, emoji_lexicon: &str, rules: &str) -> Result<Self> {
        let mut lex = BTreeMap::new();
        for (i, line) in lexicon.lines().enumerate() {
            let mut parts = line.trim().split('\t');
            let (Some(word), Some(value)) = (parts.next(), parts.next()) else {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(data_err(i + 1, "expected word<TAB>valence"));
            };
            lex.insert(String::from(word), parse_f64(value, i + 1)?);
        }
        let mut emojis = BTreeMap::new();
        for line in emoji_lexicon.lines() {
            let mut parts = line.trim().split('\t');
            if let (Some(e), Some(desc)) = (parts.next(), parts.next()) {
                let mut cs = e.chars();
                if let (Some(c), None) = (cs.next(), cs.next()) {
                    emojis.insert(c, String::from(desc));
                }
            }
        }
        let mut consts = BTreeMap::new();
        let mut negate = BTreeSet::new();
        let mut boosters = BTreeMap::new();
        let mut special = BTreeMap::new();
        for (i, line) in rules.lines().enumerate() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split('\t').collect();
            match parts.as_slice() {
                ["const", k, v] => {
                    consts.insert(*k, parse_f64(v, i + 1)?);
                }
                ["negate", w] => {
                    negate.insert(String::from(*w));
                }
                ["booster", w, v] => {
                    boosters.insert(String::from(*w), parse_f64(v, i + 1)?);
                }
                ["special", w, v] => {
                    special.insert(String::from(*w), parse_f64(v, i + 1)?);
                }
                _ => return Err(data_err(i + 1, "unrecognized rule line")),
            }
        }
        let get = |k: &str| {
            consts
                .get(k)
                .copied()
                .ok_or_else(|| data_err(0, format!("missing constant {k}")))
        };
        let k = Constants {
            c_incr: get("c_incr")?,
            n_scalar: get("n_scalar")?,
            alpha: get("normalize_alpha")?,
            ep_increment: get("ep_increment")?,
            ep_max: get("ep_max")? as usize,
            qm_increment: get("qm_increment")?,
            qm_max_count: get("qm_max_count")? as usize,
            qm_cap: get("qm_cap")?,
            but_before: get("but_before")?,
            but_after: get("but_after")?,
            damp_2: get("scalar_damp_2")?,
            damp_3: get("scalar_damp_3")?,
            never_so: get("never_so")?,
        };
        Ok(Self {
            lexicon: lex,
            emojis,
            negate,
            boosters,
            special,
            k,
        })
    }

    pub fn score(&self, text: &str) -> SentimentScore {
        let mut replaced = String::with_capacity(text.len());
        let mut prev_space = true;
        for c in text.chars() {
            if let Some(desc) = self.emojis.get(&c) {
                if !prev_space {
                    replaced.push(' ');
                }
                replaced.push_str(desc);
                prev_space = false;
            } else {
                replaced.push(c);
                prev_space = c == ' ';
            }
        }
        let text = replaced.trim_matches(is_py_space);
        let words: Vec<&str> = text
            .split(is_py_space)
            .filter(|w| !w.is_empty())
            .map(strip_punct_if_word)
            .collect();
        let lower: Vec<String> = words.iter().map(|w| w.to_lowercase()).collect();
        let upper_count = words.iter().filter(|w| is_upper(w)).count();
        let is_cap_diff = upper_count > 0 && upper_count < words.len();

        let mut sentiments = Vec::with_capacity(words.len());
        for i in 0..words.len() {
            if self.boosters.contains_key(&lower[i])
                || (lower[i] == "kind" && lower.get(i + 1).is_some_and(|n| n == "of"))
            {
                sentiments.push(0.0);
                continue;
            }
            sentiments.push(self.valence(&words, &lower, i, is_cap_diff));
        }
        self.but_check(&lower, &mut sentiments);

        if sentiments.is_empty() {
            return SentimentScore(0.0);
        }
        let mut sum: f64 = sentiments.iter().sum();
        let punct = self.punctuation_emphasis(text);
        if sum > 0.0 {
            sum += punct;
        } else if sum < 0.0 {
            sum -= punct;
        }
        SentimentScore(self.normalize(sum))
    }

    fn normalize(&self, score: f64) -> f64 {
        (score / libm::sqrt(score * score + self.k.alpha)).clamp(-1.0, 1.0)
    }

    fn in_lexicon(&self, w: &str) -> bool {
        self.lexicon.contains_key(w)
    }

    fn negated(&self, w: &str) -> bool {
        self.negate.contains(w) || w.contains("n't")
    }

    fn scalar_inc_dec(&self, word: &str, lower: &str, valence: f64, is_cap_diff: bool) -> f64 {
        let Some(&b) = self.boosters.get(lower) else {
            return 0.0;
        };
        let mut scalar = if valence < 0.0 { -b } else { b };
        if is_upper(word) && is_cap_diff {
            if valence > 0.0 {
                scalar += self.k.c_incr;
            } else {
                scalar -= self.k.c_incr;
            }
        }
        scalar
    }

    fn valence(&self, words: &[&str], lower: &[String], i: usize, is_cap_diff: bool) -> f64 {
        let Some(&base) = self.lexicon.get(&lower[i]) else {
            return 0.0;
        };
        let n = words.len();
        let mut valence = base;
        if lower[i] == "no" && i != n - 1 && self.in_lexicon(&lower[i + 1]) {
            valence = 0.0;
        }
        if (i > 0 && lower[i - 1] == "no")
            || (i > 1 && lower[i - 2] == "no")
            || (i > 2 && lower[i - 3] == "no" && (lower[i - 1] == "or" || lower[i - 1] == "nor"))
        {
            valence = base * self.k.n_scalar;
        }
        if is_upper(words[i]) && is_cap_diff {
            if valence > 0.0 {
                valence += self.k.c_incr;
            } else {
                valence -= self.k.c_incr;
            }
        }
        for start_i in 0..3 {
            if i > start_i && !self.in_lexicon(&lower[i - (start_i + 1)]) {
                let j = i - (start_i + 1);
                let mut s = self.scalar_inc_dec(words[j], &lower[j], valence, is_cap_diff);
                if start_i == 1 && s != 0.0 {
                    s *= self.k.damp_2;
                }
                if start_i == 2 && s != 0.0 {
                    s *= self.k.damp_3;
                }
                valence += s;
                valence = self.negation_check(valence, lower, start_i, i);
                if start_i == 2 {
                    valence = self.special_idioms_check(valence, lower, i);
                }
            }
        }
        self.least_check(valence, lower, i)
    }

    fn negation_check(&self, valence: f64, w: &[String], start_i: usize, i: usize) -> f64 {
        let so_this = |s: &str| s == "so" || s == "this";
        match start_i {
            0 if self.negated(&w[i - 1]) => valence * self.k.n_scalar,
            1 => {
                if w[i - 2] == "never" && so_this(&w[i - 1]) {
                    valence * self.k.never_so
                } else if w[i - 2] == "without" && w[i - 1] == "doubt" {
                    valence
                } else if self.negated(&w[i - 2]) {
                    valence * self.k.n_scalar
                } else {
                    valence
                }
            }
            // The reference groups this test as `(never && so/this) || so/this`
            // at i - 1; kept for score compatibility.
            2 => {
                if (w[i - 3] == "never" && so_this(&w[i - 2])) || so_this(&w[i - 1]) {
                    valence * self.k.never_so
                } else if w[i - 3] == "without" && (w[i - 2] == "doubt" || w[i - 1] == "doubt") {
                    valence
                } else if self.negated(&w[i - 3]) {
                    valence * self.k.n_scalar
                } else {
                    valence
                }
            }
            _ => valence,
        }
    }

    fn special_idioms_check(&self, mut valence: f64, w: &[String], i: usize) -> f64 {
        let onezero = format!("{} {}", w[i - 1], w[i]);
        let twoonezero = format!("{} {} {}", w[i - 2], w[i - 1], w[i]);
        let twoone = format!("{} {}", w[i - 2], w[i - 1]);
        let threetwoone = format!("{} {} {}", w[i - 3], w[i - 2], w[i - 1]);
        let threetwo = format!("{} {}", w[i - 3], w[i - 2]);
        for seq in [&onezero, &twoonezero, &twoone, &threetwoone, &threetwo] {
            if let Some(&v) = self.special.get(seq.as_str()) {
                valence = v;
                break;
            }
        }
        if w.len() - 1 > i {
            if let Some(&v) = self.special.get(format!("{} {}", w[i], w[i + 1]).as_str()) {
                valence = v;
            }
        }
        if w.len() - 1 > i + 1 {
            if let Some(&v) = self
                .special
                .get(format!("{} {} {}", w[i], w[i + 1], w[i + 2]).as_str())
            {
                valence = v;
            }
        }
        for gram in [&threetwoone, &threetwo, &twoone] {
            if let Some(&b) = self.boosters.get(gram.as_str()) {
                valence += b;
            }
        }
        valence
    }

    fn least_check(&self, valence: f64, w: &[String], i: usize) -> f64 {
        if i > 1 && !self.in_lexicon(&w[i - 1]) && w[i - 1] == "least" {
            if w[i - 2] != "at" && w[i - 2] != "very" {
                return valence * self.k.n_scalar;
            }
        } else if i > 0 && !self.in_lexicon(&w[i - 1]) && w[i - 1] == "least" {
            return valence * self.k.n_scalar;
        }
        valence
    }

    // Reweights around the first "but". Each value is located by its first
    // equal occurrence, as the reference does.
    fn but_check(&self, lower: &[String], sentiments: &mut [f64]) {
        let Some(bi) = lower.iter().position(|w| w == "but") else {
            return;
        };
        for p in 0..sentiments.len() {
            let s = sentiments[p];
            let si = sentiments.iter().position(|&x| x == s).unwrap_or(p);
            if si < bi {
                sentiments[si] = s * self.k.but_before;
            } else if si > bi {
                sentiments[si] = s * self.k.but_after;
            }
        }
    }

    fn punctuation_emphasis(&self, text: &str) -> f64 {
        let ep = text.matches('!').count().min(self.k.ep_max);
        let qm = text.matches('?').count();
        let qm_amp = if qm > 1 {
            if qm <= self.k.qm_max_count {
                qm as f64 * self.k.qm_increment
            } else {
                self.k.qm_cap
            }
        } else {
            0.0
        };
        ep as f64 * self.k.ep_increment + qm_amp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_neutral_text() {
        let a = SentimentAnalyzer::default();
        assert_eq!(a.score("").0, 0.0);
        assert_eq!(a.score("   ").0, 0.0);
        assert_eq!(a.score("The bat roosts in the cave.").0, 0.0);
    }

    #[test]
    fn single_token_sign() {
        let a = SentimentAnalyzer::default();
        assert!(a.score("good").0 > 0.0);
        assert!(a.score("not good").0 <= 0.0);
    }

    #[test]
    fn python_isupper() {
        assert!(is_upper("SMART"));
        assert!(is_upper("A1!"));
        assert!(!is_upper("123"));
        assert!(!is_upper("Smart"));
    }

    #[test]
    fn punctuation_stripping_keeps_short_tokens() {
        assert_eq!(strip_punct_if_word(":)"), ":)");
        assert_eq!(strip_punct_if_word("funny!"), "funny");
        assert_eq!(strip_punct_if_word("ok!"), "ok!");
    }
}
