use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::text::label_words;

#[derive(Default)]
struct Support {
    names: usize,
    strict: bool,
}

/// Every whole-word trailing substring shared by at least two distinct names
/// and strictly shorter than at least one of them.
///
/// Each name contributes each of its word suffixes once, so a single pass
/// over the suffix table counts distinct supporting names. Nested suffixes
/// are returned too: `{"intermediate horseshoe bat", "greater horseshoe bat"}`
/// yields both `"horseshoe bat"` and `"bat"`.
pub fn extract_shared_suffixes(names: &BTreeSet<String>) -> BTreeSet<String> {
    let mut table: BTreeMap<String, Support> = BTreeMap::new();
    for name in names {
        let words = label_words(name);
        for k in 1..=words.len() {
            let suffix = words[words.len() - k..].join(" ");
            let entry = table.entry(suffix).or_default();
            entry.names += 1;
            entry.strict |= k < words.len();
        }
    }
    table
        .into_iter()
        .filter(|(_, s)| s.names >= 2 && s.strict)
        .map(|(suffix, _)| suffix)
        .collect()
}

/// Repeat extraction over names plus discovered suffixes until nothing new
/// appears. With the two-supporting-names rule the first pass is already a
/// fixpoint; the loop keeps that an observable property rather than an
/// assumption.
pub(crate) fn shared_suffix_closure(names: &BTreeSet<String>) -> BTreeSet<String> {
    let mut found = extract_shared_suffixes(names);
    loop {
        let pool: BTreeSet<String> = names.union(&found).cloned().collect();
        let next = extract_shared_suffixes(&pool);
        let fresh: Vec<String> = next.difference(&found).cloned().collect();
        if fresh.is_empty() {
            return found;
        }
        found.extend(fresh);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn sea_lion_pair() {
        let out =
            extract_shared_suffixes(&set(&["south american sea lion", "californian sea lion"]));
        assert_eq!(out, set(&["lion", "sea lion"]));
    }

    #[test]
    fn horseshoe_pair_is_nested() {
        let out = extract_shared_suffixes(&set(&[
            "intermediate horseshoe bat",
            "greater horseshoe bat",
        ]));
        assert_eq!(out, set(&["bat", "horseshoe bat"]));
    }

    #[test]
    fn single_name_shares_nothing() {
        assert!(extract_shared_suffixes(&set(&["pangolin"])).is_empty());
    }

    #[test]
    fn a_whole_name_can_be_a_shared_suffix() {
        assert_eq!(
            extract_shared_suffixes(&set(&["lion", "mountain lion"])),
            set(&["lion"])
        );
        assert!(extract_shared_suffixes(&set(&["combat", "bat"])).is_empty());
    }

    /// Brute force: enumerate every word suffix of every name, then count
    /// supporters by direct comparison against every name.
    fn brute_force(names: &BTreeSet<String>) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for name in names {
            let words: Vec<&str> = name.split(' ').collect();
            for k in 1..=words.len() {
                let cand: Vec<&str> = words[words.len() - k..].to_vec();
                let supporters: Vec<&String> = names
                    .iter()
                    .filter(|other| {
                        let ow: Vec<&str> = other.split(' ').collect();
                        ow.len() >= cand.len() && ow[ow.len() - cand.len()..] == cand[..]
                    })
                    .collect();
                let strict = supporters.iter().any(|s| s.split(' ').count() > cand.len());
                if supporters.len() >= 2 && strict {
                    out.insert(cand.join(" "));
                }
            }
        }
        out
    }

    fn name_set() -> impl Strategy<Value = BTreeSet<String>> {
        let word = prop::sample::select(
            &[
                "bat",
                "fruit",
                "sea",
                "lion",
                "horseshoe",
                "greater",
                "lesser",
                "bear",
                "black",
            ][..],
        );
        let name = prop::collection::vec(word, 1..4).prop_map(|w| w.join(" "));
        prop::collection::btree_set(name, 1..20)
    }

    proptest! {
        #[test]
        fn matches_brute_force(names in name_set()) {
            prop_assert_eq!(extract_shared_suffixes(&names), brute_force(&names));
        }

        #[test]
        fn first_pass_is_a_fixpoint(names in name_set()) {
            prop_assert_eq!(shared_suffix_closure(&names), extract_shared_suffixes(&names));
        }
    }
}
