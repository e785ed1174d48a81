use std::collections::BTreeSet;

use culturomics_core::taxonomy::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Deserialize;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/taxonomy");

fn load(name: &str) -> NameGraph {
    let text = std::fs::read_to_string(format!("{FIXTURES}/{name}")).unwrap();
    build_graph(&parse_species_table(&text).unwrap()).unwrap()
}

fn edit_log(name: &str) -> EditLog {
    std::fs::read_to_string(format!("{FIXTURES}/{name}"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str::<GraphEdit>(l).unwrap())
        .collect()
}

fn strings(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[derive(Deserialize)]
struct Golden {
    nodes: Vec<String>,
    edges: Vec<(String, String, EdgeKind)>,
}

#[test]
fn carnivora_matches_golden_graph() {
    let g = load("carnivora.tsv");
    let golden: Golden = serde_json::from_str(
        &std::fs::read_to_string(format!("{FIXTURES}/carnivora_graph.json")).unwrap(),
    )
    .unwrap();
    let nodes: BTreeSet<String> = g.nodes().map(|n| n.id.clone()).collect();
    assert_eq!(nodes, golden.nodes.into_iter().collect());
    let edges: BTreeSet<(String, String, EdgeKind)> = g
        .edges()
        .map(|e| (e.a.clone(), e.b.clone(), e.kind))
        .collect();
    assert_eq!(edges, golden.edges.into_iter().collect());
    assert!(g.has_edge("sub:lion", "sub:sea lion"));
    assert!(g.has_edge("common:mountain lion", "sub:lion"));
}

fn component_of<'a>(comps: &'a [Component], species: &str) -> &'a Component {
    comps
        .iter()
        .find(|c| c.species.iter().any(|s| s == species))
        .unwrap()
}

#[test]
fn carnivora_lion_cluster_splits_after_pruning() {
    let g = load("carnivora.tsv");
    let before = connected_components(&g);
    let lion = component_of(&before, "panthera leo");
    for s in [
        "puma concolor",
        "otaria byronia",
        "zalophus wollebaeki",
        "eumetopias jubatus",
    ] {
        assert!(lion.species.iter().any(|x| x == s), "{s}");
    }
    let at = chrono::DateTime::parse_from_rfc3339("2024-01-01T00:00:00Z")
        .unwrap()
        .into();
    let mut log = EditLog::new();
    let g1 = log
        .apply(
            &g,
            GraphEdit::new(
                EditAction::RemoveEdge {
                    a: "sub:lion".into(),
                    b: "sub:sea lion".into(),
                },
                at,
                "t",
            ),
        )
        .unwrap();
    let g2 = log
        .apply(
            &g1,
            GraphEdit::new(
                EditAction::RemoveEdge {
                    a: "common:mountain lion".into(),
                    b: "sub:lion".into(),
                },
                at,
                "t",
            ),
        )
        .unwrap();
    let after = connected_components(&g2);
    assert!(after.len() >= before.len() + 2);
    let ids: BTreeSet<usize> = ["panthera leo", "puma concolor", "otaria byronia"]
        .iter()
        .map(|s| component_of(&after, s).id)
        .collect();
    assert_eq!(ids.len(), 3);
    assert_eq!(log.replay(&g).unwrap(), g2);
    assert_eq!(log.replay_prefix(&g, 0).unwrap(), g);
}

#[test]
fn lion_pangolin_and_elephant_queries() {
    let g = load("mammals.tsv");
    let at = chrono::DateTime::parse_from_rfc3339("2024-01-01T00:00:00Z")
        .unwrap()
        .into();
    let log: EditLog = [
        GraphEdit::new(
            EditAction::RemoveEdge {
                a: "sub:lion".into(),
                b: "sub:sea lion".into(),
            },
            at,
            "t",
        ),
        GraphEdit::new(
            EditAction::RemoveEdge {
                a: "common:mountain lion".into(),
                b: "sub:lion".into(),
            },
            at,
            "t",
        ),
    ]
    .into_iter()
    .collect();
    let g = log.replay(&g).unwrap();
    let comps = connected_components(&g);

    let lion = derive_query(component_of(&comps, "panthera leo"), &g).unwrap();
    assert_eq!(lion.positive_keywords, strings(&["lion"]));
    assert!(lion.negative_keywords.is_superset(&strings(&[
        "mountain lion",
        "sea lion",
        "lion tamarin"
    ])));

    let pangolin = derive_query(component_of(&comps, "manis javanica"), &g).unwrap();
    assert_eq!(pangolin.positive_keywords, strings(&["pangolin"]));
    assert!(pangolin.negative_keywords.is_empty());
    assert_eq!(pangolin.taxon_id, "pangolin");

    let elephant = derive_query(component_of(&comps, "elephas maximus"), &g).unwrap();
    assert_eq!(elephant.positive_keywords, strings(&["elephant"]));
    assert_eq!(
        elephant.negative_keywords,
        strings(&["elephant seal", "elephant shrew"])
    );
}

#[test]
fn flying_fox_after_curation() {
    let base = load("chiroptera.tsv");
    let g = edit_log("chiroptera_edits.jsonl").replay(&base).unwrap();
    let comps = connected_components(&g);
    let ff = derive_query(component_of(&comps, "pteropus vampyrus"), &g).unwrap();
    assert_eq!(ff.display_name, "Flying fox");
    assert_eq!(ff.taxon_id, "flying-fox");
    let expected = [
        "flying fox",
        "pale xantharpy",
        "acerodon",
        "monkey-faced bat",
        "greater nectar bat",
        "fruit bat",
        "north moluccan blossum-bat",
        "rousette",
        "golden bat of rodrigues",
        "codot horsfield",
        "woerman's bat",
        "blossom bat",
    ];
    let expected: BTreeSet<String> = expected
        .iter()
        .map(|s| culturomics_core::text::normalize_name(s).unwrap())
        .collect();
    assert_eq!(ff.positive_keywords, expected);
    assert_eq!(ff.negative_keywords, strings(&["tube nosed fruit bat"]));
}

#[test]
fn keyword_disjointness_on_all_fixture_taxa() {
    for f in ["carnivora.tsv", "mammals.tsv", "chiroptera.tsv"] {
        let g = load(f);
        for t in derive_taxa(&g) {
            assert!(t.positive_keywords.is_disjoint(&t.negative_keywords));
            for n in &t.negative_keywords {
                assert!(t
                    .positive_keywords
                    .iter()
                    .any(|p| culturomics_core::text::contains_words(n, p)));
            }
        }
    }
}

/// Shared suffixes by direct enumeration: every trailing word run of every
/// name, kept when two distinct names end with it and one of them is longer.
fn brute_force_suffixes(names: &BTreeSet<String>) -> BTreeSet<String> {
    let ends_with_words =
        |name: &str, suffix: &str| name == suffix || name.ends_with(&format!(" {suffix}"));
    let mut out = BTreeSet::new();
    for name in names {
        let words: Vec<&str> = name.split(' ').collect();
        for i in 0..words.len() {
            let cand = words[i..].join(" ");
            let holders: Vec<&String> =
                names.iter().filter(|n| ends_with_words(n, &cand)).collect();
            if holders.len() >= 2 && holders.iter().any(|h| h.len() > cand.len()) {
                out.insert(cand);
            }
        }
    }
    out
}

pub fn random_name_sets(count: usize, seed: u64) -> Vec<BTreeSet<String>> {
    const WORDS: [&str; 10] = [
        "bat",
        "fox",
        "sea",
        "lion",
        "red",
        "flying",
        "horseshoe",
        "great",
        "fruit",
        "little",
    ];
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=20);
            (0..n)
                .map(|_| {
                    let len = rng.random_range(1..=4);
                    (0..len)
                        .map(|_| WORDS[rng.random_range(0..WORDS.len())])
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect()
        })
        .collect()
}

#[test]
fn suffix_extraction_equals_brute_force() {
    for (i, names) in random_name_sets(500, 17).iter().enumerate() {
        assert_eq!(
            extract_shared_suffixes(names),
            brute_force_suffixes(names),
            "set {i}: {names:?}"
        );
    }
}
