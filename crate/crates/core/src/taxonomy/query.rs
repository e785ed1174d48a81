use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::graph::{connected_components, minimal_labels, Component, NameGraph, NodeKind};
use crate::text::contains_words;
use crate::{Error, Result};

/// A curated species cluster with the keywords used to search for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolkTaxon {
    pub taxon_id: String,
    pub display_name: String,
    pub member_species: BTreeSet<String>,
    pub positive_keywords: BTreeSet<String>,
    #[serde(default)]
    pub negative_keywords: BTreeSet<String>,
}

impl FolkTaxon {
    pub fn validate(&self) -> Result<()> {
        let bad = |why: &str| {
            Err(Error::InvalidEdit(alloc::format!(
                "taxon {}: {why}",
                self.taxon_id
            )))
        };
        if self.member_species.is_empty() {
            return Err(Error::EmptyTaxon);
        }
        if self.positive_keywords.is_empty() {
            return bad("no positive keywords");
        }
        if !self.positive_keywords.is_disjoint(&self.negative_keywords) {
            return bad("positive and negative keywords overlap");
        }
        for n in &self.negative_keywords {
            if !self.positive_keywords.iter().any(|p| contains_words(n, p)) {
                return bad("negative keyword does not contain a positive keyword");
            }
        }
        Ok(())
    }
}

fn slug(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        if c.is_alphanumeric() {
            out.extend(c.to_lowercase());
        } else if !out.ends_with('-') && !out.is_empty() {
            out.push('-');
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    out
}

/// Compile a curated component into a keyword query.
///
/// Positive keywords are the component's name and substring labels with
/// redundant ones dropped (a label containing another label adds nothing to
/// an OR query). Negative keywords are the labels elsewhere in the graph
/// that contain a positive keyword, minus any label a component name
/// contains, reduced to the shortest such labels: once `"sea lion"` is
/// excluded, `"south american sea lion"` is too.
pub fn derive_query(component: &Component, full_graph: &NameGraph) -> Result<FolkTaxon> {
    if component.species.is_empty() {
        return Err(Error::EmptyTaxon);
    }
    let own_labels = component.name_labels();
    if own_labels.is_empty() {
        return Err(Error::InvalidEdit(alloc::format!(
            "component {} has no names",
            component.display_name
        )));
    }
    let positives: BTreeSet<String> = minimal_labels(&own_labels).into_iter().collect();
    let members: BTreeSet<&String> = component.node_ids.iter().collect();
    let own: BTreeSet<&String> = own_labels.iter().collect();

    let candidates: BTreeSet<String> = full_graph
        .nodes()
        .filter(|n| {
            n.kind != NodeKind::Scientific && !members.contains(&n.id) && !own.contains(&n.label)
        })
        .filter(|n| positives.iter().any(|p| contains_words(&n.label, p)))
        .filter(|n| !own_labels.iter().any(|l| contains_words(l, &n.label)))
        .map(|n| n.label.clone())
        .collect();
    let negatives: BTreeSet<String> = minimal_labels(&candidates).into_iter().collect();

    let taxon = FolkTaxon {
        taxon_id: slug(&component.display_name),
        display_name: component.display_name.clone(),
        member_species: component.species.iter().cloned().collect(),
        positive_keywords: positives,
        negative_keywords: negatives,
    };
    taxon.validate()?;
    Ok(taxon)
}

/// Derive a taxon for every component that has species and names.
pub fn derive_taxa(graph: &NameGraph) -> Vec<FolkTaxon> {
    connected_components(graph)
        .iter()
        .filter_map(|c| derive_query(c, graph).ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::{apply_edit, build_graph, EditAction, GraphEdit, SpeciesRecord};
    use alloc::string::ToString;
    use chrono::TimeZone;

    fn rec(sci: &str, names: &[&str]) -> SpeciesRecord {
        SpeciesRecord {
            scientific_name: sci.into(),
            common_names: names.iter().map(|s| s.to_string()).collect(),
            order_name: String::new(),
            family_name: String::new(),
        }
    }

    fn remove_edge(g: &NameGraph, a: &str, b: &str) -> NameGraph {
        let at = chrono::Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap();
        apply_edit(
            g,
            &GraphEdit::new(
                EditAction::RemoveEdge {
                    a: a.into(),
                    b: b.into(),
                },
                at,
                "t",
            ),
        )
        .unwrap()
    }

    #[test]
    fn lion_negatives() {
        let g = build_graph(&[
            rec("Panthera leo", &["Lion", "African Lion"]),
            rec("Puma concolor", &["Mountain Lion", "Puma"]),
            rec("Otaria byronia", &["South American Sea Lion"]),
            rec("Zalophus californianus", &["Californian Sea Lion"]),
            rec("Leontopithecus rosalia", &["Golden Lion Tamarin"]),
            rec(
                "Leontopithecus chrysomelas",
                &["Golden-headed Lion Tamarin"],
            ),
        ])
        .unwrap();
        let g = remove_edge(&g, "sub:lion", "sub:sea lion");
        let g = remove_edge(&g, "common:mountain lion", "sub:lion");
        let comps = connected_components(&g);
        let lion = comps
            .iter()
            .find(|c| c.species.contains(&"panthera leo".into()))
            .unwrap();
        let taxon = derive_query(lion, &g).unwrap();
        assert_eq!(taxon.taxon_id, "lion");
        assert_eq!(taxon.positive_keywords, ["lion".to_string()].into());
        assert_eq!(
            taxon.negative_keywords,
            [
                "lion tamarin".to_string(),
                "mountain lion".into(),
                "sea lion".into()
            ]
            .into()
        );
    }

    #[test]
    fn component_without_species_is_empty_taxon() {
        let g = build_graph(&[rec("A b", &["x bat"]), rec("C d", &["y bat"])]).unwrap();
        let g = remove_edge(&g, "common:x bat", "sub:bat");
        let g = remove_edge(&g, "common:y bat", "sub:bat");
        let comps = connected_components(&g);
        let bat = comps.iter().find(|c| c.substrings == ["bat"]).unwrap();
        assert_eq!(derive_query(bat, &g), Err(Error::EmptyTaxon));
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("flying fox"), "flying-fox");
        assert_eq!(slug("bechstein's bat"), "bechstein-s-bat");
    }
}
