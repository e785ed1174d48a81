//! Folk taxonomy construction: a graph over scientific names, common names
//! and the trailing word substrings that common names share, clustered into
//! candidate taxa, curated by hand and compiled into keyword queries.

mod edit;
mod graph;
mod query;
mod suffix;

pub use edit::{apply_edit, EditAction, EditLog, GraphEdit};
pub use graph::{
    build_graph, connected_components, Component, Edge, EdgeKind, NameGraph, Node, NodeKind,
};
pub use query::{derive_query, derive_taxa, FolkTaxon};
pub use suffix::extract_shared_suffixes;

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::text::normalize_name;
use crate::{Error, Result};

/// One species row of a name list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeciesRecord {
    pub scientific_name: String,
    #[serde(default)]
    pub common_names: Vec<String>,
    #[serde(default)]
    pub order_name: String,
    #[serde(default)]
    pub family_name: String,
}

impl SpeciesRecord {
    /// Canonicalize every name. Duplicate common names collapse.
    pub fn normalized(&self) -> Result<Self> {
        let mut common_names = self
            .common_names
            .iter()
            .map(|n| normalize_name(n))
            .collect::<Result<Vec<_>>>()?;
        common_names.sort();
        common_names.dedup();
        Ok(Self {
            scientific_name: normalize_name(&self.scientific_name)?,
            common_names,
            order_name: self.order_name.trim().into(),
            family_name: self.family_name.trim().into(),
        })
    }
}

/// Parse a tab-separated species list: scientific name, `|`-separated
/// common names, order, family. A header row starting with
/// `scientific_name`, blank lines and `#` comments are skipped; trailing
/// columns may be omitted.
pub fn parse_species_table(text: &str) -> Result<Vec<SpeciesRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') || line.starts_with("scientific_name") {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() > 4 || cols[0].trim().is_empty() {
            return Err(Error::Data {
                line: i + 1,
                reason: "expected 1 to 4 tab-separated columns".into(),
            });
        }
        let col = |k: usize| cols.get(k).map_or("", |c| c.trim());
        out.push(SpeciesRecord {
            scientific_name: col(0).into(),
            common_names: col(1)
                .split('|')
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .map(String::from)
                .collect(),
            order_name: col(2).into(),
            family_name: col(3).into(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn species_table() {
        let t = "scientific_name\tcommon_names\torder\tfamily\n# c\nPanthera leo\tLion|African Lion\tCarnivora\tFelidae\n\nManis javanica\tSunda Pangolin\n";
        let r = parse_species_table(t).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].common_names, ["Lion", "African Lion"]);
        assert_eq!(r[1].family_name, "");
        assert!(matches!(
            parse_species_table("a\tb\tc\td\te"),
            Err(Error::Data { line: 1, .. })
        ));
    }
}
