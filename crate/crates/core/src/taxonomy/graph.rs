use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::suffix::shared_suffix_closure;
use super::SpeciesRecord;
use crate::text::{contains_words, is_word_suffix, label_words};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Scientific,
    Common,
    Substring,
}

impl NodeKind {
    fn prefix(self) -> &'static str {
        match self {
            NodeKind::Scientific => "sci",
            NodeKind::Common => "common",
            NodeKind::Substring => "sub",
        }
    }

    /// Stable node id for a canonical label of this kind.
    pub fn node_id(self, label: &str) -> String {
        format!("{}:{}", self.prefix(), label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    SpeciesCommon,
    NameSubstring,
    /// Added by a curator to join two components.
    Merged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub a: String,
    pub b: String,
    pub kind: EdgeKind,
}

#[derive(Serialize, Deserialize)]
struct GraphSnapshot {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    taxon_names: BTreeMap<String, String>,
}

/// Undirected graph over species, common names and shared name suffixes.
///
/// Node ids are `"<kind>:<label>"`, so two graphs built from the same names
/// agree on ids regardless of input order. Edge endpoints are stored with
/// the smaller id first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "GraphSnapshot", try_from = "GraphSnapshot")]
pub struct NameGraph {
    nodes: BTreeMap<String, Node>,
    edges: BTreeMap<(String, String), EdgeKind>,
    taxon_names: BTreeMap<String, String>,
}

impl From<NameGraph> for GraphSnapshot {
    fn from(g: NameGraph) -> Self {
        GraphSnapshot {
            nodes: g.nodes.into_values().collect(),
            edges: g
                .edges
                .into_iter()
                .map(|((a, b), kind)| Edge { a, b, kind })
                .collect(),
            taxon_names: g.taxon_names,
        }
    }
}

impl TryFrom<GraphSnapshot> for NameGraph {
    type Error = Error;

    fn try_from(s: GraphSnapshot) -> Result<Self> {
        let mut g = NameGraph::default();
        for n in s.nodes {
            g.nodes.insert(n.id.clone(), n);
        }
        for e in s.edges {
            g.insert_edge(&e.a, &e.b, e.kind)?;
        }
        for (id, name) in s.taxon_names {
            if !g.nodes.contains_key(&id) {
                return Err(Error::EditTargetNotFound(id));
            }
            g.taxon_names.insert(id, name);
        }
        Ok(g)
    }
}

fn edge_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.into(), b.into())
    } else {
        (b.into(), a.into())
    }
}

impl NameGraph {
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().map(|((a, b), kind)| Edge {
            a: a.clone(),
            b: b.clone(),
            kind: *kind,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        self.edges.contains_key(&edge_key(a, b))
    }

    pub fn edge_kind(&self, a: &str, b: &str) -> Option<EdgeKind> {
        self.edges.get(&edge_key(a, b)).copied()
    }

    pub fn taxon_names(&self) -> &BTreeMap<String, String> {
        &self.taxon_names
    }

    /// Find a node id by label, trying scientific, common, then substring.
    pub fn find_label(&self, label: &str) -> Option<&Node> {
        [NodeKind::Scientific, NodeKind::Common, NodeKind::Substring]
            .into_iter()
            .find_map(|k| self.nodes.get(&k.node_id(label)))
    }

    pub(crate) fn insert_node(&mut self, kind: NodeKind, label: &str) -> String {
        let id = kind.node_id(label);
        self.nodes.entry(id.clone()).or_insert_with(|| Node {
            id: id.clone(),
            kind,
            label: label.into(),
        });
        id
    }

    pub(crate) fn insert_edge(&mut self, a: &str, b: &str, kind: EdgeKind) -> Result<()> {
        if a == b {
            return Err(Error::InvalidEdit(format!("self edge on {a}")));
        }
        for id in [a, b] {
            if !self.nodes.contains_key(id) {
                return Err(Error::EditTargetNotFound(id.into()));
            }
        }
        self.edges.entry(edge_key(a, b)).or_insert(kind);
        Ok(())
    }

    pub(crate) fn remove_node(&mut self, id: &str) -> Result<()> {
        if self.nodes.remove(id).is_none() {
            return Err(Error::EditTargetNotFound(id.into()));
        }
        self.edges.retain(|(a, b), _| a != id && b != id);
        self.taxon_names.remove(id);
        Ok(())
    }

    pub(crate) fn remove_edge(&mut self, a: &str, b: &str) -> Result<()> {
        match self.edges.remove(&edge_key(a, b)) {
            Some(_) => Ok(()),
            None => Err(Error::EditTargetNotFound(format!("{a} -- {b}"))),
        }
    }

    pub(crate) fn rename(&mut self, id: &str, name: &str) -> Result<()> {
        if !self.nodes.contains_key(id) {
            return Err(Error::EditTargetNotFound(id.into()));
        }
        self.taxon_names.insert(id.into(), name.into());
        Ok(())
    }

    /// Check the structural invariants. Used by tests and after loading.
    pub fn validate(&self) -> Result<()> {
        let mut labels = BTreeSet::new();
        for (id, n) in &self.nodes {
            if *id != n.kind.node_id(&n.label) || !labels.insert((n.kind, n.label.as_str())) {
                return Err(Error::InvalidEdit(format!("bad node {id}")));
            }
        }
        for ((a, b), kind) in &self.edges {
            let (na, nb) = match (self.nodes.get(a), self.nodes.get(b)) {
                (Some(x), Some(y)) if a != b => (x, y),
                _ => return Err(Error::InvalidEdit(format!("dangling edge {a} -- {b}"))),
            };
            let ok = match kind {
                EdgeKind::SpeciesCommon => {
                    let kinds = [na.kind, nb.kind];
                    kinds.contains(&NodeKind::Scientific) && kinds.contains(&NodeKind::Common)
                }
                EdgeKind::NameSubstring => {
                    let (src, dst) =
                        if nb.kind == NodeKind::Substring && is_word_suffix(&na.label, &nb.label) {
                            (na, nb)
                        } else {
                            (nb, na)
                        };
                    dst.kind == NodeKind::Substring
                        && src.kind != NodeKind::Scientific
                        && is_word_suffix(&src.label, &dst.label)
                        && (src.label != dst.label || src.kind == NodeKind::Common)
                }
                EdgeKind::Merged => true,
            };
            if !ok {
                return Err(Error::InvalidEdit(format!(
                    "edge {a} -- {b} violates {kind:?}"
                )));
            }
        }
        Ok(())
    }
}

fn longest_suffix_in<'a>(
    label: &str,
    candidates: &'a BTreeSet<String>,
    strict: bool,
) -> Option<&'a String> {
    let words = label_words(label);
    let start = usize::from(strict);
    (start..words.len())
        .map(|skip| words[skip..].join(" "))
        .find_map(|s| candidates.get(&s))
}

/// Build the name graph.
///
/// Nodes: one per scientific name, per distinct common name and per shared
/// suffix. Edges: species to each of its common names; each common name to
/// its longest word suffix that is a shared-suffix node (a common name equal
/// to a shared suffix links to that node); each shared suffix to its longest
/// strictly shorter shared suffix. Linking only to the nearest suffix keeps
/// the suffix hierarchy a forest, so pruning one link detaches a whole
/// subtree.
pub fn build_graph(records: &[SpeciesRecord]) -> Result<NameGraph> {
    let mut records = records
        .iter()
        .map(SpeciesRecord::normalized)
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| a.scientific_name.cmp(&b.scientific_name));
    if let Some(w) = records
        .windows(2)
        .find(|w| w[0].scientific_name == w[1].scientific_name)
    {
        return Err(Error::DuplicateSpecies(w[0].scientific_name.clone()));
    }

    let mut g = NameGraph::default();
    let common: BTreeSet<String> = records
        .iter()
        .flat_map(|r| r.common_names.iter().cloned())
        .collect();
    let suffixes = shared_suffix_closure(&common);

    for r in &records {
        let sci = g.insert_node(NodeKind::Scientific, &r.scientific_name);
        for name in &r.common_names {
            let c = g.insert_node(NodeKind::Common, name);
            g.insert_edge(&sci, &c, EdgeKind::SpeciesCommon)?;
        }
    }
    for s in &suffixes {
        g.insert_node(NodeKind::Substring, s);
    }
    for name in &common {
        if let Some(target) = longest_suffix_in(name, &suffixes, false) {
            let (a, b) = (
                NodeKind::Common.node_id(name),
                NodeKind::Substring.node_id(target),
            );
            g.insert_edge(&a, &b, EdgeKind::NameSubstring)?;
        }
    }
    for s in &suffixes {
        if let Some(target) = longest_suffix_in(s, &suffixes, true) {
            let (a, b) = (
                NodeKind::Substring.node_id(s),
                NodeKind::Substring.node_id(target),
            );
            g.insert_edge(&a, &b, EdgeKind::NameSubstring)?;
        }
    }
    Ok(g)
}

/// A connected component of the name graph: one candidate folk taxon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    /// Position in the deterministic component listing of its graph.
    pub id: usize,
    pub display_name: String,
    pub node_ids: Vec<String>,
    pub species: Vec<String>,
    pub names: Vec<String>,
    pub substrings: Vec<String>,
}

impl Component {
    pub fn size(&self) -> usize {
        self.node_ids.len()
    }

    /// Common-name and substring labels, deduplicated and sorted.
    pub fn name_labels(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.names.iter().chain(&self.substrings).collect();
        set.into_iter().cloned().collect()
    }

    fn smallest_label(&self) -> Option<&String> {
        self.species
            .iter()
            .chain(&self.names)
            .chain(&self.substrings)
            .min()
    }
}

/// Labels not containing another label of the set as a whole-word run.
pub(crate) fn minimal_labels<'a, I: IntoIterator<Item = &'a String>>(labels: I) -> Vec<String> {
    let all: BTreeSet<&String> = labels.into_iter().collect();
    all.iter()
        .filter(|l| !all.iter().any(|m| m != *l && contains_words(l, m)))
        .map(|l| (*l).clone())
        .collect()
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Partition the graph into connected components, ordered by their smallest
/// label (ties by smallest node id).
pub fn connected_components(graph: &NameGraph) -> Vec<Component> {
    let ids: Vec<&String> = graph.nodes.keys().collect();
    let index: BTreeMap<&String, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    for (a, b) in graph.edges.keys() {
        let (ra, rb) = (find(&mut parent, index[a]), find(&mut parent, index[b]));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: BTreeMap<usize, Vec<&String>> = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(*id);
    }

    let mut comps: Vec<Component> = groups
        .into_values()
        .map(|members| {
            let mut c = Component {
                id: 0,
                display_name: String::new(),
                node_ids: members.iter().map(|s| (*s).clone()).collect(),
                species: Vec::new(),
                names: Vec::new(),
                substrings: Vec::new(),
            };
            for id in &members {
                let n = &graph.nodes[*id];
                match n.kind {
                    NodeKind::Scientific => c.species.push(n.label.clone()),
                    NodeKind::Common => c.names.push(n.label.clone()),
                    NodeKind::Substring => c.substrings.push(n.label.clone()),
                }
            }
            c.display_name = display_name(graph, &c);
            c
        })
        .collect();
    comps.sort_by(|a, b| {
        a.smallest_label()
            .cmp(&b.smallest_label())
            .then_with(|| a.node_ids.cmp(&b.node_ids))
    });
    for (i, c) in comps.iter_mut().enumerate() {
        c.id = i;
    }
    comps
}

fn display_name(graph: &NameGraph, c: &Component) -> String {
    if let Some(name) = c.node_ids.iter().find_map(|id| graph.taxon_names.get(id)) {
        return name.clone();
    }
    let labels = c.name_labels();
    let minimal = minimal_labels(&labels);
    minimal
        .iter()
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
        .or_else(|| c.species.first())
        .cloned()
        .unwrap_or_default()
}
