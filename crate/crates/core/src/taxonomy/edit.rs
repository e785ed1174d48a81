use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::graph::{EdgeKind, NameGraph};
use crate::{Error, Result, Timestamp};

/// What a curation edit does. Targets are node ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "edit_kind", rename_all = "snake_case")]
pub enum EditAction {
    RemoveNode {
        node: String,
    },
    RemoveEdge {
        a: String,
        b: String,
    },
    /// Join the components of two nodes with a curator edge.
    MergeComponents {
        a: String,
        b: String,
    },
    /// Name the taxon of the component containing `node`.
    RenameTaxon {
        node: String,
        name: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdit {
    #[serde(flatten)]
    pub action: EditAction,
    pub timestamp: Timestamp,
    #[serde(default)]
    pub author: String,
}

impl GraphEdit {
    pub fn new(action: EditAction, timestamp: Timestamp, author: impl Into<String>) -> Self {
        Self {
            action,
            timestamp,
            author: author.into(),
        }
    }
}

/// Apply one edit, returning the edited copy. The input graph is untouched.
pub fn apply_edit(graph: &NameGraph, edit: &GraphEdit) -> Result<NameGraph> {
    let mut g = graph.clone();
    match &edit.action {
        EditAction::RemoveNode { node } => g.remove_node(node)?,
        EditAction::RemoveEdge { a, b } => g.remove_edge(a, b)?,
        EditAction::MergeComponents { a, b } => {
            if a == b {
                return Err(Error::InvalidEdit("cannot merge a node with itself".into()));
            }
            g.insert_edge(a, b, EdgeKind::Merged)?;
        }
        EditAction::RenameTaxon { node, name } => {
            let name = name.trim();
            if name.is_empty() {
                return Err(Error::InvalidEdit("empty taxon name".into()));
            }
            g.rename(node, name)?;
        }
    }
    Ok(g)
}

/// Append-only record of a curation session. The curated graph is always
/// `replay(base)`; undo is replaying a shorter prefix.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EditLog {
    edits: Vec<GraphEdit>,
}

impl EditLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn edits(&self) -> &[GraphEdit] {
        &self.edits
    }

    pub fn len(&self) -> usize {
        self.edits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    /// Apply `edit` to `current` and record it only if it succeeds.
    pub fn apply(&mut self, current: &NameGraph, edit: GraphEdit) -> Result<NameGraph> {
        let next = apply_edit(current, &edit)?;
        self.edits.push(edit);
        Ok(next)
    }

    pub fn replay(&self, base: &NameGraph) -> Result<NameGraph> {
        self.replay_prefix(base, self.edits.len())
    }

    pub fn replay_prefix(&self, base: &NameGraph, upto: usize) -> Result<NameGraph> {
        self.edits[..upto.min(self.edits.len())]
            .iter()
            .try_fold(base.clone(), |g, e| apply_edit(&g, e))
    }
}

impl FromIterator<GraphEdit> for EditLog {
    fn from_iter<T: IntoIterator<Item = GraphEdit>>(iter: T) -> Self {
        Self {
            edits: iter.into_iter().collect(),
        }
    }
}
