use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{FragmentationMap, RootedTree, TreeError, VertexId};
use crate::metric::PointId;
use crate::pointset::PointSet;

/// Graphviz rendering of a fragmentation map. Each node shows its id and
/// cluster; chains of identical clusters are drawn as they are.
pub fn to_dot(map: &FragmentationMap, label: impl Fn(PointId) -> String) -> String {
    let mut out = String::from("digraph fragmentation {\n  node [shape=box];\n");
    for &v in map.tree().preorder() {
        let pts: Vec<String> = map.cluster(v).iter().map(&label).collect();
        let _ = writeln!(out, "  v{v} [label=\"{v}: {{{}}}\"];", pts.join(","));
    }
    for &v in map.tree().preorder() {
        for &c in map.tree().children(v) {
            let _ = writeln!(out, "  v{v} -> v{c};");
        }
    }
    out.push_str("}\n");
    out
}

/// Parent-array serialization of a fragmentation map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeJson {
    pub parent: Vec<Option<VertexId>>,
    pub clusters: Vec<Vec<PointId>>,
}

impl TreeJson {
    pub fn from_map(map: &FragmentationMap) -> Self {
        TreeJson {
            parent: map.tree().parents().to_vec(),
            clusters: map.clusters().iter().map(|c| c.as_slice().to_vec()).collect(),
        }
    }

    pub fn to_map(&self) -> Result<FragmentationMap, TreeError> {
        let tree = RootedTree::from_parents(self.parent.clone())?;
        let clusters = self.clusters.iter().map(|c| PointSet::from_unsorted(c.clone())).collect();
        FragmentationMap::new(tree, clusters).map_err(|_| TreeError::BadParent(self.parent.len()))
    }
}
