//! Rooted trees and fragmentation maps.

mod cutset;
mod export;
mod frag;

pub use cutset::{enumerate_cutsets, is_minimal_cutset, min_cutset_cost, MAX_ENUMERATION_VERTICES};
pub use export::{to_dot, TreeJson};
pub use frag::{FragError, FragmentationMap, LacunarityParams, LacunarityWitness, SeparationWitness};

use thiserror::Error;

/// Index of a vertex in a [`RootedTree`].
pub type VertexId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("tree has no vertices")]
    Empty,
    #[error("no root: every vertex has a parent")]
    NoRoot,
    #[error("vertices {0} and {1} are both roots")]
    MultipleRoots(VertexId, VertexId),
    #[error("parent of {0} is out of range")]
    BadParent(VertexId),
    #[error("vertex {0} lies on a cycle or is unreachable from the root")]
    Cycle(VertexId),
    #[error("tree has {0} vertices, enumeration is limited to {1}")]
    TooLarge(usize, usize),
}

/// A rooted tree stored as parent and child arrays, with depths and an
/// Euler interval per vertex for constant-time ancestor queries.
#[derive(Clone, Debug, PartialEq)]
pub struct RootedTree {
    parent: Vec<Option<VertexId>>,
    children: Vec<Vec<VertexId>>,
    depth: Vec<usize>,
    root: VertexId,
    preorder: Vec<VertexId>,
    tin: Vec<usize>,
    tout: Vec<usize>,
}

impl RootedTree {
    /// Builds a tree from a parent array. Children are listed in increasing
    /// id order.
    pub fn from_parents(parent: Vec<Option<VertexId>>) -> Result<Self, TreeError> {
        let n = parent.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        let mut root = None;
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            match *p {
                None => {
                    if let Some(r) = root {
                        return Err(TreeError::MultipleRoots(r, v));
                    }
                    root = Some(v);
                }
                Some(p) if p >= n || p == v => return Err(TreeError::BadParent(v)),
                Some(p) => children[p].push(v),
            }
        }
        let root = root.ok_or(TreeError::NoRoot)?;
        let mut depth = vec![usize::MAX; n];
        let mut tin = vec![0; n];
        let mut tout = vec![0; n];
        let mut preorder = Vec::with_capacity(n);
        // Iterative DFS so that very deep chains do not overflow the stack.
        let mut stack = vec![(root, 0usize)];
        depth[root] = 0;
        while let Some(top) = stack.last_mut() {
            let (v, next) = *top;
            if next == 0 {
                tin[v] = preorder.len();
                preorder.push(v);
            }
            if next < children[v].len() {
                top.1 += 1;
                let c = children[v][next];
                depth[c] = depth[v] + 1;
                stack.push((c, 0));
            } else {
                tout[v] = preorder.len();
                stack.pop();
            }
        }
        if preorder.len() != n {
            let v = (0..n).find(|&v| depth[v] == usize::MAX).expect("some vertex unreached");
            return Err(TreeError::Cycle(v));
        }
        Ok(RootedTree { parent, children, depth, root, preorder, tin, tout })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<VertexId>] {
        &self.parent
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v]
    }

    pub fn depth(&self, v: VertexId) -> usize {
        self.depth[v]
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.children[v].is_empty()
    }

    pub fn leaves(&self) -> Vec<VertexId> {
        self.preorder.iter().copied().filter(|&v| self.is_leaf(v)).collect()
    }

    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    /// Vertices with every parent before its children.
    pub fn preorder(&self) -> &[VertexId] {
        &self.preorder
    }

    /// Vertices with every child before its parent.
    pub fn postorder(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.preorder.iter().rev().copied()
    }

    /// Weak ancestry: `a` is `v` or lies on the path from `v` to the root.
    pub fn is_ancestor(&self, a: VertexId, v: VertexId) -> bool {
        self.tin[a] <= self.tin[v] && self.tin[v] < self.tout[a]
    }

    /// Strict ancestors of `v`, nearest first.
    pub fn ancestors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        std::iter::successors(self.parent[v], move |&u| self.parent[u])
    }

    pub fn lca(&self, mut a: VertexId, mut b: VertexId) -> VertexId {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("deeper vertex has a parent");
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("deeper vertex has a parent");
        }
        while a != b {
            a = self.parent[a].expect("non-root");
            b = self.parent[b].expect("non-root");
        }
        a
    }

    /// The subtree of `u` in preorder, `u` first.
    pub fn subtree(&self, u: VertexId) -> &[VertexId] {
        &self.preorder[self.tin[u]..self.tout[u]]
    }

    /// Descendants of `u` at absolute depth `d`, in preorder.
    pub fn descendants_at_depth(&self, u: VertexId, d: usize) -> Vec<VertexId> {
        if d < self.depth[u] {
            return Vec::new();
        }
        let mut frontier = vec![u];
        for _ in self.depth[u]..d {
            frontier = frontier.iter().flat_map(|&v| self.children[v].iter().copied()).collect();
        }
        frontier
    }

    /// The nearest strict descendants of `u` that lie in `mask`: the
    /// elements of the set reachable from `u` without passing another one.
    pub fn first_descendants_in(&self, u: VertexId, mask: &[bool]) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut stack: Vec<VertexId> = self.children[u].iter().rev().copied().collect();
        while let Some(v) = stack.pop() {
            if mask[v] {
                out.push(v);
            } else {
                stack.extend(self.children[v].iter().rev().copied());
            }
        }
        out
    }

    /// `{u}` when `u` is in `mask`, otherwise [`Self::first_descendants_in`].
    pub fn first_descendants_in_star(&self, u: VertexId, mask: &[bool]) -> Vec<VertexId> {
        if mask[u] {
            vec![u]
        } else {
            self.first_descendants_in(u, mask)
        }
    }

    /// The tree induced on the vertices in `keep`, which must contain the
    /// root: each kept vertex hangs below its nearest kept strict ancestor.
    /// New ids follow the original preorder, so the root becomes 0. Returns
    /// the tree and the map from new ids to old ids.
    pub fn induced(&self, keep: &[bool]) -> (RootedTree, Vec<VertexId>) {
        assert!(keep[self.root], "induced tree must contain the root");
        let mut new_id = vec![usize::MAX; self.len()];
        let mut old_of = Vec::new();
        let mut nearest = vec![None; self.len()];
        let mut parents = Vec::new();
        for &v in &self.preorder {
            let up = self.parent[v].and_then(|p| if keep[p] { Some(new_id[p]) } else { nearest[p] });
            if keep[v] {
                new_id[v] = old_of.len();
                old_of.push(v);
                parents.push(up);
                nearest[v] = Some(new_id[v]);
            } else {
                nearest[v] = up;
            }
        }
        let t = RootedTree::from_parents(parents).expect("induced forest of a rooted subset is a tree");
        (t, old_of)
    }
}
