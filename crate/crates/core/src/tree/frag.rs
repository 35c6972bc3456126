use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{RootedTree, VertexId};
use crate::metric::{MetricSpace, PointId};
use crate::pointset::PointSet;
use crate::ultrametric::Ultrametric;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FragError {
    #[error("{clusters} clusters for {vertices} vertices")]
    Shape { clusters: usize, vertices: usize },
    #[error("root cluster is not the whole space")]
    RootNotFull,
    #[error("leaf {0} is not a singleton")]
    LeafNotSingleton(VertexId),
    #[error("cluster of {child} is not contained in the cluster of its parent {parent}")]
    ChildNotSubset { child: VertexId, parent: VertexId },
    #[error("incomparable vertices {0} and {1} share point {2}")]
    OverlapIncomparable(VertexId, VertexId, PointId),
    #[error("cluster of {0} mentions a point outside the space")]
    PointOutOfRange(VertexId),
}

/// Lacunarity constants kept as logarithms, since the constants produced by
/// the skeleton construction overflow `f64`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LacunarityParams {
    pub log_k: f64,
    pub log_gamma: f64,
}

impl LacunarityParams {
    pub fn new(k: f64, gamma: f64) -> Self {
        LacunarityParams { log_k: k.ln(), log_gamma: gamma.ln() }
    }
}

/// A failing instance of the lacunarity inequality: `diam(F_q)` exceeds
/// `K * gamma^(depth(u) - depth(q)) * d(bd F_v, bd F_w)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LacunarityWitness {
    pub ancestor: VertexId,
    pub vertex: VertexId,
    pub children: (VertexId, VertexId),
    pub log_lhs: f64,
    pub log_rhs: f64,
}

/// A point outside `bd F_u` that comes closer than `beta * diam(F_u)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationWitness {
    pub vertex: VertexId,
    pub point: PointId,
    pub distance: f64,
    pub required: f64,
}

/// A rooted tree whose vertices carry point clusters. Boundaries, the union
/// of leaf clusters below each vertex, are computed once at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct FragmentationMap {
    tree: RootedTree,
    clusters: Vec<PointSet>,
    boundary: Vec<PointSet>,
}

impl FragmentationMap {
    pub fn new(tree: RootedTree, clusters: Vec<PointSet>) -> Result<Self, FragError> {
        if clusters.len() != tree.len() {
            return Err(FragError::Shape { clusters: clusters.len(), vertices: tree.len() });
        }
        let mut boundary = vec![PointSet::new(); tree.len()];
        let order: Vec<VertexId> = tree.postorder().collect();
        for v in order {
            boundary[v] = if tree.is_leaf(v) {
                clusters[v].clone()
            } else {
                let kids = tree.children(v);
                if kids.len() == 1 {
                    boundary[kids[0]].clone()
                } else {
                    PointSet::from_unsorted(kids.iter().flat_map(|&c| boundary[c].iter()).collect())
                }
            };
        }
        Ok(FragmentationMap { tree, clusters, boundary })
    }

    pub fn tree(&self) -> &RootedTree {
        &self.tree
    }

    pub fn cluster(&self, v: VertexId) -> &PointSet {
        &self.clusters[v]
    }

    pub fn clusters(&self) -> &[PointSet] {
        &self.clusters
    }

    /// `bd F_v`: the union of the leaf clusters below `v`.
    pub fn boundary(&self, v: VertexId) -> &PointSet {
        &self.boundary[v]
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    /// Checks the four defining conditions against a space of `n` points:
    /// full root, singleton leaves, nested clusters, disjoint incomparable
    /// clusters. Nesting plus pairwise disjoint siblings implies the last
    /// condition for every incomparable pair, so siblings are what get
    /// compared.
    pub fn validate(&self, n: usize) -> Result<(), FragError> {
        for (v, c) in self.clusters.iter().enumerate() {
            if c.iter().any(|p| p >= n) {
                return Err(FragError::PointOutOfRange(v));
            }
        }
        if self.clusters[self.tree.root()].len() != n {
            return Err(FragError::RootNotFull);
        }
        for &v in self.tree.preorder() {
            if self.tree.is_leaf(v) && self.clusters[v].len() != 1 {
                return Err(FragError::LeafNotSingleton(v));
            }
            if let Some(p) = self.tree.parent(v) {
                if !self.clusters[v].is_subset(&self.clusters[p]) {
                    return Err(FragError::ChildNotSubset { child: v, parent: p });
                }
            }
        }
        let mut owner = vec![usize::MAX; n];
        for &v in self.tree.preorder() {
            for &c in self.tree.children(v) {
                for p in self.clusters[c].iter() {
                    if owner[p] != usize::MAX && owner[p] != c {
                        let (a, b) = (owner[p].min(c), owner[p].max(c));
                        return Err(FragError::OverlapIncomparable(a, b, p));
                    }
                    owner[p] = c;
                }
            }
            for &c in self.tree.children(v) {
                for p in self.clusters[c].iter() {
                    owner[p] = usize::MAX;
                }
            }
        }
        Ok(())
    }

    /// Diameter of every cluster. A vertex whose only child carries the
    /// same cluster reuses the child's value, which keeps long chains cheap.
    pub fn cluster_diameters(&self, space: &MetricSpace) -> Vec<f64> {
        let mut diam = vec![0.0; self.len()];
        let order: Vec<VertexId> = self.tree.postorder().collect();
        for v in order {
            let kids = self.tree.children(v);
            diam[v] = if kids.len() == 1 && self.clusters[kids[0]] == self.clusters[v] {
                diam[kids[0]]
            } else {
                space.diam_of(self.clusters[v].as_slice())
            };
        }
        diam
    }

    /// Smallest boundary distance between two distinct children of `u`,
    /// with the pair achieving it. `None` for fewer than two children.
    pub fn children_gap(&self, space: &MetricSpace, u: VertexId) -> Option<(f64, VertexId, VertexId)> {
        let kids = self.tree.children(u);
        let mut best: Option<(f64, VertexId, VertexId)> = None;
        for (i, &v) in kids.iter().enumerate() {
            for &w in &kids[i + 1..] {
                let g = space.set_distance(self.boundary[v].as_slice(), self.boundary[w].as_slice());
                if best.is_none_or(|(b, _, _)| g < b) {
                    best = Some((g, v, w));
                }
            }
        }
        best
    }

    /// Checks lacunarity for every vertex with at least two children and
    /// every weak ancestor of it, comparing logarithms. Returns the first
    /// violation in preorder.
    pub fn check_lacunary(&self, space: &MetricSpace, params: LacunarityParams) -> Result<(), LacunarityWitness> {
        let diam = self.cluster_diameters(space);
        for &u in self.tree.preorder() {
            let Some((gap, v, w)) = self.children_gap(space, u) else { continue };
            let log_gap = gap.ln();
            let du = self.tree.depth(u);
            for q in std::iter::once(u).chain(self.tree.ancestors(u)) {
                if diam[q] == 0.0 {
                    continue;
                }
                let lhs = diam[q].ln();
                let rhs = params.log_k + (du - self.tree.depth(q)) as f64 * params.log_gamma + log_gap;
                if lhs > rhs {
                    return Err(LacunarityWitness {
                        ancestor: q,
                        vertex: u,
                        children: (v, w),
                        log_lhs: lhs,
                        log_rhs: rhs,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_lacunary(&self, space: &MetricSpace, params: LacunarityParams) -> bool {
        self.check_lacunary(space, params).is_ok()
    }

    /// Checks that every point of `bd F_root` outside `bd F_u` stays at
    /// distance at least `beta * diam(F_u)` from `F_u`, for each listed `u`.
    pub fn check_separated(
        &self,
        space: &MetricSpace,
        beta: f64,
        vertices: impl IntoIterator<Item = VertexId>,
    ) -> Result<(), SeparationWitness> {
        let all = &self.boundary[self.tree.root()];
        for u in vertices {
            let fu = self.clusters[u].as_slice();
            let required = beta * space.diam_of(fu);
            for x in all.iter() {
                if self.boundary[u].contains(x) {
                    continue;
                }
                let dist = space.point_set_distance(x, fu);
                if dist < required {
                    return Err(SeparationWitness { vertex: u, point: x, distance: dist, required });
                }
            }
        }
        Ok(())
    }

    pub fn is_separated(&self, space: &MetricSpace, beta: f64, vertices: impl IntoIterator<Item = VertexId>) -> bool {
        self.check_separated(space, beta, vertices).is_ok()
    }

    /// A leaf that has a sibling, if any.
    pub fn leaf_with_sibling(&self) -> Option<VertexId> {
        self.tree
            .preorder()
            .iter()
            .copied()
            .find(|&v| self.tree.is_leaf(v) && self.tree.parent(v).is_some_and(|p| self.tree.children(p).len() > 1))
    }

    /// `rho(x, y) = diam(F_lca)` on `bd F_root`, where the lca is taken
    /// between the leaves carrying x and y. On a lacunary map this is an
    /// ultrametric within factor K of the metric.
    pub fn ultrametric_from_lacunary(&self, space: &MetricSpace) -> Ultrametric {
        let diam = self.cluster_diameters(space);
        let points: Vec<PointId> = self.boundary[self.tree.root()].as_slice().to_vec();
        let mut index = vec![usize::MAX; space.len()];
        for (i, &p) in points.iter().enumerate() {
            index[p] = i;
        }
        let m = points.len();
        let mut rho = vec![0.0; m * m];
        for &u in self.tree.preorder() {
            let kids = self.tree.children(u);
            for (a, &v) in kids.iter().enumerate() {
                for &w in &kids[a + 1..] {
                    for x in self.boundary[v].iter() {
                        for y in self.boundary[w].iter() {
                            let (i, j) = (index[x], index[y]);
                            rho[i * m + j] = diam[u];
                            rho[j * m + i] = diam[u];
                        }
                    }
                }
            }
        }
        Ultrametric::new_unchecked(points, rho).expect("square matrix")
    }

    /// The map restricted to the tree induced on `keep` (see
    /// [`RootedTree::induced`]), with the new-to-old vertex map.
    pub fn restrict(&self, keep: &[bool]) -> (FragmentationMap, Vec<VertexId>) {
        let (tree, old) = self.tree.induced(keep);
        let clusters = old.iter().map(|&v| self.clusters[v].clone()).collect();
        (FragmentationMap::new(tree, clusters).expect("one cluster per kept vertex"), old)
    }
}
