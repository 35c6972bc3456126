//! Weighted trees and the greedy initial partition.
//!
//! The initial partition is a fragmentation map whose leaves all sit at depth
//! `m * h`. Level `i` is formed from level `i + 1` by repeatedly taking the
//! heaviest remaining cluster (by modified weight) and absorbing every
//! remaining cluster within `(1 - 3 tau) / 2 * tau^i` of it. The heaviest
//! cluster becomes the designated child of the new vertex.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{MeasuredMetricSpace, PointId};
use crate::pointset::PointSet;
use crate::tree::{FragmentationMap, RootedTree, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("m = {m} is too small for the minimum distance; need m >= {required}")]
    MTooSmall { m: usize, required: usize },
    #[error("space must have diameter exactly 1, found {0}")]
    NotNormalized(f64),
    #[error("weight of vertex {0} is not a positive finite number")]
    BadWeight(VertexId),
    #[error("weight of vertex {0} exceeds the sum over its children")]
    NotSubadditive(VertexId),
    #[error("designated child of {0} is not a child or does not maximize the modified weight")]
    BadDesignated(VertexId),
    #[error("leaf {0} is not at depth {1}")]
    LeafDepth(VertexId, usize),
    #[error("need at least two points")]
    TooFewPoints,
}

/// Parameters of the initial partition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionBuildParams {
    pub tau: f64,
    pub m: usize,
    pub h: usize,
    pub k: usize,
}

impl PartitionBuildParams {
    /// Uses the smallest admissible `m` for the given space.
    pub fn with_minimal_m(tau: f64, h: usize, k: usize, min_distance: f64) -> Result<Self, PartitionError> {
        check_tau(tau)?;
        if h == 0 {
            return Err(PartitionError::ParamOutOfRange("h must be positive".into()));
        }
        Ok(PartitionBuildParams { tau, m: minimal_m(tau, h, min_distance), h, k })
    }

    fn validate(&self) -> Result<(), PartitionError> {
        check_tau(self.tau)?;
        if self.h == 0 {
            return Err(PartitionError::ParamOutOfRange("h must be positive".into()));
        }
        if self.k < 2 {
            return Err(PartitionError::ParamOutOfRange("k must be at least 2".into()));
        }
        if self.m < 2 {
            return Err(PartitionError::ParamOutOfRange("m must be at least 2".into()));
        }
        Ok(())
    }

    /// Logarithm of the grouping threshold `(1 - 3 tau) / 2 * tau^i`.
    pub fn log_threshold(&self, i: usize) -> f64 {
        ((1.0 - 3.0 * self.tau) / 2.0).ln() + i as f64 * self.tau.ln()
    }
}

fn check_tau(tau: f64) -> Result<(), PartitionError> {
    if tau > 0.0 && tau < 1.0 / 3.0 {
        Ok(())
    } else {
        Err(PartitionError::ParamOutOfRange(format!("tau = {tau} is not in (0, 1/3)")))
    }
}

/// Smallest `m >= 2` with `min_distance > tau^((m - 2) h + 1)`.
pub fn minimal_m(tau: f64, h: usize, min_distance: f64) -> usize {
    let (lt, ld) = (tau.ln(), min_distance.ln());
    let mut m = 2;
    while ld <= ((m - 2) * h + 1) as f64 * lt {
        m += 1;
    }
    m
}

/// A rooted tree with a subadditive weight, its modified weights and a
/// designated child for every internal vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedTree {
    pub tree: RootedTree,
    pub w: Vec<f64>,
    pub w_mod: Vec<f64>,
    pub designated: Vec<Option<VertexId>>,
    pub h: usize,
    pub k: usize,
}

/// Relative slack when comparing a weight to the sum over its children,
/// since the two are accumulated in different orders.
const SUBADDITIVE_SLACK: f64 = 1e-12;

/// Modified weights: `w(u)^((k-1)/k)` at depths divisible by `h`, the sum
/// over the children elsewhere.
pub fn modified_weights(tree: &RootedTree, w: &[f64], h: usize, k: usize) -> Vec<f64> {
    let e = (k as f64 - 1.0) / k as f64;
    let mut out = vec![0.0; tree.len()];
    let order: Vec<VertexId> = tree.postorder().collect();
    for u in order {
        out[u] = if tree.depth(u) % h == 0 || tree.is_leaf(u) {
            w[u].powf(e)
        } else {
            tree.children(u).iter().map(|&c| out[c]).sum()
        };
    }
    out
}

impl WeightedTree {
    /// Computes modified weights and picks as designated child the one with
    /// the largest modified weight, ties going to the smallest id.
    pub fn new(tree: RootedTree, w: Vec<f64>, h: usize, k: usize) -> Result<Self, PartitionError> {
        check_weights(&tree, &w)?;
        let w_mod = modified_weights(&tree, &w, h, k);
        let designated = (0..tree.len())
            .map(|u| {
                let mut best: Option<VertexId> = None;
                for &c in tree.children(u) {
                    if best.is_none_or(|b| w_mod[c] > w_mod[b]) {
                        best = Some(c);
                    }
                }
                best
            })
            .collect();
        Ok(WeightedTree { tree, w, w_mod, designated, h, k })
    }

    /// Uses the given designated children after checking they are children
    /// maximizing the modified weight.
    pub fn with_designated(
        tree: RootedTree,
        w: Vec<f64>,
        designated: Vec<Option<VertexId>>,
        h: usize,
        k: usize,
    ) -> Result<Self, PartitionError> {
        check_weights(&tree, &w)?;
        let w_mod = modified_weights(&tree, &w, h, k);
        for u in 0..tree.len() {
            let kids = tree.children(u);
            let ok = match designated[u] {
                None => kids.is_empty(),
                Some(c) => kids.contains(&c) && kids.iter().all(|&o| w_mod[o] <= w_mod[c]),
            };
            if !ok {
                return Err(PartitionError::BadDesignated(u));
            }
        }
        Ok(WeightedTree { tree, w, w_mod, designated, h, k })
    }

    /// Whether `v` is the designated child of its parent. The root counts
    /// as designated.
    pub fn is_designated(&self, v: VertexId) -> bool {
        match self.tree.parent(v) {
            None => true,
            Some(p) => self.designated[p] == Some(v),
        }
    }
}

fn check_weights(tree: &RootedTree, w: &[f64]) -> Result<(), PartitionError> {
    assert_eq!(w.len(), tree.len(), "one weight per vertex");
    for u in 0..tree.len() {
        if !(w[u].is_finite() && w[u] > 0.0) {
            return Err(PartitionError::BadWeight(u));
        }
        if !tree.is_leaf(u) {
            let s: f64 = tree.children(u).iter().map(|&c| w[c]).sum();
            if w[u] > s * (1.0 + SUBADDITIVE_SLACK) {
                return Err(PartitionError::NotSubadditive(u));
            }
        }
    }
    Ok(())
}

struct LevelNode {
    cluster: PointSet,
    mass: f64,
    w_mod: f64,
    children: Vec<usize>,
    designated: Option<usize>,
}

/// Index of the node with the largest modified weight, ties going to the
/// smallest minimum point.
fn heaviest<'a>(nodes: &[LevelNode], among: impl Iterator<Item = &'a usize>) -> usize {
    let mut best: Option<usize> = None;
    for &s in among {
        let better = match best {
            None => true,
            Some(b) => {
                nodes[s].w_mod > nodes[b].w_mod
                    || (nodes[s].w_mod == nodes[b].w_mod && nodes[s].cluster.min_point() < nodes[b].cluster.min_point())
            }
        };
        if better {
            best = Some(s);
        }
    }
    best.expect("nonempty candidate set")
}

/// Builds the initial partition of a measured space of diameter one. Vertex
/// ids run level by level from the root, in creation order within a level.
pub fn build_initial_partition(
    x: &MeasuredMetricSpace,
    params: &PartitionBuildParams,
) -> Result<(FragmentationMap, WeightedTree), PartitionError> {
    params.validate()?;
    let n = x.len();
    if n < 2 {
        return Err(PartitionError::TooFewPoints);
    }
    let diam = x.space.diameter();
    if diam != 1.0 {
        return Err(PartitionError::NotNormalized(diam));
    }
    let required = minimal_m(params.tau, params.h, x.space.min_distance());
    if params.m < required {
        return Err(PartitionError::MTooSmall { m: params.m, required });
    }
    let depth = params.m * params.h;
    let e = (params.k as f64 - 1.0) / params.k as f64;

    let mut levels: Vec<Vec<LevelNode>> = Vec::with_capacity(depth + 1);
    let leaves: Vec<LevelNode> = (0..n)
        .map(|p| LevelNode {
            cluster: PointSet::singleton(p),
            mass: x.mu[p],
            w_mod: x.mu[p].powf(e),
            children: Vec::new(),
            designated: None,
        })
        .collect();
    let mut cd: Vec<f64> = x.space.as_flat().to_vec();
    levels.push(leaves);

    for i in (1..depth).rev() {
        let cur = levels.last().expect("previous level");
        let c = cur.len();
        let log_thr = params.log_threshold(i);
        let mut remaining: Vec<usize> = (0..c).collect();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut picks = Vec::new();
        while !remaining.is_empty() {
            let t = heaviest(cur, remaining.iter());
            let (group, rest): (Vec<usize>, Vec<usize>) =
                remaining.iter().partition(|&&s| s == t || cd[t * c + s].ln() <= log_thr);
            remaining = rest;
            picks.push(t);
            groups.push(group);
        }
        let g = groups.len();
        let mut next = Vec::with_capacity(g);
        for (group, &t) in groups.iter().zip(&picks) {
            let cluster = PointSet::from_unsorted(group.iter().flat_map(|&s| cur[s].cluster.iter()).collect());
            let mass = x.measure_of(cluster.as_slice());
            let w_mod = if i % params.h == 0 {
                mass.powf(e)
            } else {
                group.iter().map(|&s| cur[s].w_mod).sum()
            };
            next.push(LevelNode { cluster, mass, w_mod, children: group.clone(), designated: Some(t) });
        }
        if g < c {
            let mut rows = vec![f64::INFINITY; g * c];
            for (a, group) in groups.iter().enumerate() {
                for &s in group {
                    for t in 0..c {
                        rows[a * c + t] = rows[a * c + t].min(cd[s * c + t]);
                    }
                }
            }
            let mut merged = vec![0.0; g * g];
            for a in 0..g {
                for (b, group) in groups.iter().enumerate() {
                    if a != b {
                        merged[a * g + b] = group.iter().map(|&t| rows[a * c + t]).fold(f64::INFINITY, f64::min);
                    }
                }
            }
            cd = merged;
        }
        levels.push(next);
    }

    let top = levels.last().expect("level one");
    let all: Vec<usize> = (0..top.len()).collect();
    let root = LevelNode {
        cluster: PointSet::full(n),
        mass: x.total(),
        w_mod: x.total().powf(e),
        designated: Some(heaviest(top, all.iter())),
        children: all,
    };
    levels.push(vec![root]);
    levels.reverse();

    let mut offset = Vec::with_capacity(levels.len());
    let mut total = 0;
    for l in &levels {
        offset.push(total);
        total += l.len();
    }
    let mut parent = vec![None; total];
    let mut clusters = Vec::with_capacity(total);
    let mut w = Vec::with_capacity(total);
    let mut w_mod = Vec::with_capacity(total);
    let mut designated = Vec::with_capacity(total);
    for (d, level) in levels.into_iter().enumerate() {
        for (idx, node) in level.into_iter().enumerate() {
            let id = offset[d] + idx;
            for &c in &node.children {
                parent[offset[d + 1] + c] = Some(id);
            }
            designated.push(node.designated.map(|c| offset[d + 1] + c));
            clusters.push(node.cluster);
            w.push(node.mass);
            w_mod.push(node.w_mod);
        }
    }
    let tree = RootedTree::from_parents(parent).expect("levels form a tree");
    let map = FragmentationMap::new(tree.clone(), clusters).expect("one cluster per vertex");
    let wt = WeightedTree { tree, w, w_mod, designated, h: params.h, k: params.k };
    Ok((map, wt))
}

/// The leaf vertex carrying each point, for a map whose leaves are singletons.
pub fn leaf_of_point(map: &FragmentationMap, n: usize) -> Vec<VertexId> {
    let mut out = vec![usize::MAX; n];
    for v in map.tree().leaves() {
        let p: PointId = map.cluster(v).min_point().expect("leaf clusters are nonempty");
        out[p] = v;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MetricSpace;

    fn two_points() -> MeasuredMetricSpace {
        MeasuredMetricSpace::counting(MetricSpace::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap())
    }

    #[test]
    fn two_point_space_gives_two_chains() {
        let p = PartitionBuildParams { tau: 0.05, m: 2, h: 8, k: 2 };
        let (map, wt) = build_initial_partition(&two_points(), &p).unwrap();
        map.validate(2).unwrap();
        assert_eq!(map.len(), 1 + 2 * 16);
        assert_eq!(map.tree().height(), 16);
        let root = map.tree().root();
        let c = wt.designated[root].unwrap();
        assert_eq!(map.cluster(c).as_slice(), &[0]);
        assert!(map.tree().leaves().iter().all(|&v| map.tree().depth(v) == 16));
    }

    #[test]
    fn tau_and_m_are_checked() {
        let p = PartitionBuildParams { tau: 0.4, m: 2, h: 8, k: 2 };
        assert!(matches!(build_initial_partition(&two_points(), &p), Err(PartitionError::ParamOutOfRange(_))));
        let s = MetricSpace::from_rows(&[
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1e-3],
            vec![1.0, 1e-3, 0.0],
        ])
        .unwrap();
        let x = MeasuredMetricSpace::counting(s);
        let p = PartitionBuildParams { tau: 0.05, m: 2, h: 1, k: 2 };
        assert_eq!(
            build_initial_partition(&x, &p).unwrap_err(),
            PartitionError::MTooSmall { m: 2, required: 4 }
        );
    }

    #[test]
    fn minimal_m_matches_definition() {
        assert_eq!(minimal_m(0.05, 8, 0.06), 2);
        assert_eq!(minimal_m(0.05, 8, 0.05), 3);
        assert_eq!(minimal_m(0.05, 1, 1e-3), 4);
    }

    #[test]
    fn designated_maximizes_modified_weight() {
        // Root with children a (w=4) and b (w=1), each with one leaf.
        let t = RootedTree::from_parents(vec![None, Some(0), Some(0), Some(1), Some(2)]).unwrap();
        let wt = WeightedTree::new(t, vec![5.0, 4.0, 1.0, 4.0, 1.0], 2, 2).unwrap();
        assert_eq!(wt.designated[0], Some(1));
        assert_eq!(wt.w_mod[1], 2.0);
        assert_eq!(wt.w_mod[0], 5f64.sqrt());
    }
}
