//! Weights carried from the `R` levels to the `S` vertices.
//!
//! `w_R` starts at `mu(X)^t` on the root and splits each value among the
//! next `R` level in proportion to `mu(F_v)^t`, where `t = (1 - 1/k)^2`.
//! `w_S(u)` adds up `w_R` over the first `R` vertices at or below `u`.

use serde::{Deserialize, Serialize};

use crate::metric::MeasuredMetricSpace;
use crate::tree::{FragmentationMap, VertexId};

/// Relative tolerance for the identities between weight sums.
pub const WEIGHT_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineWeights {
    /// `w_R` on `R` vertices, 0 elsewhere.
    pub w_r: Vec<f64>,
    /// `w_S` on `S` vertices, 0 elsewhere.
    pub w_s: Vec<f64>,
}

/// Re-checked properties of the weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightReport {
    /// `w_R(root) = mu(X)^t`.
    pub root_ok: bool,
    /// Largest relative gap between `w_R(u)` and its sum over the next `R` level.
    pub conservation_residual: f64,
    /// `w_R(u) <= mu(F_u)^t` everywhere.
    pub upper_ok: bool,
    /// `w_S(u) <= mu(F_p(u))^t`, with `p` the parent in the tree on `S`.
    pub parent_bound_ok: bool,
    /// Largest relative gap between `w_S(u)` and its sum over the `S` children.
    pub s_residual: f64,
}

impl WeightReport {
    pub fn ok(&self) -> bool {
        self.root_ok
            && self.upper_ok
            && self.parent_bound_ok
            && self.conservation_residual <= WEIGHT_SLACK
            && self.s_residual <= WEIGHT_SLACK
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Computes `w_R` and `w_S` on the intermediate map with the given `R` and
/// `S` masks.
pub fn pipeline_weights(
    x: &MeasuredMetricSpace,
    map: &FragmentationMap,
    r: &[bool],
    s: &[bool],
    t: f64,
) -> PipelineWeights {
    let tree = map.tree();
    let mass: Vec<f64> = (0..map.len()).map(|v| x.measure_of(map.cluster(v).as_slice()).powf(t)).collect();
    let mut w_r = vec![0.0; map.len()];
    w_r[tree.root()] = x.total().powf(t);
    for &u in tree.preorder() {
        if !r[u] || tree.is_leaf(u) {
            continue;
        }
        let next = tree.first_descendants_in(u, r);
        let denom: f64 = next.iter().map(|&v| mass[v]).sum();
        for v in next {
            w_r[v] = w_r[u] / denom * mass[v];
        }
    }
    let w_s = (0..map.len())
        .map(|u| if s[u] { tree.first_descendants_in_star(u, r).iter().map(|&z| w_r[z]).sum() } else { 0.0 })
        .collect();
    PipelineWeights { w_r, w_s }
}

/// Re-checks the weight identities. `s_parent[u]` is the nearest strict
/// ancestor of `u` in `S`, or `u` itself for the root.
pub fn check_weights(
    x: &MeasuredMetricSpace,
    map: &FragmentationMap,
    r: &[bool],
    s: &[bool],
    t: f64,
    w: &PipelineWeights,
) -> WeightReport {
    let tree = map.tree();
    let mass: Vec<f64> = (0..map.len()).map(|v| x.measure_of(map.cluster(v).as_slice()).powf(t)).collect();
    let root = tree.root();
    let root_ok = rel_gap(w.w_r[root], x.total().powf(t)) <= WEIGHT_SLACK;
    let mut conservation_residual = 0.0f64;
    let mut upper_ok = true;
    let mut parent_bound_ok = true;
    let mut s_residual = 0.0f64;
    for u in 0..map.len() {
        if r[u] {
            upper_ok &= w.w_r[u] <= mass[u] * (1.0 + WEIGHT_SLACK);
            if !tree.is_leaf(u) {
                let sum: f64 = tree.first_descendants_in(u, r).iter().map(|&v| w.w_r[v]).sum();
                conservation_residual = conservation_residual.max(rel_gap(sum, w.w_r[u]));
            }
        }
        if s[u] {
            let p = nearest_s_ancestor(map, s, u);
            parent_bound_ok &= w.w_s[u] <= mass[p] * (1.0 + WEIGHT_SLACK);
            let kids = tree.first_descendants_in(u, s);
            if !kids.is_empty() {
                let sum: f64 = kids.iter().map(|&v| w.w_s[v]).sum();
                s_residual = s_residual.max(rel_gap(sum, w.w_s[u]));
            }
        }
    }
    WeightReport { root_ok, conservation_residual, upper_ok, parent_bound_ok, s_residual }
}

fn nearest_s_ancestor(map: &FragmentationMap, s: &[bool], u: VertexId) -> VertexId {
    map.tree().ancestors(u).find(|&a| s[a]).unwrap_or(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MetricSpace;
    use crate::pointset::PointSet;
    use crate::tree::RootedTree;

    #[test]
    fn proportional_split_conserves_weight() {
        let s = MetricSpace::from_rows(&[
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let x = MeasuredMetricSpace::new(s, vec![1.0, 2.0, 3.0]).unwrap();
        // root -> {0,1} -> {0},{1} ; root -> {2} -> {2}
        let t = RootedTree::from_parents(vec![None, Some(0), Some(0), Some(1), Some(1), Some(2)]).unwrap();
        let clusters = vec![
            PointSet::full(3),
            PointSet::from(vec![0, 1]),
            PointSet::singleton(2),
            PointSet::singleton(0),
            PointSet::singleton(1),
            PointSet::singleton(2),
        ];
        let map = FragmentationMap::new(t, clusters).unwrap();
        let r = vec![true, false, false, true, true, true];
        let s = vec![true, true, true, false, false, false];
        let w = pipeline_weights(&x, &map, &r, &s, 0.5);
        assert!((w.w_r[0] - 6f64.sqrt()).abs() < 1e-12);
        assert!((w.w_s[1] + w.w_s[2] - w.w_s[0]).abs() < 1e-12);
        assert!(check_weights(&x, &map, &r, &s, 0.5, &w).ok());
    }
}
