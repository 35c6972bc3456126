//! Metric composition: at every vertex, keep a subset of the children on
//! which the child metric `d_u(x, y) = diam(bd F_x u bd F_y)` is close to an
//! ultrametric, then stitch the per-vertex ultrametrics into one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SkeletonError;
use crate::metric::{MetricSpace, PointId};
use crate::ramsey::{dvoretzky_subset, theta_of_distortion};
use crate::tree::{FragmentationMap, VertexId};
use crate::ultrametric::Ultrametric;

/// Relative slack for the subadditivity precondition, whose two sides are
/// sums accumulated in different orders.
const SUBADDITIVE_SLACK: f64 = 1e-9;

/// What the composition did at one vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositionStep {
    /// Vertex of the input tree.
    pub vertex: VertexId,
    pub children: usize,
    pub kept: usize,
    /// `sum over kept children of w^theta`.
    pub lhs: f64,
    /// `w(u)^theta`.
    pub rhs: f64,
}

/// Result of [`metric_composition`].
#[derive(Clone, Debug)]
pub struct Composition {
    /// Kept vertices of the input tree.
    pub keep: Vec<bool>,
    /// The input map restricted to the kept vertices.
    pub map: FragmentationMap,
    /// New vertex id to input vertex id.
    pub old: Vec<VertexId>,
    /// Ultrametric on the boundary of the root of `map`.
    pub ultrametric: Ultrametric,
    pub theta: f64,
    /// Steps at kept internal vertices, in preorder.
    pub steps: Vec<CompositionStep>,
}

struct Local {
    kept: Vec<VertexId>,
    rho: Vec<f64>,
}

fn boundary_diameters(space: &MetricSpace, map: &FragmentationMap) -> Vec<f64> {
    (0..map.len()).map(|v| space.diam_of(map.boundary(v).as_slice())).collect()
}

/// Child metric on the children of `u`, row-major.
fn child_metric(space: &MetricSpace, map: &FragmentationMap, diam: &[f64], kids: &[VertexId]) -> Vec<f64> {
    let c = kids.len();
    let mut out = vec![0.0; c * c];
    for i in 0..c {
        for j in (i + 1)..c {
            let mut v = diam[kids[i]].max(diam[kids[j]]);
            for p in map.boundary(kids[i]).iter() {
                let row = space.row(p);
                for q in map.boundary(kids[j]).iter() {
                    v = v.max(row[q]);
                }
            }
            out[i * c + j] = v;
            out[j * c + i] = v;
        }
    }
    out
}

fn compose_at(
    space: &MetricSpace,
    map: &FragmentationMap,
    diam: &[f64],
    w: &[f64],
    d_prime: f64,
    u: VertexId,
) -> Result<Local, SkeletonError> {
    let kids = map.tree().children(u);
    if kids.len() == 1 {
        return Ok(Local { kept: kids.to_vec(), rho: vec![0.0] });
    }
    let dbar = child_metric(space, map, diam, kids);
    let c = kids.len();
    let child_space = MetricSpace::from_flat_unchecked(c, dbar);
    let weights: Vec<f64> = kids.iter().map(|&v| w[v]).collect();
    let out = dvoretzky_subset(&child_space, &weights, d_prime)?;
    let idx = out.ultrametric.points();
    let kept: Vec<VertexId> = idx.iter().map(|&i| kids[i]).collect();
    let mut cap = 0.0f64;
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            cap = cap.max(child_space.d(i, j));
        }
    }
    let m = idx.len();
    let rho = (0..m * m).map(|e| out.ultrametric.as_flat()[e].min(cap)).collect();
    Ok(Local { kept, rho })
}

/// Prunes a `beta`-separated map with subadditive weights so that its
/// boundary embeds into an ultrametric with distortion `D' (1 + 2/beta)`,
/// while every kept internal vertex `u` keeps
/// `sum over kept children of w^theta(D') >= w(u)^theta(D')`.
pub fn metric_composition(
    space: &MetricSpace,
    map: &FragmentationMap,
    w: &[f64],
    beta: f64,
    d_prime: f64,
) -> Result<Composition, SkeletonError> {
    let tree = map.tree();
    let all: Vec<VertexId> = (0..map.len()).collect();
    map.check_separated(space, beta, all.iter().copied()).map_err(SkeletonError::NotSeparated)?;
    for &u in &all {
        if !tree.is_leaf(u) {
            let sum: f64 = tree.children(u).iter().map(|&c| w[c]).sum();
            if w[u] > sum * (1.0 + SUBADDITIVE_SLACK) {
                return Err(SkeletonError::NotSubadditive(u));
            }
        }
    }
    let theta = theta_of_distortion(d_prime)?;
    let diam = boundary_diameters(space, map);

    // Decide top-down which vertices survive, composing level by level.
    let mut keep = vec![false; map.len()];
    keep[tree.root()] = true;
    let mut local: Vec<Option<Local>> = (0..map.len()).map(|_| None).collect();
    let mut frontier = vec![tree.root()];
    while !frontier.is_empty() {
        let internal: Vec<VertexId> = frontier.iter().copied().filter(|&u| !tree.is_leaf(u)).collect();
        let results: Vec<Result<Local, SkeletonError>> =
            internal.par_iter().map(|&u| compose_at(space, map, &diam, w, d_prime, u)).collect();
        let mut next = Vec::new();
        for (&u, res) in internal.iter().zip(results) {
            let l = res?;
            for &v in &l.kept {
                keep[v] = true;
                next.push(v);
            }
            local[u] = Some(l);
        }
        frontier = next;
    }

    let (g, old) = map.restrict(&keep);
    let points: Vec<PointId> = g.boundary(g.tree().root()).as_slice().to_vec();
    let mut index = vec![usize::MAX; space.len()];
    for (i, &p) in points.iter().enumerate() {
        index[p] = i;
    }
    let m = points.len();
    let mut rho = vec![0.0; m * m];
    let mut steps = Vec::new();
    for &u in g.tree().preorder() {
        let kids = g.tree().children(u);
        if kids.is_empty() {
            continue;
        }
        let l = local[old[u]].as_ref().expect("kept internal vertices were composed");
        let pos = |v: VertexId| l.kept.iter().position(|&x| x == old[v]).expect("kept child");
        let k = l.kept.len();
        for (a, &x) in kids.iter().enumerate() {
            for &y in &kids[a + 1..] {
                let value = l.rho[pos(x) * k + pos(y)];
                for p in g.boundary(x).iter() {
                    for q in g.boundary(y).iter() {
                        rho[index[p] * m + index[q]] = value;
                        rho[index[q] * m + index[p]] = value;
                    }
                }
            }
        }
        steps.push(CompositionStep {
            vertex: old[u],
            children: tree.children(old[u]).len(),
            kept: k,
            lhs: l.kept.iter().map(|&v| w[v].powf(theta)).sum(),
            rhs: w[old[u]].powf(theta),
        });
    }
    let ultrametric = Ultrametric::new_unchecked(points, rho).expect("square matrix");
    Ok(Composition { keep, map: g, old, ultrametric, theta, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointset::PointSet;
    use crate::tree::RootedTree;

    #[test]
    fn two_singletons_are_both_kept() {
        let s = MetricSpace::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let t = RootedTree::from_parents(vec![None, Some(0), Some(0)]).unwrap();
        let map = FragmentationMap::new(t, vec![PointSet::full(2), PointSet::singleton(0), PointSet::singleton(1)])
            .unwrap();
        let out = metric_composition(&s, &map, &[2.0, 1.0, 1.0], 5.0, 3.0).unwrap();
        assert_eq!(out.map.len(), 3);
        assert_eq!(out.ultrametric.get(0, 1), 1.0);
        assert!(out.steps[0].lhs >= out.steps[0].rhs);
    }

    #[test]
    fn rejects_weights_that_grow() {
        let s = MetricSpace::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let t = RootedTree::from_parents(vec![None, Some(0), Some(0)]).unwrap();
        let map = FragmentationMap::new(t, vec![PointSet::full(2), PointSet::singleton(0), PointSet::singleton(1)])
            .unwrap();
        assert!(matches!(
            metric_composition(&s, &map, &[3.0, 1.0, 1.0], 5.0, 3.0),
            Err(SkeletonError::NotSubadditive(0))
        ));
    }

    #[test]
    fn chain_keeps_everything() {
        let s = MetricSpace::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        // root -> a -> {0}, {1}
        let t = RootedTree::from_parents(vec![None, Some(0), Some(1), Some(1)]).unwrap();
        let clusters = vec![PointSet::full(2), PointSet::full(2), PointSet::singleton(0), PointSet::singleton(1)];
        let map = FragmentationMap::new(t, clusters).unwrap();
        let out = metric_composition(&s, &map, &[2.0, 2.0, 1.0, 1.0], 5.0, 3.0).unwrap();
        assert!(out.keep.iter().all(|&k| k));
    }
}
