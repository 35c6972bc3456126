//! Ultrametrics on subsets of a metric space, with dendrogram and Newick
//! export.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::PointId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UltrametricError {
    #[error("matrix has {got} entries for {points} points")]
    Shape { got: usize, points: usize },
    #[error("entry ({0}, {1}) is not a valid distance")]
    BadEntry(usize, usize),
    #[error("strong triangle inequality fails on ({0}, {1}, {2})")]
    NotUltrametric(usize, usize, usize),
    #[error("merge list does not describe a binary dendrogram: {0}")]
    BadMerges(String),
}

/// An ultrametric on a list of points of some ambient space. Entries are
/// indexed by position in `points`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ultrametric {
    points: Vec<PointId>,
    rho: Vec<f64>,
}

/// One agglomeration step, numbered like scipy linkage matrices: ids below
/// the point count are leaves, id `n + i` is the cluster made by merge `i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

impl Ultrametric {
    /// Validates symmetry, positivity and the strong triangle inequality.
    pub fn new(points: Vec<PointId>, rho: Vec<f64>) -> Result<Self, UltrametricError> {
        let u = Self::new_unchecked(points, rho)?;
        let n = u.len();
        for i in 0..n {
            for j in 0..n {
                let v = u.get(i, j);
                let ok = v.is_finite() && v == u.get(j, i) && if i == j { v == 0.0 } else { v > 0.0 };
                if !ok {
                    return Err(UltrametricError::BadEntry(i, j));
                }
            }
        }
        if let Some((a, b, c)) = u.strong_triangle_witness() {
            return Err(UltrametricError::NotUltrametric(a, b, c));
        }
        Ok(u)
    }

    /// Checks only the shape of the matrix.
    pub fn new_unchecked(points: Vec<PointId>, rho: Vec<f64>) -> Result<Self, UltrametricError> {
        if rho.len() != points.len() * points.len() {
            return Err(UltrametricError::Shape { got: rho.len(), points: points.len() });
        }
        Ok(Ultrametric { points, rho })
    }

    /// Builds the matrix from a function of local indices.
    pub fn from_fn(points: Vec<PointId>, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let n = points.len();
        let mut rho = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                rho[i * n + j] = v;
                rho[j * n + i] = v;
            }
        }
        Ultrametric { points, rho }
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rho[i * self.points.len() + j]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.rho
    }

    /// Multiplies every entry by `c`.
    pub fn scaled(&self, c: f64) -> Ultrametric {
        Ultrametric { points: self.points.clone(), rho: self.rho.iter().map(|v| v * c).collect() }
    }

    /// A triple with `rho(a, b) > max(rho(a, c), rho(c, b))`, if any.
    pub fn strong_triangle_witness(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for a in 0..n {
            for b in (a + 1)..n {
                for c in 0..n {
                    if c != a && c != b && self.get(a, b) > self.get(a, c).max(self.get(c, b)) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// Single-linkage merge sequence. For an ultrametric this reproduces it
    /// exactly: `rho(x, y)` is the height at which x and y first join.
    pub fn merges(&self) -> Vec<Merge> {
        let n = self.len();
        let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        pairs.sort_by(|a, b| self.get(a.0, a.1).total_cmp(&self.get(b.0, b.1)).then(a.cmp(b)));
        let mut uf = UnionFind::new(n);
        let mut cluster_id: Vec<usize> = (0..n).collect();
        let mut out = Vec::with_capacity(n.saturating_sub(1));
        for (i, j) in pairs {
            let (ri, rj) = (uf.find(i), uf.find(j));
            if ri == rj {
                continue;
            }
            let (l, r) = (cluster_id[ri].min(cluster_id[rj]), cluster_id[ri].max(cluster_id[rj]));
            out.push(Merge { left: l, right: r, height: self.get(i, j) });
            uf.parent[rj] = ri;
            cluster_id[ri] = n + out.len() - 1;
        }
        out
    }

    /// Rebuilds the ultrametric encoded by a merge list.
    pub fn from_merges(points: Vec<PointId>, merges: &[Merge]) -> Result<Self, UltrametricError> {
        let n = points.len();
        if merges.len() != n.saturating_sub(1) {
            return Err(UltrametricError::BadMerges(format!("{} merges for {} points", merges.len(), n)));
        }
        let mut members: Vec<Option<Vec<usize>>> = (0..n).map(|i| Some(vec![i])).collect();
        let mut rho = vec![0.0; n * n];
        for (k, m) in merges.iter().enumerate() {
            let take = |members: &mut Vec<Option<Vec<usize>>>, id: usize| {
                members
                    .get_mut(id)
                    .and_then(Option::take)
                    .ok_or_else(|| UltrametricError::BadMerges(format!("merge {k} uses unknown or spent cluster {id}")))
            };
            let a = take(&mut members, m.left)?;
            let b = take(&mut members, m.right)?;
            for &x in &a {
                for &y in &b {
                    rho[x * n + y] = m.height;
                    rho[y * n + x] = m.height;
                }
            }
            let mut joined = a;
            joined.extend(b);
            members.push(Some(joined));
        }
        Ultrametric::new(points, rho)
    }

    /// Newick string with branch lengths equal to half the ultrametric
    /// levels, so that leaf-to-leaf path length equals `rho`.
    pub fn to_newick(&self, label: impl Fn(PointId) -> String) -> String {
        let n = self.len();
        if n == 0 {
            return ";".into();
        }
        let merges = self.merges();
        let mut height = vec![0.0; n + merges.len()];
        let mut text: Vec<String> = self.points.iter().map(|&p| label(p)).collect();
        for (k, m) in merges.iter().enumerate() {
            let h = m.height / 2.0;
            let s = format!(
                "({}:{},{}:{})",
                text[m.left],
                h - height[m.left],
                text[m.right],
                h - height[m.right]
            );
            height[n + k] = h;
            text.push(s);
        }
        format!("{};", text.last().expect("nonempty"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Ultrametric {
        Ultrametric::new(
            vec![10, 11, 12],
            vec![0.0, 1.0, 4.0, 1.0, 0.0, 4.0, 4.0, 4.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn merges_round_trip() {
        let u = sample();
        let m = u.merges();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0], Merge { left: 0, right: 1, height: 1.0 });
        assert_eq!(m[1], Merge { left: 2, right: 3, height: 4.0 });
        assert_eq!(Ultrametric::from_merges(vec![10, 11, 12], &m).unwrap(), u);
    }

    #[test]
    fn newick_branch_lengths_are_half_levels() {
        assert_eq!(sample().to_newick(|p| format!("p{p}")), "(p12:2,(p10:0.5,p11:0.5):1.5);");
    }

    #[test]
    fn rejects_non_ultrametric() {
        let r = Ultrametric::new(vec![0, 1, 2], vec![0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0]);
        assert_eq!(r.unwrap_err(), UltrametricError::NotUltrametric(0, 2, 1));
    }
}
