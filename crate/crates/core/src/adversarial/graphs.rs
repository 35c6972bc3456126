use std::collections::VecDeque;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AdversarialError, LevelSpec, ProductTreeSpec};
use crate::metric::MetricSpace;
use crate::pointset::PointSet;

/// Resampling budget for [`expander_fractal_level`].
pub const EXPANDER_MAX_ATTEMPTS: usize = 50;
/// Largest space [`largest_cluster_subset`] searches exhaustively.
pub const MAX_CLUSTER_SEARCH: usize = 30;

const DEGREE: usize = 4;

/// Spectral acceptance bound: `2 sqrt(d - 1)` with 5% room.
fn spectral_bound() -> f64 {
    2.0 * ((DEGREE - 1) as f64).sqrt() * 1.05
}

/// A sampled expander level.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpanderLevel {
    pub n: usize,
    pub alpha: f64,
    pub seed: u64,
    pub edges: Vec<(usize, usize)>,
    /// Largest modulus among the nontrivial adjacency eigenvalues.
    pub lambda: f64,
    pub attempts: usize,
    /// Hop diameter of the graph.
    pub hops: usize,
    /// Shortest-path metric divided by the hop diameter.
    pub dist: Vec<f64>,
    pub spec: ProductTreeSpec,
}

impl ExpanderLevel {
    pub fn space(&self) -> MetricSpace {
        MetricSpace::from_flat_unchecked(self.n, self.dist.clone())
    }
}

/// Restarts of the stub pairing inside one sample.
const PAIRING_RESTARTS: usize = 100;

/// Random 4-regular simple graph: stubs are paired one at a time, each with
/// a uniform partner among those that create neither a loop nor a repeated
/// edge. A dead end restarts the pairing.
fn pair_stubs(n: usize, rng: &mut ChaCha8Rng) -> Option<Vec<(usize, usize)>> {
    'restart: for _ in 0..PAIRING_RESTARTS {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, DEGREE)).collect();
        stubs.shuffle(rng);
        let mut adj = vec![vec![false; n]; n];
        let mut edges = Vec::with_capacity(n * DEGREE / 2);
        while let Some(a) = stubs.pop() {
            let ok: Vec<usize> = (0..stubs.len()).filter(|&i| stubs[i] != a && !adj[a][stubs[i]]).collect();
            let Some(&i) = ok.choose(rng) else { continue 'restart };
            let b = stubs.swap_remove(i);
            adj[a][b] = true;
            adj[b][a] = true;
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        return Some(edges);
    }
    None
}

fn hop_distances(n: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut out = vec![usize::MAX; n * n];
    for s in 0..n {
        let row = &mut out[s * n..(s + 1) * n];
        row[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if row[w] == usize::MAX {
                    row[w] = row[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    out.iter().all(|&d| d != usize::MAX).then_some(out)
}

/// Largest modulus of the adjacency eigenvalues other than the degree.
fn second_eigenvalue(n: usize, edges: &[(usize, usize)]) -> f64 {
    let mut a = DMatrix::<f64>::zeros(n, n);
    for &(u, v) in edges {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev[1..].iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Samples a connected 4-regular graph on `n` vertices whose nontrivial
/// eigenvalues stay within `2 sqrt(3) * 1.05`, and returns its normalized
/// shortest-path metric as a constant level of a tree of metrics.
///
/// The level is admissible when `n^(1/alpha)` exceeds the hop diameter.
/// Every such graph has hop diameter at least 2 unless it is `K_5`, so the
/// obvious failures are reported before sampling.
pub fn expander_fractal_level(alpha: f64, n: usize, seed: u64) -> Result<ExpanderLevel, AdversarialError> {
    let growth = (n as f64).powf(1.0 / alpha);
    let floor = if n == DEGREE + 1 { 1.0 } else { 2.0 };
    if growth <= floor {
        return Err(AdversarialError::AdmissibilityFailure { growth, diameter: floor });
    }
    if n <= DEGREE {
        return Err(AdversarialError::InvalidOrder(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=EXPANDER_MAX_ATTEMPTS {
        let Some(edges) = pair_stubs(n, &mut rng) else { continue };
        let Some(hops) = hop_distances(n, &edges) else { continue };
        let lambda = second_eigenvalue(n, &edges);
        if lambda > spectral_bound() {
            continue;
        }
        let diam = *hops.iter().max().expect("nonempty");
        if growth <= diam as f64 {
            return Err(AdversarialError::AdmissibilityFailure { growth, diameter: diam as f64 });
        }
        let dist: Vec<f64> = hops.iter().map(|&h| h as f64 / diam as f64).collect();
        let level = LevelSpec { n, dist: dist.clone() };
        return Ok(ExpanderLevel {
            n,
            alpha,
            seed,
            edges,
            lambda,
            attempts: attempt,
            hops: diam,
            dist,
            spec: ProductTreeSpec::constant(alpha, level, 1),
        });
    }
    Err(AdversarialError::ExpanderSamplingTimeout(EXPANDER_MAX_ATTEMPTS))
}

/// `G(n, 1/2)` with edges at distance 1 and non-edges at distance 2. Pairs
/// are drawn in lexicographic order from a ChaCha8 stream.
pub fn gnhalf_fractal_level(n: usize, seed: u64) -> Result<MetricSpace, AdversarialError> {
    if n < 3 {
        return Err(AdversarialError::InvalidOrder(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dist = vec![0.0; n * n];
    for a in 0..n {
        for b in (a + 1)..n {
            let v = if rng.gen_bool(0.5) { 1.0 } else { 2.0 };
            dist[a * n + b] = v;
            dist[b * n + a] = v;
        }
    }
    Ok(MetricSpace::from_flat(n, dist)?)
}

struct ClusterSearch<'a> {
    n: usize,
    adj: &'a [u32],
    best: u32,
}

impl ClusterSearch<'_> {
    /// `cliques` holds the cliques of the chosen set as bitmasks.
    fn go(&mut self, v: usize, cliques: &mut Vec<u32>, chosen: u32) {
        if chosen.count_ones() + (self.n - v) as u32 <= self.best.count_ones() {
            return;
        }
        if v == self.n {
            self.best = chosen;
            return;
        }
        let nb = self.adj[v] & chosen;
        if nb == 0 {
            cliques.push(1 << v);
            self.go(v + 1, cliques, chosen | (1 << v));
            cliques.pop();
        } else if let Some(i) = cliques.iter().position(|&c| c == nb) {
            cliques[i] |= 1 << v;
            self.go(v + 1, cliques, chosen | (1 << v));
            cliques[i] &= !(1 << v);
        }
        self.go(v + 1, cliques, chosen);
    }
}

/// Largest subset of a `{1, 2}`-valued space whose distance-1 graph is a
/// disjoint union of cliques. In such a space these are exactly the subsets
/// with ultrametric distortion below 2.
pub fn largest_cluster_subset(space: &MetricSpace) -> Result<PointSet, AdversarialError> {
    let n = space.len();
    if n > MAX_CLUSTER_SEARCH {
        return Err(AdversarialError::TooLarge { size: n, limit: MAX_CLUSTER_SEARCH });
    }
    let mut adj = vec![0u32; n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            match space.d(a, b) {
                1.0 => adj[a] |= 1 << b,
                2.0 => {}
                _ => return Err(AdversarialError::NotTwoValued),
            }
        }
    }
    let mut search = ClusterSearch { n, adj: &adj, best: 0 };
    search.go(0, &mut Vec::new(), 0);
    Ok((0..n).filter(|&i| search.best & (1 << i) != 0).collect())
}
