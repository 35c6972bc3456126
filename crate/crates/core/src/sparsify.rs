//! Level selection by an iterated Hölder argument, and recursive
//! sparsification of weighted trees.
//!
//! Sparsifying level `i` keeps, below every vertex of depth `i - 1`, only
//! its designated child. [`holder_levels`] finds at least `h - k + 1` levels
//! at which this loses little weight, and [`sparsify_tree`] uses those levels
//! to cut a weighted tree down to a subtree `T'` with marked vertex sets `R`
//! (depths divisible by `h`) and `S` (one pruned level per block of `h`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partition::WeightedTree;
use crate::tree::{RootedTree, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SparsifyError {
    #[error("need h >= k >= 2, got h = {h}, k = {k}")]
    BadParams { h: usize, k: usize },
    #[error("h = {h} is below 2k^2 = {}", 2 * k * k)]
    HTooSmall { h: usize, k: usize },
    #[error("leaf {0} is not at the common leaf depth")]
    UnevenLeaves(VertexId),
    #[error("level {level} fails the leaf-sum inequality on recomputation")]
    HolderCheck { level: usize },
}

/// Relative slack for the post-hoc leaf-sum checks, in the log domain.
pub const LOG_SLACK: f64 = 1e-9;

/// Mask of the vertices kept by sparsifying level `i`: every vertex at
/// depth `i` that is not a designated child loses its whole subtree.
pub fn sparsify_level(tree: &RootedTree, designated: &[Option<VertexId>], i: usize) -> Vec<bool> {
    let mut keep = vec![true; tree.len()];
    for &v in tree.preorder() {
        if let Some(p) = tree.parent(v) {
            if !keep[p] || (tree.depth(v) == i && designated[p] != Some(v)) {
                keep[v] = false;
            }
        }
    }
    keep
}

/// Levels chosen by [`holder_levels`], with the evidence for each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderLevels {
    /// Chosen levels in the order they were picked.
    pub levels: Vec<usize>,
    /// `f_i(root)` for `i = 1..=h`, computed by the recursion.
    pub f_root: Vec<f64>,
    /// Leaf sums of the tree sparsified at each chosen level, recomputed
    /// directly.
    pub leaf_sums: Vec<f64>,
    /// `w(root)^((k-1)/k)`.
    pub target: f64,
}

/// Vertices of the subtree of `r` down to relative depth `h`, in preorder.
fn hat_vertices(tree: &RootedTree, r: VertexId, h: usize) -> Vec<VertexId> {
    let limit = tree.depth(r) + h;
    let mut out = Vec::new();
    let mut stack = vec![r];
    while let Some(v) = stack.pop() {
        out.push(v);
        if tree.depth(v) < limit {
            stack.extend(tree.children(v).iter().rev().copied());
        }
    }
    out
}

/// `f_i(u)` for every vertex of the hat below `r`, by the recursion: leaves
/// take `w^((k-1)/k)`, the vertex at relative depth `i - 1` takes the max
/// over its children and every other vertex the sum.
fn f_values(tree: &RootedTree, w: &[f64], hat: &[VertexId], r: VertexId, h: usize, k: usize, i: usize, f: &mut [f64]) {
    let e = (k as f64 - 1.0) / k as f64;
    let base = tree.depth(r);
    for &u in hat.iter().rev() {
        let rel = tree.depth(u) - base;
        f[u] = if rel == h {
            w[u].powf(e)
        } else {
            let kids = tree.children(u).iter().map(|&c| f[c]);
            if i == rel + 1 {
                kids.fold(f64::NEG_INFINITY, f64::max)
            } else {
                kids.sum()
            }
        };
    }
}

/// Sum of `w^((k-1)/k)` over the depth-`h` vertices of the hat below `r`
/// that survive sparsifying relative level `i`.
fn sparsified_leaf_sum(tree: &RootedTree, w: &[f64], designated: &[Option<VertexId>], r: VertexId, h: usize, k: usize, i: usize) -> f64 {
    hat_leaves_after(tree, designated, r, h, i)
        .iter()
        .map(|&v| w[v].powf((k as f64 - 1.0) / k as f64))
        .sum()
}

/// The depth-`h` vertices of the hat below `r` that survive sparsifying
/// relative level `i`, in preorder.
fn hat_leaves_after(tree: &RootedTree, designated: &[Option<VertexId>], r: VertexId, h: usize, i: usize) -> Vec<VertexId> {
    let base = tree.depth(r);
    let mut out = Vec::new();
    let mut stack = vec![r];
    while let Some(v) = stack.pop() {
        let rel = tree.depth(v) - base;
        if rel == h {
            out.push(v);
            continue;
        }
        for &c in tree.children(v).iter().rev() {
            if rel + 1 != i || designated[v] == Some(c) {
                stack.push(c);
            }
        }
    }
    out
}

fn holder_at(
    tree: &RootedTree,
    w: &[f64],
    designated: &[Option<VertexId>],
    r: VertexId,
    h: usize,
    k: usize,
) -> Result<HolderLevels, SparsifyError> {
    let hat = hat_vertices(tree, r, h);
    let mut scratch = vec![0.0; tree.len()];
    let mut f_root = Vec::with_capacity(h);
    for i in 1..=h {
        f_values(tree, w, &hat, r, h, k, i, &mut scratch);
        f_root.push(scratch[r]);
    }
    let target = w[r].powf((k as f64 - 1.0) / k as f64);
    let mut pool: Vec<usize> = (1..=k).collect();
    let mut levels = Vec::with_capacity(h - k + 1);
    for t in 0..(h - k + 1) {
        let mut best = pool[0];
        for &i in &pool[1..] {
            if f_root[i - 1] > f_root[best - 1] || (f_root[i - 1] == f_root[best - 1] && i < best) {
                best = i;
            }
        }
        levels.push(best);
        pool.retain(|&i| i != best);
        if k + t + 1 <= h {
            pool.push(k + t + 1);
        }
    }
    let mut leaf_sums = Vec::with_capacity(levels.len());
    for &i in &levels {
        let s = sparsified_leaf_sum(tree, w, designated, r, h, k, i);
        if s.ln() < target.ln() - LOG_SLACK {
            return Err(SparsifyError::HolderCheck { level: i });
        }
        leaf_sums.push(s);
    }
    Ok(HolderLevels { levels, f_root, leaf_sums, target })
}

/// Finds `h - k + 1` levels `i` for which sparsifying level `i` keeps leaf
/// sum at least `w(root)^((k-1)/k)`. The tree's leaves must all sit at
/// depth `h`. Each returned level is re-checked against the leaf sum of the
/// sparsified tree.
pub fn holder_levels(wt: &WeightedTree) -> Result<HolderLevels, SparsifyError> {
    let (h, k) = (wt.h, wt.k);
    if k < 2 || h < k {
        return Err(SparsifyError::BadParams { h, k });
    }
    if let Some(v) = wt.tree.leaves().into_iter().find(|&v| wt.tree.depth(v) != h) {
        return Err(SparsifyError::UnevenLeaves(v));
    }
    holder_at(&wt.tree, &wt.w, &wt.designated, wt.tree.root(), h, k)
}

/// `f_i(u)` for every vertex of a tree with all leaves at depth `h`, for
/// one level `i`. Exposed so the product inequality can be checked
/// independently.
pub fn f_level(wt: &WeightedTree, i: usize) -> Vec<f64> {
    let hat = hat_vertices(&wt.tree, wt.tree.root(), wt.h);
    let mut f = vec![0.0; wt.tree.len()];
    f_values(&wt.tree, &wt.w, &hat, wt.tree.root(), wt.h, wt.k, i, &mut f);
    f
}

/// One step of the multi-tree induction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InductionRecord {
    pub roots: Vec<VertexId>,
    /// Root of largest weight.
    pub j0: VertexId,
    /// Level (relative to the roots) that gets sparsified.
    pub s0: usize,
    /// Roots whose level set contains `s0`.
    pub chosen: Vec<VertexId>,
    /// `sum over chosen of w^((1-1/k)^2)`.
    pub double_power_lhs: f64,
    /// `(sum over all roots of w^(1-1/k))^(1-1/k)`.
    pub double_power_rhs: f64,
}

/// Output of [`sparsify_tree`]: masks over the vertices of the input tree.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsifiedTree {
    pub keep: Vec<bool>,
    pub r: Vec<bool>,
    pub s: Vec<bool>,
    pub records: Vec<InductionRecord>,
}

struct Builder<'a> {
    wt: &'a WeightedTree,
    keep: Vec<bool>,
    r: Vec<bool>,
    s: Vec<bool>,
    records: Vec<InductionRecord>,
}

impl Builder<'_> {
    /// Runs the induction on the trees hanging from `roots`, which share a
    /// depth and a height divisible by `h`, and returns the chosen roots.
    fn induct(&mut self, roots: &[VertexId]) -> Result<Vec<VertexId>, SparsifyError> {
        let (tree, w, h, k) = (&self.wt.tree, &self.wt.w, self.wt.h, self.wt.k);
        let t1 = 1.0 - 1.0 / k as f64;
        let t2 = t1 * t1;
        if roots.iter().all(|&r| tree.is_leaf(r)) {
            for &r in roots {
                self.keep[r] = true;
                self.r[r] = true;
            }
            return Ok(roots.to_vec());
        }
        let level_sets = roots
            .iter()
            .map(|&r| holder_at(tree, w, &self.wt.designated, r, h, k).map(|hl| hl.levels))
            .collect::<Result<Vec<_>, _>>()?;
        let mut j0 = 0;
        for j in 1..roots.len() {
            if w[roots[j]] > w[roots[j0]] {
                j0 = j;
            }
        }
        let mut own: Vec<usize> = level_sets[j0].clone();
        own.sort_unstable();
        let s0 = if roots.len() == 1 {
            own[0]
        } else {
            let score = |s: usize| -> f64 {
                (0..roots.len())
                    .filter(|&j| j != j0 && level_sets[j].contains(&s))
                    .map(|j| w[roots[j]].powf(t1))
                    .sum()
            };
            let mut best = own[0];
            let mut best_score = score(best);
            for &s in &own[1..] {
                let sc = score(s);
                if sc > best_score {
                    best = s;
                    best_score = sc;
                }
            }
            best
        };
        let chosen_idx: Vec<usize> = (0..roots.len()).filter(|&j| level_sets[j].contains(&s0)).collect();
        let lhs: f64 = chosen_idx.iter().map(|&j| w[roots[j]].powf(t2)).sum();
        let rhs: f64 = roots.iter().map(|&r| w[r].powf(t1)).sum::<f64>().powf(t1);
        self.records.push(InductionRecord {
            roots: roots.to_vec(),
            j0: roots[j0],
            s0,
            chosen: chosen_idx.iter().map(|&j| roots[j]).collect(),
            double_power_lhs: lhs,
            double_power_rhs: rhs,
        });
        let mut chosen = Vec::with_capacity(chosen_idx.len());
        for j in chosen_idx {
            let rj = roots[j];
            let below = hat_leaves_after(tree, &self.wt.designated, rj, h, s0);
            let picked = self.induct(&below)?;
            let s_depth = tree.depth(rj) + s0;
            for &u in &picked {
                let mut v = u;
                while v != rj {
                    self.keep[v] = true;
                    if tree.depth(v) == s_depth {
                        self.s[v] = true;
                    }
                    v = tree.parent(v).expect("path ends at the root");
                }
            }
            self.keep[rj] = true;
            self.r[rj] = true;
            chosen.push(rj);
        }
        Ok(chosen)
    }
}

/// Extracts the sparsified subtree `T'` with its `R` and `S` sets. Needs
/// `h >= 2k^2` and all leaves at a common depth divisible by `h`.
pub fn sparsify_tree(wt: &WeightedTree) -> Result<SparsifiedTree, SparsifyError> {
    let (h, k) = (wt.h, wt.k);
    if k < 2 || h < k {
        return Err(SparsifyError::BadParams { h, k });
    }
    if h < 2 * k * k {
        return Err(SparsifyError::HTooSmall { h, k });
    }
    let leaves = wt.tree.leaves();
    let depth = wt.tree.depth(leaves[0]);
    if let Some(&v) = leaves.iter().find(|&&v| wt.tree.depth(v) != depth || depth % h != 0) {
        return Err(SparsifyError::UnevenLeaves(v));
    }
    let n = wt.tree.len();
    let mut b = Builder { wt, keep: vec![false; n], r: vec![false; n], s: vec![false; n], records: Vec::new() };
    let root = wt.tree.root();
    b.induct(&[root])?;
    b.s[root] = true;
    Ok(SparsifiedTree { keep: b.keep, r: b.r, s: b.s, records: b.records })
}

/// One instance of the cut inequality at a vertex of `R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerKids {
    pub vertex: VertexId,
    pub lhs: f64,
    pub rhs: f64,
}

/// Result of re-checking every property of a sparsified tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsifyCheck {
    /// `T'` is a subtree containing the root, and `R` and `S` contain the root.
    pub rooted_subtree: bool,
    /// `R` is exactly the kept vertices at depths divisible by `h`.
    pub r_is_h_levels: bool,
    /// Between consecutive `R` levels there is exactly one `S` vertex.
    pub alternation: bool,
    /// `D(u, S)` sits at one relative depth in `[1, 2h]` for every `u`.
    pub same_depth: bool,
    /// Every `S` vertex is designated and has no siblings in `T'`.
    pub sparsified_at_s: bool,
    /// Cut inequality at every non-leaf `R` vertex, with log slack.
    pub power_kids: bool,
    pub double_power: bool,
    /// Whether every kept internal vertex keeps its designated child. The
    /// construction does not force this, so it is reported, not required.
    pub designated_closed: bool,
    pub first_open_vertex: Option<VertexId>,
    pub power_kids_detail: Vec<PowerKids>,
}

impl SparsifyCheck {
    /// All required properties hold.
    pub fn ok(&self) -> bool {
        self.rooted_subtree
            && self.r_is_h_levels
            && self.alternation
            && self.same_depth
            && self.sparsified_at_s
            && self.power_kids
            && self.double_power
    }
}

fn log_ge(lhs: f64, rhs: f64) -> bool {
    lhs.ln() >= rhs.ln() - LOG_SLACK
}

/// Recomputes every property of `sp` from scratch.
pub fn check_sparsified(wt: &WeightedTree, sp: &SparsifiedTree) -> SparsifyCheck {
    let t = &wt.tree;
    let h = wt.h;
    let t2 = (1.0 - 1.0 / wt.k as f64).powi(2);
    let root = t.root();
    let kept_children = |u: VertexId| -> Vec<VertexId> { t.children(u).iter().copied().filter(|&c| sp.keep[c]).collect() };

    let rooted_subtree = sp.keep[root]
        && sp.r[root]
        && sp.s[root]
        && (0..t.len()).all(|v| !sp.keep[v] || t.parent(v).is_none_or(|p| sp.keep[p]))
        && (0..t.len()).all(|v| (!sp.r[v] && !sp.s[v]) || sp.keep[v]);

    let r_is_h_levels = (0..t.len()).all(|v| sp.r[v] == (sp.keep[v] && t.depth(v) % h == 0));

    let mut alternation = true;
    for v in 0..t.len() {
        if sp.r[v] && v != root {
            let mut count = 0;
            let mut x = v;
            for _ in 0..h {
                if sp.s[x] {
                    count += 1;
                }
                x = t.parent(x).expect("R vertex below depth h");
            }
            if count != 1 {
                alternation = false;
            }
        }
    }

    // Depths of D(u, S), gathered bottom-up over kept vertices.
    let mut first_s: Vec<Vec<usize>> = vec![Vec::new(); t.len()];
    let order: Vec<VertexId> = t.postorder().collect();
    for &u in &order {
        if !sp.keep[u] {
            continue;
        }
        let mut depths: Vec<usize> = Vec::new();
        for c in kept_children(u) {
            if sp.s[c] {
                depths.push(t.depth(c));
            } else {
                depths.extend_from_slice(&first_s[c]);
            }
        }
        depths.sort_unstable();
        depths.dedup();
        first_s[u] = depths;
    }
    let same_depth = (0..t.len()).filter(|&u| sp.keep[u]).all(|u| match first_s[u].as_slice() {
        [] => true,
        [d] => (1..=2 * h).contains(&(d - t.depth(u))),
        _ => false,
    });

    let sparsified_at_s = (0..t.len()).filter(|&v| sp.s[v]).all(|v| match t.parent(v) {
        None => true,
        Some(p) => wt.designated[p] == Some(v) && kept_children(p).len() == 1,
    });

    let mut power_kids_detail = Vec::new();
    for u in 0..t.len() {
        if sp.r[u] && !t.is_leaf(u) {
            let below = t.descendants_at_depth(u, t.depth(u) + h);
            let lhs: f64 = below.iter().filter(|&&v| sp.keep[v]).map(|&v| wt.w[v].powf(t2)).sum();
            power_kids_detail.push(PowerKids { vertex: u, lhs, rhs: wt.w[u].powf(t2) });
        }
    }
    let power_kids = power_kids_detail.iter().all(|p| log_ge(p.lhs, p.rhs));
    let double_power = sp.records.iter().all(|r| log_ge(r.double_power_lhs, r.double_power_rhs));

    let first_open_vertex = t
        .preorder()
        .iter()
        .copied()
        .find(|&u| sp.keep[u] && wt.designated[u].is_some_and(|c| !sp.keep[c]));

    SparsifyCheck {
        rooted_subtree,
        r_is_h_levels,
        alternation,
        same_depth,
        sparsified_at_s,
        power_kids,
        double_power,
        designated_closed: first_open_vertex.is_none(),
        first_open_vertex,
        power_kids_detail,
    }
}
