use super::{RootedTree, TreeError, VertexId};

/// Trees larger than this are refused by [`enumerate_cutsets`].
pub const MAX_ENUMERATION_VERTICES: usize = 20;

/// Minimum of `sum cost(v)^theta` over minimal cut-sets, by the recursion
/// `m(u) = min(cost(u)^theta, sum of m over children)` with leaves taking
/// `cost^theta`.
pub fn min_cutset_cost(tree: &RootedTree, cost: &[f64], theta: f64) -> f64 {
    assert_eq!(cost.len(), tree.len(), "one cost per vertex");
    let mut m = vec![0.0; tree.len()];
    let order: Vec<VertexId> = tree.postorder().collect();
    for u in order {
        let own = cost[u].powf(theta);
        m[u] = if tree.is_leaf(u) {
            own
        } else {
            own.min(tree.children(u).iter().map(|&c| m[c]).sum())
        };
    }
    m[tree.root()]
}

/// Every minimal cut-set, each sorted. A minimal cut-set of the subtree at
/// `u` is either `{u}` or the union of one minimal cut-set per child.
pub fn enumerate_cutsets(tree: &RootedTree) -> Result<Vec<Vec<VertexId>>, TreeError> {
    if tree.len() > MAX_ENUMERATION_VERTICES {
        return Err(TreeError::TooLarge(tree.len(), MAX_ENUMERATION_VERTICES));
    }
    let mut sets: Vec<Vec<Vec<VertexId>>> = vec![Vec::new(); tree.len()];
    let order: Vec<VertexId> = tree.postorder().collect();
    for u in order {
        let mut here = vec![vec![u]];
        if !tree.is_leaf(u) {
            let mut combos: Vec<Vec<VertexId>> = vec![Vec::new()];
            for &c in tree.children(u) {
                let mut next = Vec::with_capacity(combos.len() * sets[c].len());
                for a in &combos {
                    for b in &sets[c] {
                        let mut s = a.clone();
                        s.extend_from_slice(b);
                        next.push(s);
                    }
                }
                combos = next;
            }
            here.extend(combos);
        }
        sets[u] = here;
    }
    let mut out = std::mem::take(&mut sets[tree.root()]);
    for s in &mut out {
        s.sort_unstable();
    }
    Ok(out)
}

/// Checks the definition directly: the set meets every root-to-leaf path
/// and no element can be dropped.
pub fn is_minimal_cutset(tree: &RootedTree, set: &[VertexId]) -> bool {
    let covers = |s: &[VertexId]| {
        tree.leaves()
            .into_iter()
            .all(|leaf| s.iter().any(|&v| tree.is_ancestor(v, leaf)))
    };
    if !covers(set) {
        return false;
    }
    (0..set.len()).all(|i| {
        let rest: Vec<VertexId> = set.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
        !covers(&rest)
    })
}
