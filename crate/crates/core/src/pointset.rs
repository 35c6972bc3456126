//! Sorted point sets.

use serde::{Deserialize, Serialize};

use crate::metric::PointId;

/// A finite set of point ids kept sorted and free of duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointSet(Vec<PointId>);

impl PointSet {
    pub fn new() -> Self {
        PointSet(Vec::new())
    }

    pub fn singleton(p: PointId) -> Self {
        PointSet(vec![p])
    }

    /// Builds a set from arbitrary ids, sorting and deduplicating them.
    pub fn from_unsorted(mut ids: Vec<PointId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        PointSet(ids)
    }

    /// The full set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        PointSet((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[PointId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = PointId> + '_ {
        self.0.iter().copied()
    }

    pub fn min_point(&self) -> Option<PointId> {
        self.0.first().copied()
    }

    pub fn contains(&self, p: PointId) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        PointSet(out)
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        PointSet(self.0.iter().copied().filter(|p| !other.contains(*p)).collect())
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.0.iter().all(|p| other.contains(*p))
    }

    /// First common element, if any.
    pub fn common_element(&self, other: &PointSet) -> Option<PointId> {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Some(a[i]),
            }
        }
        None
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.common_element(other).is_none()
    }

    pub fn into_vec(self) -> Vec<PointId> {
        self.0
    }
}

impl FromIterator<PointId> for PointSet {
    fn from_iter<I: IntoIterator<Item = PointId>>(iter: I) -> Self {
        PointSet::from_unsorted(iter.into_iter().collect())
    }
}

impl From<Vec<PointId>> for PointSet {
    fn from(v: Vec<PointId>) -> Self {
        PointSet::from_unsorted(v)
    }
}
