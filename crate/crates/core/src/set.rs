//! Finite index sets over `G` or `Γ`.
//!
//! Both the group and its dual are indexed by the same mixed-radix range
//! `0..|G|`, so a single bitset type serves for subsets of either side.

use fixedbitset::FixedBitSet;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IndexSet {
    bits: FixedBitSet,
}

/// Subset of the dual group (characters).
pub type SpectrumSet = IndexSet;
/// Subset of the group (elements).
pub type ElementSet = IndexSet;

impl IndexSet {
    pub fn empty(universe: usize) -> Self {
        Self { bits: FixedBitSet::with_capacity(universe) }
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        Self { bits }
    }

    /// Indices outside `0..universe` are ignored.
    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, indices: I) -> Self {
        let mut s = Self::empty(universe);
        for i in indices {
            if i < universe {
                s.bits.insert(i);
            }
        }
        s
    }

    pub fn from_predicate<F: FnMut(usize) -> bool>(universe: usize, mut pred: F) -> Self {
        let mut s = Self::empty(universe);
        for i in 0..universe {
            if pred(i) {
                s.bits.insert(i);
            }
        }
        s
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.bits.insert(i);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.bits.set(i, false);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union_with(&mut self, other: &Self) {
        self.bits.union_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &Self) {
        self.bits.intersect_with(&other.bits);
    }

    pub fn difference_with(&mut self, other: &Self) {
        self.bits.difference_with(&other.bits);
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.bits.symmetric_difference_with(&other.bits);
        s
    }

    pub fn complement(&self) -> Self {
        let mut s = self.clone();
        s.bits.toggle_range(..);
        s
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        !self.is_disjoint(other)
    }

    pub fn first(&self) -> Option<usize> {
        self.bits.minimum()
    }

    pub fn last(&self) -> Option<usize> {
        self.bits.maximum()
    }
}

impl std::fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = IndexSet::from_indices(10, [1, 2, 3]);
        let b = IndexSet::from_indices(10, [3, 4, 42]);
        assert_eq!(a.union(&b).to_vec(), vec![1, 2, 3, 4]);
        assert_eq!(a.intersection(&b).to_vec(), vec![3]);
        assert_eq!(a.difference(&b).to_vec(), vec![1, 2]);
        assert_eq!(a.symmetric_difference(&b).to_vec(), vec![1, 2, 4]);
        assert_eq!(a.complement().len(), 7);
        assert!(IndexSet::from_indices(10, [2]).is_subset(&a));
        assert!(a.intersects(&b));
        assert!(IndexSet::empty(10).is_empty());
        assert_eq!(IndexSet::full(10).len(), 10);
    }
}
