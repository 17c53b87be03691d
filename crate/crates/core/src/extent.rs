//! Fixed-width bit vectors over object positions.

use std::fmt;

const WORD: usize = 64;

/// A set of objects, stored as one bit per object position.
///
/// Two extents are only comparable when they were built over the same
/// universe (the object count of one dataset).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Extent {
    universe: u32,
    words: Box<[u64]>,
}

impl Extent {
    pub fn empty(universe: usize) -> Self {
        Extent {
            universe: universe as u32,
            words: vec![0; universe.div_ceil(WORD)].into_boxed_slice(),
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut e = Extent::empty(universe);
        for w in e.words.iter_mut() {
            *w = u64::MAX;
        }
        e.trim();
        e
    }

    pub fn from_positions<I: IntoIterator<Item = usize>>(universe: usize, positions: I) -> Self {
        let mut e = Extent::empty(universe);
        for p in positions {
            e.insert(p);
        }
        e
    }

    fn trim(&mut self) {
        let rem = self.universe as usize % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe as usize
    }

    #[inline]
    pub fn insert(&mut self, pos: usize) {
        assert!(pos < self.universe(), "object position {pos} out of range");
        self.words[pos / WORD] |= 1 << (pos % WORD);
    }

    #[inline]
    pub fn remove(&mut self, pos: usize) {
        assert!(pos < self.universe(), "object position {pos} out of range");
        self.words[pos / WORD] &= !(1 << (pos % WORD));
    }

    #[inline]
    pub fn contains(&self, pos: usize) -> bool {
        pos < self.universe() && self.words[pos / WORD] & (1 << (pos % WORD)) != 0
    }

    /// Number of members (the support of the extent).
    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &Extent) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & !b == 0)
    }

    pub fn is_strict_subset(&self, other: &Extent) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn intersection(&self, other: &Extent) -> Extent {
        debug_assert_eq!(self.universe, other.universe);
        Extent {
            universe: self.universe,
            words: self.words.iter().zip(other.words.iter()).map(|(a, b)| a & b).collect(),
        }
    }

    /// `|self ∩ other|` without building the intersection.
    pub fn intersection_len(&self, other: &Extent) -> usize {
        debug_assert_eq!(self.universe, other.universe);
        self.words.iter().zip(other.words.iter()).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn intersect_with(&mut self, other: &Extent) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
    }

    /// Number of 64-bit words backing the set.
    pub(crate) fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn union(&self, other: &Extent) -> Extent {
        debug_assert_eq!(self.universe, other.universe);
        Extent {
            universe: self.universe,
            words: self.words.iter().zip(other.words.iter()).map(|(a, b)| a | b).collect(),
        }
    }

    /// Member positions in increasing order.
    pub fn iter(&self) -> Members<'_> {
        Members { words: &self.words, index: 0, current: self.words.first().copied().unwrap_or(0) }
    }

    /// Keeps only the members satisfying `keep`.
    pub fn retain<F: FnMut(usize) -> bool>(&self, mut keep: F) -> Extent {
        let mut out = Extent::empty(self.universe());
        for (wi, &word) in self.words.iter().enumerate() {
            let mut w = word;
            let mut acc = 0u64;
            while w != 0 {
                let bit = w.trailing_zeros() as usize;
                if keep(wi * WORD + bit) {
                    acc |= 1 << bit;
                }
                w &= w - 1;
            }
            out.words[wi] = acc;
        }
        out
    }

    /// Counts the members satisfying `pred` without materializing them.
    pub fn count_where<F: FnMut(usize) -> bool>(&self, mut pred: F) -> usize {
        let mut n = 0;
        for (wi, &word) in self.words.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let bit = w.trailing_zeros() as usize;
                if pred(wi * WORD + bit) {
                    n += 1;
                }
                w &= w - 1;
            }
        }
        n
    }

    /// Lexicographic comparison of the sorted member lists.
    pub fn cmp_members(&self, other: &Extent) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Debug for Extent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct Members<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Members<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD + bit);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_respects_universe() {
        let e = Extent::full(70);
        assert_eq!(e.len(), 70);
        assert!(!e.contains(70));
        assert_eq!(e.iter().last(), Some(69));
    }

    #[test]
    fn set_operations() {
        let a = Extent::from_positions(130, [0, 5, 64, 129]);
        let b = Extent::from_positions(130, [5, 129]);
        assert!(b.is_strict_subset(&a));
        assert!(!a.is_subset(&b));
        assert_eq!(a.intersection(&b), b);
        assert_eq!(a.union(&b), a);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 5, 64, 129]);
        assert_eq!(a.retain(|p| p > 5).iter().collect::<Vec<_>>(), vec![64, 129]);
        assert_eq!(a.count_where(|p| p % 2 == 1), 2);
    }

    #[test]
    fn empty_universe() {
        let e = Extent::full(0);
        assert!(e.is_empty());
        assert_eq!(e.iter().count(), 0);
    }

    #[test]
    fn member_order_is_lexicographic() {
        let a = Extent::from_positions(6, [0, 3]);
        let b = Extent::from_positions(6, [1]);
        let c = Extent::from_positions(6, [0, 3, 4]);
        assert!(a.cmp_members(&b).is_lt());
        assert!(a.cmp_members(&c).is_lt());
    }
}
