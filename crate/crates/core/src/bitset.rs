//! Dense element sets over a universe `0..n`.

use std::fmt;

const WORD: usize = 64;

/// A set of element ids backed by a word vector sized to the universe.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ElemSet {
    words: Vec<u64>,
}

impl ElemSet {
    pub fn empty(universe: usize) -> Self {
        ElemSet {
            words: vec![0; universe.div_ceil(WORD)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for e in 0..universe {
            s.insert(e as u32);
        }
        s
    }

    pub fn from_elems(universe: usize, elems: &[u32]) -> Self {
        let mut s = Self::empty(universe);
        for &e in elems {
            s.insert(e);
        }
        s
    }

    #[inline]
    pub fn contains(&self, e: u32) -> bool {
        let e = e as usize;
        self.words
            .get(e / WORD)
            .is_some_and(|w| w >> (e % WORD) & 1 == 1)
    }

    #[inline]
    pub fn insert(&mut self, e: u32) {
        let e = e as usize;
        self.words[e / WORD] |= 1 << (e % WORD);
    }

    #[inline]
    pub fn remove(&mut self, e: u32) {
        let e = e as usize;
        self.words[e / WORD] &= !(1 << (e % WORD));
    }

    pub fn insert_all(&mut self, elems: &[u32]) {
        for &e in elems {
            self.insert(e);
        }
    }

    pub fn remove_all(&mut self, elems: &[u32]) {
        for &e in elems {
            self.remove(e);
        }
    }

    pub fn contains_all(&self, elems: &[u32]) -> bool {
        elems.iter().all(|&e| self.contains(e))
    }

    pub fn contains_any(&self, elems: &[u32]) -> bool {
        elems.iter().any(|&e| self.contains(e))
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_disjoint(&self, other: &ElemSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter().chain(std::iter::repeat(&0)))
            .all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &ElemSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &ElemSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersect_with(&mut self, other: &ElemSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// Smallest element, if any.
    pub fn first(&self) -> Option<u32> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| (i * WORD + w.trailing_zeros() as usize) as u32)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some((i * WORD + t) as u32)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut s = ElemSet::empty(130);
        s.insert(0);
        s.insert(64);
        s.insert(129);
        assert_eq!(s.len(), 3);
        assert_eq!(s.to_vec(), vec![0, 64, 129]);
        assert_eq!(s.first(), Some(0));
        s.remove(0);
        assert_eq!(s.first(), Some(64));
        let t = ElemSet::from_elems(130, &[64]);
        assert!(t.is_subset(&s));
        assert!(!s.is_disjoint(&t));
        let mut u = s.clone();
        u.difference_with(&t);
        assert_eq!(u.to_vec(), vec![129]);
        assert!(!s.contains(200));
    }
}
