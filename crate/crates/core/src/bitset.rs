//! Fixed-universe vertex sets stored as little-endian 64-bit words.
//!
//! Bit `i` of the set lives in word `i / 64` at position `i % 64`, so the
//! word sequence (and therefore the hash) of a set depends only on its
//! members and the universe size, never on the platform.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::graph::Vertex;

/// Number of 64-bit words needed for a universe of `n` vertices.
#[inline]
pub fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    universe: u32,
    words: Box<[u64]>,
}

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        VertexSet {
            universe: universe as u32,
            words: vec![0; words_for(universe)].into_boxed_slice(),
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for v in 0..universe {
            s.insert(v as Vertex);
        }
        s
    }

    pub fn singleton(universe: usize, v: Vertex) -> Self {
        let mut s = Self::empty(universe);
        s.insert(v);
        s
    }

    pub fn from_vertices<I: IntoIterator<Item = Vertex>>(universe: usize, it: I) -> Self {
        let mut s = Self::empty(universe);
        for v in it {
            s.insert(v);
        }
        s
    }

    /// Builds a set from raw words; bits beyond the universe must be clear.
    pub fn from_words(universe: usize, words: &[u64]) -> Self {
        debug_assert_eq!(words.len(), words_for(universe));
        VertexSet {
            universe: universe as u32,
            words: words.into(),
        }
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe as usize
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn insert(&mut self, v: Vertex) {
        assert!((v as usize) < self.universe(), "vertex {v} outside universe");
        self.words[v as usize / 64] |= 1u64 << (v % 64);
    }

    #[inline]
    pub fn remove(&mut self, v: Vertex) {
        if (v as usize) < self.universe() {
            self.words[v as usize / 64] &= !(1u64 << (v % 64));
        }
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        (v as usize) < self.universe() && self.words[v as usize / 64] >> (v % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_singleton(&self) -> bool {
        let mut seen = false;
        for &w in self.words.iter() {
            match w.count_ones() {
                0 => {}
                1 if !seen => seen = true,
                _ => return false,
            }
        }
        seen
    }

    pub fn first(&self) -> Option<Vertex> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| (i * 64) as Vertex + w.trailing_zeros())
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= !b;
        }
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    idx: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = Vertex;

    fn next(&mut self) -> Option<Vertex> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros();
                self.current &= self.current - 1;
                return Some((self.idx * 64) as Vertex + bit);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.idx];
        }
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = Vertex;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Serialized as a sorted array of vertex indices. The universe is not part
/// of the wire format; deserializing sizes the universe to the largest member.
impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<Vertex>::deserialize(d)?;
        let universe = v.iter().max().map_or(0, |&m| m as usize + 1);
        Ok(VertexSet::from_vertices(universe, v))
    }
}

impl VertexSet {
    /// Re-homes a set into a (larger or equal) universe.
    pub fn with_universe(&self, universe: usize) -> Option<VertexSet> {
        if self.iter().any(|v| v as usize >= universe) {
            return None;
        }
        Some(VertexSet::from_vertices(universe, self.iter()))
    }
}
