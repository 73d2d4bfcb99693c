use std::hash::BuildHasher;

use hashbrown::HashTable;
use rustc_hash::FxBuildHasher;

use crate::bitset::{words_for, VertexSet};

/// Interned knowledge states. A state's identity is its index; the words
/// of all states live in one flat buffer.
///
/// Lookups take `&self` and may run from many threads at once; inserts
/// take `&mut self`, so every insert-or-get is serialized and a set can
/// never receive two ids.
pub struct StateArena {
    universe: usize,
    stride: usize,
    data: Vec<u64>,
    table: HashTable<u32>,
    hasher: FxBuildHasher,
}

impl StateArena {
    pub fn new(universe: usize) -> StateArena {
        StateArena {
            universe,
            stride: words_for(universe),
            data: Vec::new(),
            table: HashTable::new(),
            hasher: FxBuildHasher,
        }
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len() / self.stride
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn words(&self, id: u32) -> &[u64] {
        let s = id as usize * self.stride;
        &self.data[s..s + self.stride]
    }

    pub fn set(&self, id: u32) -> VertexSet {
        VertexSet::from_words(self.universe, self.words(id))
    }

    #[inline]
    fn hash(&self, key: &[u64]) -> u64 {
        self.hasher.hash_one(key)
    }

    pub fn get(&self, key: &[u64]) -> Option<u32> {
        let h = self.hash(key);
        self.table
            .find(h, |&id| self.words(id) == key)
            .copied()
    }

    pub fn get_set(&self, s: &VertexSet) -> Option<u32> {
        if s.universe() != self.universe {
            return None;
        }
        self.get(s.words())
    }

    /// Returns the id of `key` and whether it was newly inserted.
    pub fn insert(&mut self, key: &[u64]) -> (u32, bool) {
        debug_assert_eq!(key.len(), self.stride);
        let h = self.hash(key);
        let StateArena {
            data,
            table,
            hasher,
            stride,
            ..
        } = self;
        let stride = *stride;
        if let Some(&id) = table.find(h, |&id| {
            let s = id as usize * stride;
            &data[s..s + stride] == key
        }) {
            return (id, false);
        }
        let id = (data.len() / stride) as u32;
        data.extend_from_slice(key);
        let data: &Vec<u64> = data;
        table.insert_unique(h, id, |&other| {
            let s = other as usize * stride;
            hasher.hash_one(&data[s..s + stride])
        });
        (id, true)
    }

    /// Approximate heap footprint in bytes.
    pub fn heap_bytes(&self) -> usize {
        self.data.capacity() * 8 + self.table.capacity() * 5
    }
}
