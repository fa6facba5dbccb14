//! Memoization of rook polynomials keyed on the permutation normal form.
//!
//! Boards with the same normal form differ by a row and column permutation
//! and so share a rook polynomial. Equivalent boards whose normal forms
//! differ simply miss.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::board::Board;
use crate::error::{Error, Result};
use crate::polynomial::RookPolynomial;

pub const DEFAULT_CAPACITY: usize = 1_000_000;

/// Serialized normal form: dimensions followed by the row words.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CacheKey(Vec<u8>);

impl CacheKey {
    pub fn of(board: &Board) -> Self {
        CacheKey(board.normalize().key_bytes())
    }
}

/// Storage the engine can memoize into.
pub trait PolyStore {
    fn lookup(&mut self, key: &CacheKey) -> Option<RookPolynomial>;
    fn store(&mut self, key: CacheKey, poly: RookPolynomial) -> Result<()>;
}

#[derive(Debug)]
pub struct PolyCache {
    entries: HashMap<CacheKey, RookPolynomial>,
    capacity: usize,
    hits: u64,
    misses: u64,
}

impl Default for PolyCache {
    fn default() -> Self {
        Self::with_capacity(DEFAULT_CAPACITY)
    }
}

impl PolyCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Once `capacity` entries are stored, further insertions are dropped.
    pub fn with_capacity(capacity: usize) -> Self {
        PolyCache { entries: HashMap::new(), capacity, hits: 0, misses: 0 }
    }

    pub fn get(&mut self, board: &Board) -> Option<RookPolynomial> {
        self.lookup(&CacheKey::of(board))
    }

    /// Fails with [`Error::CacheConflict`] if an equivalent board was stored
    /// with a different polynomial.
    pub fn put(&mut self, board: &Board, poly: RookPolynomial) -> Result<()> {
        self.store(CacheKey::of(board), poly)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn misses(&self) -> u64 {
        self.misses
    }
}

impl PolyStore for PolyCache {
    fn lookup(&mut self, key: &CacheKey) -> Option<RookPolynomial> {
        let found = self.entries.get(key).cloned();
        if found.is_some() {
            self.hits += 1;
        } else {
            self.misses += 1;
        }
        found
    }

    fn store(&mut self, key: CacheKey, poly: RookPolynomial) -> Result<()> {
        match self.entries.get(&key) {
            Some(existing) if *existing != poly => Err(Error::CacheConflict),
            Some(_) => Ok(()),
            None => {
                if self.entries.len() < self.capacity {
                    self.entries.insert(key, poly);
                }
                Ok(())
            }
        }
    }
}

/// A cache shared between threads. Every operation holds the lock for its
/// whole duration.
#[derive(Debug, Default)]
pub struct SharedPolyCache {
    inner: Mutex<PolyCache>,
}

impl SharedPolyCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, board: &Board) -> Option<RookPolynomial> {
        self.lock().get(board)
    }

    pub fn put(&self, board: &Board, poly: RookPolynomial) -> Result<()> {
        self.lock().put(board, poly)
    }

    pub fn len(&self) -> usize {
        self.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, PolyCache> {
        self.inner.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
    }
}

impl PolyStore for &SharedPolyCache {
    fn lookup(&mut self, key: &CacheKey) -> Option<RookPolynomial> {
        self.lock().lookup(key)
    }

    fn store(&mut self, key: CacheKey, poly: RookPolynomial) -> Result<()> {
        self.lock().store(key, poly)
    }
}
