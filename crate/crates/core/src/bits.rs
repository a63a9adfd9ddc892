//! Small fixed-universe bitsets and antichains of them.
//!
//! Elements are indices into a canonical list of tuples, so the natural
//! ordering of a set's elements is the canonical atom order.

use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct TupleSet {
    words: Vec<u64>,
}

impl TupleSet {
    pub fn empty() -> Self {
        TupleSet { words: Vec::new() }
    }

    pub fn singleton(i: usize) -> Self {
        let mut s = TupleSet::empty();
        s.insert(i);
        s
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = TupleSet::empty();
        for i in indices {
            s.insert(i);
        }
        s
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, i: usize) {
        let (w, b) = (i / 64, i % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << b;
    }

    pub fn remove(&mut self, i: usize) {
        let (w, b) = (i / 64, i % 64);
        if let Some(word) = self.words.get_mut(w) {
            *word &= !(1 << b);
        }
        self.trim();
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words.get(i / 64).is_some_and(|w| w & (1 << (i % 64)) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_subset(&self, other: &TupleSet) -> bool {
        self.words.len() <= other.words.len()
            && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &TupleSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn union(&self, other: &TupleSet) -> TupleSet {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, s) in words.iter_mut().zip(&short.words) {
            *w |= s;
        }
        TupleSet { words }
    }

    pub fn with(&self, i: usize) -> TupleSet {
        let mut s = self.clone();
        s.insert(i);
        s
    }

    pub fn without(&self, i: usize) -> TupleSet {
        let mut s = self.clone();
        s.remove(i);
        s
    }

    pub fn difference(&self, other: &TupleSet) -> TupleSet {
        let mut words = self.words.clone();
        for (w, o) in words.iter_mut().zip(&other.words) {
            *w &= !o;
        }
        let mut s = TupleSet { words };
        s.trim();
        s
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

/// Sets are ordered by size first, then lexicographically by element list.
impl Ord for TupleSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for TupleSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for TupleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A family of pairwise ⊆-incomparable sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Antichain {
    sets: Vec<TupleSet>,
}

impl Antichain {
    pub fn new() -> Self {
        Antichain { sets: Vec::new() }
    }

    /// The family `{∅}`, the unit of [`Antichain::product`].
    pub fn unit() -> Self {
        Antichain {
            sets: vec![TupleSet::empty()],
        }
    }

    pub fn from_sets(sets: impl IntoIterator<Item = TupleSet>) -> Self {
        let mut a = Antichain::new();
        for s in sets {
            a.insert(s);
        }
        a
    }

    /// Adds `set` unless a subset is already present, dropping supersets of it.
    /// Returns whether the family changed.
    pub fn insert(&mut self, set: TupleSet) -> bool {
        if self.sets.iter().any(|s| s.is_subset(&set)) {
            return false;
        }
        self.sets.retain(|s| !set.is_subset(s));
        self.sets.push(set);
        true
    }

    pub fn merge(&mut self, other: &Antichain) -> bool {
        let mut changed = false;
        for s in &other.sets {
            changed |= self.insert(s.clone());
        }
        changed
    }

    /// Pairwise unions, minimized.
    pub fn product(&self, other: &Antichain) -> Antichain {
        let mut out = Antichain::new();
        for a in &self.sets {
            for b in &other.sets {
                out.insert(a.union(b));
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[TupleSet] {
        &self.sets
    }

    pub fn into_sorted(mut self) -> Vec<TupleSet> {
        self.sets.sort();
        self.sets
    }
}
