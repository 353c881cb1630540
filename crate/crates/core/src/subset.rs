//! Subsets of the simple-root index set `I`, stored as bitmasks.
//!
//! Internally indices are 0-based; every textual form (`Display`, parsing,
//! JSON) uses the 1-based numbering of the Dynkin diagram.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest rank representable by a [`Subset`].
pub const MAX_RANK: usize = 32;

#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// The whole index set `{1..rank}`.
    pub fn full(rank: usize) -> Self {
        debug_assert!(rank <= MAX_RANK);
        if rank == MAX_RANK {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << rank) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        Subset(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Subset(indices.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    /// Build from 1-based indices, rejecting anything outside `1..=rank`.
    pub fn from_one_based(indices: &[usize], rank: usize) -> Result<Self> {
        let mut bits = 0u32;
        for &i in indices {
            if i == 0 || i > rank {
                return Err(Error::IndexOutOfRange { index: i, rank });
            }
            bits |= 1 << (i - 1);
        }
        Ok(Subset(bits))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    /// 0-based indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..MAX_RANK).filter(move |&i| self.contains(i))
    }

    /// 1-based indices in ascending order.
    pub fn one_based(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    /// Every subset of `self`, in ascending bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        let mask = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            // smallest submask of `mask` strictly greater than `cur`
            next = if cur == mask { None } else { Some(((cur | !mask).wrapping_add(1)) & mask) };
            Some(Subset(cur))
        })
    }

    /// All subsets of `{0..rank}` in ascending bitmask order.
    pub fn all(rank: usize) -> impl Iterator<Item = Subset> {
        Subset::full(rank).subsets()
    }

    /// Image under a permutation of the index set.
    pub fn map(self, perm: &[usize]) -> Subset {
        Subset::from_indices(self.iter().map(|i| perm[i]))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(serializer)
    }
}

/// Parse `{1,3}` or `{}` into a subset.
pub fn parse_braced(s: &str, rank: usize) -> Option<Subset> {
    let inner = s.trim().strip_prefix('{')?.strip_suffix('}')?.trim();
    if inner.is_empty() {
        return Some(Subset::EMPTY);
    }
    let indices = inner.split(',').map(|t| t.trim().parse::<usize>().ok()).collect::<Option<Vec<_>>>()?;
    Subset::from_one_based(&indices, rank).ok()
}
