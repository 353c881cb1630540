//! The finite Weyl group of a root system, stored as an interned table of
//! root permutations.
//!
//! Element IDs are dense and ordered by `(length, canonical reduced word)`,
//! where the canonical word is the lexicographically least reduced word
//! (obtained by peeling the smallest left descent at each step).

use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicU32, AtomicU8, Ordering};
use std::sync::{OnceLock, RwLock};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::rootsys::{DiagramAutomorphism, RootSystem};
use crate::subset::Subset;

/// Groups up to this order get a dense `|W|^2` Bruhat memo.
pub const DENSE_BRUHAT_LIMIT: usize = 1024;

static NEXT_TABLE: AtomicU32 = AtomicU32::new(1);

/// Handle to an element of a particular [`WeylGroup`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElement {
    table: u32,
    id: u32,
}

impl WeylElement {
    pub fn id(self) -> usize {
        self.id as usize
    }
}

enum BruhatMemo {
    /// 0 = unknown, 1 = false, 2 = true
    Dense(Vec<AtomicU8>),
    Sparse(RwLock<HashMap<(u32, u32), bool>>),
}

pub struct WeylGroup {
    rs: RootSystem,
    tag: u32,
    size: usize,
    n_roots: usize,
    rank: usize,
    perms: Vec<u16>,
    lengths: Vec<u32>,
    words: Vec<Vec<u8>>,
    right: Vec<u32>,
    left: Vec<u32>,
    inverse: Vec<u32>,
    bruhat: BruhatMemo,
    upper_sets: Vec<OnceLock<FixedBitSet>>,
}

impl std::fmt::Debug for WeylGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeylGroup").field("type", &self.rs.type_label()).field("size", &self.size).finish()
    }
}

impl WeylGroup {
    /// Generate the group by breadth-first search over right multiplication
    /// by simple reflections.
    pub fn generate(rs: RootSystem) -> Result<Self> {
        Self::generate_with_guard(rs, crate::rootsys::DEFAULT_GROUP_GUARD)
    }

    pub fn generate_with_guard(rs: RootSystem, guard: u128) -> Result<Self> {
        let estimated = rs.cartan_type().weyl_order();
        if estimated > guard {
            return Err(Error::GuardExceeded { estimated, guard });
        }
        let rank = rs.rank();
        let n_roots = rs.num_roots();
        let positive = rs.positive_count();
        let simple: Vec<Vec<u16>> =
            (0..rank).map(|i| (0..n_roots).map(|k| rs.reflect_index(i, k) as u16).collect()).collect();

        // BFS; visiting order is non-decreasing in length.
        let identity: Vec<u16> = (0..n_roots as u16).collect();
        let mut lookup: HashMap<Vec<u16>, u32> = HashMap::new();
        let mut perms: Vec<Vec<u16>> = vec![identity.clone()];
        lookup.insert(identity, 0);
        let mut right_tmp: Vec<u32> = Vec::new();
        let mut queue = VecDeque::from([0u32]);
        // IDs are handed out in queue order, so rows of `right_tmp` are appended in order.
        while let Some(w) = queue.pop_front() {
            debug_assert_eq!(right_tmp.len(), w as usize * rank);
            for s in &simple {
                let next: Vec<u16> = s.iter().map(|&k| perms[w as usize][k as usize]).collect();
                let id = match lookup.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = perms.len() as u32;
                        lookup.insert(next.clone(), id);
                        perms.push(next);
                        queue.push_back(id);
                        id
                    }
                };
                right_tmp.push(id);
            }
        }
        let size = perms.len();
        if size as u128 != estimated {
            return Err(Error::Inconsistent(format!("generated {size} elements, expected {estimated}")));
        }

        let lengths_tmp: Vec<u32> =
            perms.iter().map(|p| p[..positive].iter().filter(|&&k| k as usize >= positive).count() as u32).collect();
        let left_tmp: Vec<u32> = perms
            .iter()
            .flat_map(|p| {
                simple.iter().map(|s| {
                    let prod: Vec<u16> = p.iter().map(|&k| s[k as usize]).collect();
                    lookup[&prod]
                })
            })
            .collect();

        // canonical words in BFS order
        let mut words_tmp: Vec<Vec<u8>> = vec![Vec::new(); size];
        for w in 1..size {
            let i = (0..rank)
                .find(|&i| lengths_tmp[left_tmp[w * rank + i] as usize] < lengths_tmp[w])
                .expect("non-identity element has a left descent");
            let shorter = left_tmp[w * rank + i] as usize;
            let mut word = Vec::with_capacity(lengths_tmp[w] as usize);
            word.push(i as u8);
            word.extend_from_slice(&words_tmp[shorter]);
            words_tmp[w] = word;
        }

        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| lengths_tmp[a].cmp(&lengths_tmp[b]).then_with(|| words_tmp[a].cmp(&words_tmp[b])));
        let mut new_id = vec![0u32; size];
        for (pos, &old) in order.iter().enumerate() {
            new_id[old] = pos as u32;
        }

        let mut flat = Vec::with_capacity(size * n_roots);
        let mut lengths = Vec::with_capacity(size);
        let mut words = Vec::with_capacity(size);
        let mut right = Vec::with_capacity(size * rank);
        let mut left = Vec::with_capacity(size * rank);
        for &old in &order {
            flat.extend_from_slice(&perms[old]);
            lengths.push(lengths_tmp[old]);
            words.push(std::mem::take(&mut words_tmp[old]));
            right.extend(right_tmp[old * rank..(old + 1) * rank].iter().map(|&x| new_id[x as usize]));
            left.extend(left_tmp[old * rank..(old + 1) * rank].iter().map(|&x| new_id[x as usize]));
        }
        let inverse = (0..size)
            .map(|w| {
                let p = &flat[w * n_roots..(w + 1) * n_roots];
                let mut inv = vec![0u16; n_roots];
                for (k, &img) in p.iter().enumerate() {
                    inv[img as usize] = k as u16;
                }
                new_id[lookup[&inv] as usize]
            })
            .collect();

        let bruhat = if size <= DENSE_BRUHAT_LIMIT {
            BruhatMemo::Dense((0..size * size).map(|_| AtomicU8::new(0)).collect())
        } else {
            BruhatMemo::Sparse(RwLock::new(HashMap::new()))
        };

        Ok(WeylGroup {
            rs,
            tag: NEXT_TABLE.fetch_add(1, Ordering::Relaxed),
            size,
            n_roots,
            rank,
            perms: flat,
            lengths,
            words,
            right,
            left,
            inverse,
            bruhat,
            upper_sets: (0..size).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn idx(&self, w: WeylElement) -> usize {
        assert_eq!(w.table, self.tag, "element belongs to a different group table");
        w.id as usize
    }

    fn handle(&self, id: usize) -> WeylElement {
        WeylElement { table: self.tag, id: id as u32 }
    }

    pub fn contains(&self, w: WeylElement) -> bool {
        w.table == self.tag
    }

    pub fn identity(&self) -> WeylElement {
        self.handle(0)
    }

    /// Element with the given dense ID, if in range.
    pub fn element(&self, id: usize) -> Option<WeylElement> {
        (id < self.size).then(|| self.handle(id))
    }

    pub fn elements(&self) -> impl Iterator<Item = WeylElement> + '_ {
        (0..self.size).map(|id| self.handle(id))
    }

    /// The simple reflection `s_i` (0-based `i`).
    pub fn simple(&self, i: usize) -> WeylElement {
        self.right_mul_simple(self.identity(), i)
    }

    pub fn longest(&self) -> WeylElement {
        self.handle(self.size - 1)
    }

    pub fn length(&self, w: WeylElement) -> usize {
        self.lengths[self.idx(w)] as usize
    }

    pub fn is_identity(&self, w: WeylElement) -> bool {
        self.idx(w) == 0
    }

    /// The element's action on root-table indices.
    pub fn perm(&self, w: WeylElement) -> &[u16] {
        let i = self.idx(w);
        &self.perms[i * self.n_roots..(i + 1) * self.n_roots]
    }

    /// `w * s_i`
    pub fn right_mul_simple(&self, w: WeylElement, i: usize) -> WeylElement {
        self.handle(self.right[self.idx(w) * self.rank + i] as usize)
    }

    /// `s_i * w`
    pub fn left_mul_simple(&self, w: WeylElement, i: usize) -> WeylElement {
        self.handle(self.left[self.idx(w) * self.rank + i] as usize)
    }

    fn check(&self, w: WeylElement) -> Result<()> {
        if w.table == self.tag {
            Ok(())
        } else {
            Err(Error::TableMismatch)
        }
    }

    pub fn multiply(&self, a: WeylElement, b: WeylElement) -> Result<WeylElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    /// Unchecked product; panics if either operand is foreign.
    pub fn mul(&self, a: WeylElement, b: WeylElement) -> WeylElement {
        let b_idx = self.idx(b);
        self.words[b_idx].iter().fold(a, |acc, &i| self.right_mul_simple(acc, i as usize))
    }

    pub fn inverse(&self, a: WeylElement) -> Result<WeylElement> {
        self.check(a)?;
        Ok(self.inv(a))
    }

    pub fn inv(&self, a: WeylElement) -> WeylElement {
        self.handle(self.inverse[self.idx(a)] as usize)
    }

    /// Image of the root with table index `k`.
    pub fn apply(&self, a: WeylElement, k: usize) -> Result<usize> {
        self.check(a)?;
        if k >= self.n_roots {
            return Err(Error::Inconsistent(format!("root index {k} out of range")));
        }
        Ok(self.perm(a)[k] as usize)
    }

    /// Does `w` send the simple root `alpha_i` to a negative root?
    pub fn is_right_descent(&self, w: WeylElement, i: usize) -> bool {
        !self.rs.is_positive_index(self.perm(w)[i] as usize)
    }

    pub fn is_left_descent(&self, w: WeylElement, i: usize) -> bool {
        self.length(self.left_mul_simple(w, i)) < self.length(w)
    }

    /// Canonical reduced word (0-based letters).
    pub fn reduced_word(&self, w: WeylElement) -> Vec<usize> {
        self.words[self.idx(w)].iter().map(|&i| i as usize).collect()
    }

    /// Simple indices occurring in a reduced word of `w`.
    pub fn support(&self, w: WeylElement) -> Subset {
        Subset::from_indices(self.words[self.idx(w)].iter().map(|&i| i as usize))
    }

    /// Product of a word of 0-based letters.
    pub fn from_word(&self, word: &[usize]) -> Result<WeylElement> {
        word.iter().try_fold(self.identity(), |acc, &i| {
            if i >= self.rank {
                Err(Error::IndexOutOfRange { index: i + 1, rank: self.rank })
            } else {
                Ok(self.right_mul_simple(acc, i))
            }
        })
    }

    /// `"e"` or dot-separated letters of the canonical word, e.g. `"s1.s2.s1"`.
    pub fn format(&self, w: WeylElement) -> String {
        let word = &self.words[self.idx(w)];
        if word.is_empty() {
            return "e".into();
        }
        word.iter().map(|i| format!("s{}", i + 1)).collect::<Vec<_>>().join(".")
    }

    /// Parse the output of [`WeylGroup::format`]; any word (reduced or not) is accepted.
    pub fn parse(&self, s: &str) -> Result<WeylElement> {
        let s = s.trim();
        if s == "e" {
            return Ok(self.identity());
        }
        let bad = || Error::ParseElement(s.to_string());
        let word = s
            .split('.')
            .map(|t| {
                let i: usize = t.strip_prefix('s').ok_or_else(bad)?.parse().map_err(|_| bad())?;
                if i == 0 || i > self.rank {
                    return Err(bad());
                }
                Ok(i - 1)
            })
            .collect::<Result<Vec<_>>>()?;
        self.from_word(&word)
    }

    /// Bruhat order via the lifting property: for a left descent `s` of `y`,
    /// `x <= y` iff `min(x, sx) <= sy`.
    pub fn bruhat_leq(&self, x: WeylElement, y: WeylElement) -> bool {
        let (mut x, mut y) = (self.idx(x), self.idx(y));
        let mut path: Vec<(usize, usize)> = Vec::new();
        let result = loop {
            if let Some(known) = self.memo_get(x, y) {
                break known;
            }
            if self.lengths[x] > self.lengths[y] {
                break false;
            }
            if y == 0 {
                break x == 0;
            }
            if x == y {
                break true;
            }
            path.push((x, y));
            let s = self.words[y][0] as usize;
            let sy = self.left[y * self.rank + s] as usize;
            let sx = self.left[x * self.rank + s] as usize;
            if self.lengths[sx] < self.lengths[x] {
                x = sx;
            }
            y = sy;
        };
        for (a, b) in path {
            self.memo_set(a, b, result);
        }
        result
    }

    fn memo_get(&self, x: usize, y: usize) -> Option<bool> {
        match &self.bruhat {
            BruhatMemo::Dense(table) => match table[x * self.size + y].load(Ordering::Relaxed) {
                0 => None,
                v => Some(v == 2),
            },
            BruhatMemo::Sparse(map) => map.read().expect("bruhat memo poisoned").get(&(x as u32, y as u32)).copied(),
        }
    }

    fn memo_set(&self, x: usize, y: usize, value: bool) {
        match &self.bruhat {
            BruhatMemo::Dense(table) => table[x * self.size + y].store(if value { 2 } else { 1 }, Ordering::Relaxed),
            BruhatMemo::Sparse(map) => {
                map.write().expect("bruhat memo poisoned").insert((x as u32, y as u32), value);
            }
        }
    }

    /// `{ y : x <= y }` as a bitset over element IDs, cached per element.
    pub fn bruhat_upper_set(&self, x: WeylElement) -> &FixedBitSet {
        self.upper_sets[self.idx(x)].get_or_init(|| {
            let mut set = FixedBitSet::with_capacity(self.size);
            for y in self.elements() {
                if self.bruhat_leq(x, y) {
                    set.insert(y.id());
                }
            }
            set
        })
    }

    /// All elements of the parabolic subgroup `W_J`, sorted by ID.
    pub fn parabolic_elements(&self, j: Subset) -> Vec<WeylElement> {
        let mut seen = FixedBitSet::with_capacity(self.size);
        let mut queue = VecDeque::from([0usize]);
        seen.insert(0);
        while let Some(w) = queue.pop_front() {
            for i in j.iter() {
                let next = self.right[w * self.rank + i] as usize;
                if !seen.put(next) {
                    queue.push_back(next);
                }
            }
        }
        seen.ones().map(|id| self.handle(id)).collect()
    }

    /// Is `w` the minimal-length representative of `w W_J`?
    pub fn is_minimal_rep(&self, w: WeylElement, j: Subset) -> bool {
        j.iter().all(|i| !self.is_right_descent(w, i))
    }

    /// The minimal coset representatives `W^J`, sorted by ID.
    pub fn minimal_coset_reps(&self, j: Subset) -> Vec<WeylElement> {
        self.elements().filter(|&w| self.is_minimal_rep(w, j)).collect()
    }

    /// Minimal-length element of the coset `w W_J`.
    pub fn min_coset_rep(&self, w: WeylElement, j: Subset) -> WeylElement {
        let mut cur = w;
        while let Some(i) = j.iter().find(|&i| self.is_right_descent(cur, i)) {
            cur = self.right_mul_simple(cur, i);
        }
        cur
    }

    /// `sigma(w)`: apply `sigma` letterwise to the canonical reduced word.
    pub fn twist(&self, sigma: &DiagramAutomorphism, w: WeylElement) -> WeylElement {
        assert_eq!(sigma.rank(), self.rank, "automorphism rank mismatch");
        self.words[self.idx(w)]
            .iter()
            .fold(self.identity(), |acc, &i| self.right_mul_simple(acc, sigma.apply(i as usize)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(t: &str) -> WeylGroup {
        WeylGroup::generate(RootSystem::build(t).unwrap()).unwrap()
    }

    #[test]
    fn group_orders() {
        assert_eq!(group("A1").size(), 2);
        assert_eq!(group("A2").size(), 6);
        let b2 = group("B2");
        assert_eq!(b2.size(), 8);
        assert_eq!(b2.length(b2.longest()), 4);
        assert_eq!(group("G2").size(), 12);
        assert_eq!(group("D4").size(), 192);
    }

    #[test]
    fn ids_ordered_by_length_then_word() {
        let a2 = group("A2");
        let names: Vec<String> = a2.elements().map(|w| a2.format(w)).collect();
        assert_eq!(names, ["e", "s1", "s2", "s1.s2", "s2.s1", "s1.s2.s1"]);
    }

    #[test]
    fn multiply_examples() {
        let a2 = group("A2");
        let (e, s1, s2) = (a2.identity(), a2.simple(0), a2.simple(1));
        for w in a2.elements() {
            assert_eq!(a2.multiply(e, w).unwrap(), w);
        }
        assert_eq!(a2.length(a2.multiply(s1, s2).unwrap()), 2);
        assert_eq!(a2.multiply(s1, s1).unwrap(), e);
        for w in a2.elements() {
            assert_eq!(a2.length(a2.inv(w)), a2.length(w));
            assert_eq!(a2.mul(w, a2.inv(w)), e);
        }
    }

    #[test]
    fn table_mismatch_is_an_error() {
        let a = group("A2");
        let b = group("A2");
        assert_eq!(a.multiply(a.identity(), b.identity()), Err(Error::TableMismatch));
        assert_eq!(a.inverse(b.identity()), Err(Error::TableMismatch));
        assert_eq!(a.apply(b.identity(), 0), Err(Error::TableMismatch));
    }

    #[test]
    fn reduced_word_examples() {
        let a2 = group("A2");
        assert!(a2.reduced_word(a2.identity()).is_empty());
        assert_eq!(a2.reduced_word(a2.longest()), vec![0, 1, 0]);
        let b2 = group("B2");
        assert_eq!(b2.reduced_word(b2.longest()).len(), 4);
    }

    #[test]
    fn support_examples() {
        let a2 = group("A2");
        assert_eq!(a2.support(a2.identity()), Subset::EMPTY);
        assert_eq!(a2.support(a2.simple(1)), Subset::from_indices([1]));
        let s1s2 = a2.mul(a2.simple(0), a2.simple(1));
        assert_eq!(a2.support(s1s2), Subset::from_indices([0, 1]));
    }

    #[test]
    fn bruhat_examples() {
        let a2 = group("A2");
        let s1 = a2.simple(0);
        let s1s2 = a2.parse("s1.s2").unwrap();
        let s2s1 = a2.parse("s2.s1").unwrap();
        for w in a2.elements() {
            assert!(a2.bruhat_leq(a2.identity(), w));
        }
        assert!(a2.bruhat_leq(s1, s1s2));
        assert!(!a2.bruhat_leq(s1s2, s2s1));
        assert!(!a2.bruhat_leq(s2s1, s1s2));
    }

    #[test]
    fn sparse_memo_agrees_with_dense() {
        // B5 has 3840 elements, so it takes the sparse memo path.
        let b5 = group("B5");
        assert!(matches!(b5.bruhat, BruhatMemo::Sparse(_)));
        let w0 = b5.longest();
        let x = b5.parse("s1.s3.s5").unwrap();
        assert!(b5.bruhat_leq(x, w0));
        assert!(b5.bruhat_leq(x, w0));
        assert!(!b5.bruhat_leq(w0, x));
        let y = b5.parse("s3.s1").unwrap();
        assert!(!b5.bruhat_leq(b5.simple(4), y));
        assert!(b5.bruhat_leq(b5.simple(2), y));
    }

    #[test]
    fn parabolic_examples() {
        let a2 = group("A2");
        assert_eq!(a2.parabolic_elements(Subset::EMPTY), vec![a2.identity()]);
        assert_eq!(a2.parabolic_elements(Subset::from_indices([0])), vec![a2.identity(), a2.simple(0)]);
        let a3 = group("A3");
        assert_eq!(a3.parabolic_elements(Subset::from_indices([0, 2])).len(), 4);
    }

    #[test]
    fn coset_rep_examples() {
        let a2 = group("A2");
        assert_eq!(a2.minimal_coset_reps(a2.root_system().index_set()), vec![a2.identity()]);
        let reps: Vec<String> =
            a2.minimal_coset_reps(Subset::from_indices([0])).into_iter().map(|w| a2.format(w)).collect();
        assert_eq!(reps, ["e", "s2", "s1.s2"]);
        assert_eq!(a2.minimal_coset_reps(Subset::EMPTY).len(), 6);
        let w0 = a2.longest();
        assert_eq!(a2.format(a2.min_coset_rep(w0, Subset::from_indices([0]))), "s1.s2");
    }

    #[test]
    fn twist_examples() {
        let a2 = group("A2");
        let id = DiagramAutomorphism::identity(2);
        let swap = DiagramAutomorphism::new(a2.root_system(), vec![1, 0]).unwrap();
        for w in a2.elements() {
            assert_eq!(a2.twist(&id, w), w);
        }
        assert_eq!(a2.twist(&swap, a2.simple(0)), a2.simple(1));
        assert_eq!(a2.format(a2.twist(&swap, a2.parse("s1.s2").unwrap())), "s2.s1");
    }

    #[test]
    fn element_strings_round_trip() {
        let b2 = group("B2");
        for w in b2.elements() {
            assert_eq!(b2.parse(&b2.format(w)).unwrap(), w);
        }
        assert_eq!(b2.parse("s1.s1").unwrap(), b2.identity());
        assert!(b2.parse("s3").is_err());
        assert!(b2.parse("x1").is_err());
        assert!(b2.parse("").is_err());
    }
}
