//! Test-side oracles that work directly on root permutations, independent
//! of the group tables, coset machinery and caches in the library.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use stablepieces::pieces::PieceContext;
use stablepieces::{DiagramAutomorphism, RootSystem, Subset, WeylElement, WeylGroup};

pub type Perm = Vec<usize>;

/// Permutation of root indices induced by `s_i`.
pub fn simple_perm(rs: &RootSystem, i: usize) -> Perm {
    (0..rs.num_roots()).map(|k| rs.reflect_index(i, k)).collect()
}

/// `(a ∘ b)(k) = a(b(k))`
pub fn compose(a: &[usize], b: &[usize]) -> Perm {
    b.iter().map(|&k| a[k]).collect()
}

pub fn invert(a: &[usize]) -> Perm {
    let mut out = vec![0; a.len()];
    for (k, &v) in a.iter().enumerate() {
        out[v] = k;
    }
    out
}

pub fn identity_perm(n: usize) -> Perm {
    (0..n).collect()
}

/// Product `s_{w_1} ... s_{w_k}` of a word.
pub fn word_perm(rs: &RootSystem, word: &[usize]) -> Perm {
    word.iter().fold(identity_perm(rs.num_roots()), |acc, &i| compose(&acc, &simple_perm(rs, i)))
}

/// Number of positive roots sent to negative roots.
pub fn inversions(rs: &RootSystem, p: &[usize]) -> usize {
    (0..rs.num_roots()).filter(|&k| rs.is_positive_index(k) && !rs.is_positive_index(p[k])).count()
}

/// Breadth-first closure of the subgroup generated by `s_i`, `i ∈ j`.
pub fn subgroup(rs: &RootSystem, j: Subset) -> Vec<Perm> {
    let gens: Vec<Perm> = j.iter().map(|i| simple_perm(rs, i)).collect();
    let start = identity_perm(rs.num_roots());
    let mut seen: HashSet<Perm> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut out = Vec::new();
    while let Some(p) = queue.pop_front() {
        for g in &gens {
            let q = compose(&p, g);
            if seen.insert(q.clone()) {
                queue.push_back(q);
            }
        }
        out.push(p);
    }
    out
}

/// `sigma ∘ p ∘ sigma^{-1}` on root indices.
pub fn sigma_conjugate(rs: &RootSystem, sigma: &DiagramAutomorphism, p: &[usize]) -> Perm {
    let on_roots: Perm = (0..rs.num_roots())
        .map(|k| rs.root_index(&sigma.apply_root(rs.root(k))).expect("sigma permutes roots"))
        .collect();
    compose(&compose(&on_roots, p), &invert(&on_roots))
}

/// Lookup from permutations to library handles.
pub fn perm_index(g: &WeylGroup) -> HashMap<Perm, WeylElement> {
    g.elements().map(|w| (g.perm(w).iter().map(|&x| x as usize).collect(), w)).collect()
}

pub fn as_perm(g: &WeylGroup, w: WeylElement) -> Perm {
    g.perm(w).iter().map(|&x| x as usize).collect()
}

/// Letters occurring in a reduced word, read off from a reduced word built by
/// descent peeling on permutations.
pub fn support_oracle(rs: &RootSystem, p: &[usize]) -> Subset {
    let mut cur = p.to_vec();
    let mut out = Subset::EMPTY;
    while inversions(rs, &cur) > 0 {
        // right descent: w(alpha_i) < 0
        let i = (0..rs.rank()).find(|&i| !rs.is_positive_index(cur[i])).expect("nontrivial element has a descent");
        out.insert(i);
        cur = compose(&cur, &simple_perm(rs, i));
    }
    out
}

/// Brute-force Bruhat relation: `x <= y` iff `x` is the product of a subword
/// of a reduced word of `y`.
pub fn subword_leq(rs: &RootSystem, x: &[usize], y_word: &[usize]) -> bool {
    let n = y_word.len();
    let letters: Vec<Perm> = y_word.iter().map(|&i| simple_perm(rs, i)).collect();
    (0u32..1 << n).any(|mask| {
        let mut p = identity_perm(rs.num_roots());
        for (k, l) in letters.iter().enumerate() {
            if mask & (1 << k) != 0 {
                p = compose(&p, l);
            }
        }
        p == x
    })
}

pub fn context(type_spec: &str, auto: &str) -> PieceContext {
    let rs = RootSystem::build(type_spec).unwrap();
    let sigma = DiagramAutomorphism::parse(&rs, auto).unwrap();
    PieceContext::new(Arc::new(WeylGroup::generate(rs).unwrap()), sigma).unwrap()
}

/// Closure of piece `p` straight from the definition: `(J', w')` with
/// `J' ⊆ J` and some `u ∈ W_J` with `u w sigma(u)^{-1} <= w'`.
pub fn closure_oracle(ctx: &PieceContext, p: usize, index: &HashMap<Perm, WeylElement>) -> Vec<usize> {
    let g = ctx.group();
    let rs = g.root_system();
    let piece = ctx.piece(p);
    let w = as_perm(g, piece.w);
    let conjugates: Vec<WeylElement> = subgroup(rs, piece.j)
        .iter()
        .map(|u| {
            let c = compose(&compose(u, &w), &invert(&sigma_conjugate(rs, ctx.sigma(), u)));
            index[&c]
        })
        .collect();
    (0..ctx.len())
        .filter(|&q| {
            let other = ctx.piece(q);
            other.j.is_subset(piece.j) && conjugates.iter().any(|&c| g.bruhat_leq(c, other.w))
        })
        .collect()
}
