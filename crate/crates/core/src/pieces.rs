//! Twisted G-stable pieces `Z_{J,sigma;w}` of the wonderful compactification,
//! indexed by `J ⊆ I` and `w ∈ W^{sigma(J)}`, together with their cores,
//! the closure order and the closure poset.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use petgraph::algo::toposort;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rootsys::DiagramAutomorphism;
use crate::subset::{parse_braced, Subset};
use crate::weyl::{WeylElement, WeylGroup};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedPiece {
    pub j: Subset,
    pub w: WeylElement,
    /// `I(J, sigma; w)`
    pub core: Subset,
    pub id: String,
}

/// Canonical piece ID, e.g. `J={1,3};w=s2.s1`.
pub fn piece_id(group: &WeylGroup, j: Subset, w: WeylElement) -> String {
    format!("J={j};w={}", group.format(w))
}

/// `w ∈ W^{sigma(J)}`
pub fn is_piece_index(group: &WeylGroup, sigma: &DiagramAutomorphism, j: Subset, w: WeylElement) -> bool {
    group.is_minimal_rep(w, sigma.apply_subset(j))
}

/// The largest `K ⊆ J` with `w sigma(K) = K`, by decreasing fixpoint iteration.
pub fn core(group: &WeylGroup, sigma: &DiagramAutomorphism, j: Subset, w: WeylElement) -> Result<Subset> {
    if !is_piece_index(group, sigma, j, w) {
        return Err(Error::NotMinimalRep { w: group.format(w), subset: sigma.apply_subset(j).to_string() });
    }
    let rank = group.rank();
    let perm = group.perm(w);
    let mut k = j;
    loop {
        let next = Subset::from_indices(k.iter().filter(|&i| {
            let image = perm[sigma.apply(i)] as usize;
            image < rank && k.contains(image)
        }));
        if next == k {
            return Ok(k);
        }
        k = next;
    }
}

/// The distinct elements `u w sigma(u)^{-1}` for `u ∈ W_J`.
pub fn twisted_conjugates(
    group: &WeylGroup,
    sigma: &DiagramAutomorphism,
    j: Subset,
    w: WeylElement,
) -> Vec<WeylElement> {
    let mut out: Vec<WeylElement> = group
        .parabolic_elements(j)
        .into_iter()
        .map(|u| group.mul(group.mul(u, w), group.inv(group.twist(sigma, u))))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// `w' <=_{J,sigma} w`: some `u ∈ W_J` has `u w sigma(u)^{-1} <= w'` in Bruhat order.
pub fn closure_leq(
    group: &WeylGroup,
    sigma: &DiagramAutomorphism,
    j: Subset,
    w: WeylElement,
    w_prime: WeylElement,
) -> bool {
    group.parabolic_elements(j).into_iter().any(|u| {
        let conj = group.mul(group.mul(u, w), group.inv(group.twist(sigma, u)));
        group.bruhat_leq(conj, w_prime)
    })
}

/// All pieces for one `(root system, sigma)` pair.
pub struct PieceContext {
    group: Arc<WeylGroup>,
    sigma: DiagramAutomorphism,
    pieces: Vec<TwistedPiece>,
    by_key: HashMap<(Subset, WeylElement), usize>,
    closures: Vec<OnceLock<FixedBitSet>>,
}

impl std::fmt::Debug for PieceContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PieceContext")
            .field("type", &self.type_label())
            .field("automorphism", &self.sigma.spec_string())
            .field("pieces", &self.pieces.len())
            .finish()
    }
}

impl PieceContext {
    /// Enumerate one piece per `(J, w ∈ W^{sigma(J)})`, ordered by `J` bitmask, then `w` ID.
    pub fn new(group: Arc<WeylGroup>, sigma: DiagramAutomorphism) -> Result<Self> {
        if sigma.rank() != group.rank() {
            return Err(Error::InvalidAutomorphism(format!(
                "automorphism of rank {} used with a rank {} group",
                sigma.rank(),
                group.rank()
            )));
        }
        let mut pieces = Vec::new();
        for j in Subset::all(group.rank()) {
            for w in group.minimal_coset_reps(sigma.apply_subset(j)) {
                let core = core(&group, &sigma, j, w)?;
                let id = piece_id(&group, j, w);
                pieces.push(TwistedPiece { j, w, core, id });
            }
        }
        let by_key = pieces.iter().enumerate().map(|(k, p)| ((p.j, p.w), k)).collect();
        let closures = (0..pieces.len()).map(|_| OnceLock::new()).collect();
        Ok(PieceContext { group, sigma, pieces, by_key, closures })
    }

    pub fn group(&self) -> &WeylGroup {
        &self.group
    }

    pub fn group_arc(&self) -> Arc<WeylGroup> {
        Arc::clone(&self.group)
    }

    pub fn sigma(&self) -> &DiagramAutomorphism {
        &self.sigma
    }

    pub fn type_label(&self) -> String {
        self.group.root_system().type_label()
    }

    pub fn pieces(&self) -> &[TwistedPiece] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn piece(&self, k: usize) -> &TwistedPiece {
        &self.pieces[k]
    }

    pub fn index_of(&self, j: Subset, w: WeylElement) -> Option<usize> {
        self.by_key.get(&(j, w)).copied()
    }

    /// Look up a piece by its textual ID. Non-canonical words are accepted.
    pub fn parse_id(&self, s: &str) -> Result<usize> {
        let bad = || Error::ParsePiece(s.to_string());
        let (j_part, w_part) = s.trim().split_once(';').ok_or_else(bad)?;
        let j_text = j_part.trim().strip_prefix("J=").ok_or_else(bad)?;
        let w_text = w_part.trim().strip_prefix("w=").ok_or_else(bad)?;
        let j = parse_braced(j_text, self.group.rank()).ok_or_else(bad)?;
        let w = self.group.parse(w_text).map_err(|_| bad())?;
        self.index_of(j, w).ok_or_else(bad)
    }

    /// Expected piece count `sum_J |W| / |W_{sigma(J)}|`.
    pub fn expected_count(&self) -> usize {
        let size = self.group.size();
        Subset::all(self.group.rank())
            .map(|j| size / self.group.parabolic_elements(self.sigma.apply_subset(j)).len())
            .sum()
    }

    pub fn closure_leq(&self, j: Subset, w: WeylElement, w_prime: WeylElement) -> bool {
        closure_leq(&self.group, &self.sigma, j, w, w_prime)
    }

    /// Pieces `(J', w')` with `J' ⊆ J` and `w' <=_{J,sigma} w`, as a bitset over piece indices.
    pub fn closure_set(&self, p: usize) -> &FixedBitSet {
        self.closures[p].get_or_init(|| {
            let piece = &self.pieces[p];
            let mut upper = FixedBitSet::with_capacity(self.group.size());
            for m in twisted_conjugates(&self.group, &self.sigma, piece.j, piece.w) {
                upper.union_with(self.group.bruhat_upper_set(m));
            }
            let mut out = FixedBitSet::with_capacity(self.pieces.len());
            for (k, q) in self.pieces.iter().enumerate() {
                if q.j.is_subset(piece.j) && upper.contains(q.w.id()) {
                    out.insert(k);
                }
            }
            out
        })
    }

    /// Closure members of piece `p`, ordered by piece index.
    pub fn closure(&self, p: usize) -> Vec<usize> {
        self.closure_set(p).ones().collect()
    }

    pub fn in_closure(&self, q: usize, p: usize) -> bool {
        self.closure_set(p).contains(q)
    }

    /// Cover relations of `q <= p ⟺ q ∈ closure(p)`.
    pub fn closure_poset(&self) -> Result<ClosurePoset> {
        let n = self.pieces.len();
        for p in 0..n {
            for q in self.closure_set(p).ones() {
                if q != p && self.in_closure(p, q) {
                    return Err(Error::Inconsistent(format!(
                        "closure relation is not antisymmetric on {} and {}",
                        self.pieces[p].id, self.pieces[q].id
                    )));
                }
            }
        }
        let mut covers = Vec::new();
        for p in 0..n {
            let mut strict = self.closure_set(p).clone();
            strict.set(p, false);
            let mut below_strict = FixedBitSet::with_capacity(n);
            for r in strict.ones() {
                let mut lower = self.closure_set(r).clone();
                lower.set(r, false);
                below_strict.union_with(&lower);
            }
            strict.difference_with(&below_strict);
            covers.extend(strict.ones().map(|q| (p, q)));
        }

        let mut graph = DiGraph::<usize, ()>::with_capacity(n, covers.len());
        let nodes: Vec<_> = (0..n).map(|k| graph.add_node(k)).collect();
        for &(p, q) in &covers {
            graph.add_edge(nodes[p], nodes[q], ());
        }
        if toposort(&graph, None).is_err() {
            return Err(Error::Inconsistent("closure poset has a cycle".into()));
        }

        let mut node_ids: Vec<String> = self.pieces.iter().map(|p| p.id.clone()).collect();
        node_ids.sort();
        let mut edges: Vec<(String, String)> =
            covers.iter().map(|&(p, q)| (self.pieces[p].id.clone(), self.pieces[q].id.clone())).collect();
        edges.sort();
        Ok(ClosurePoset {
            type_label: self.type_label(),
            automorphism: self.sigma.spec_string(),
            nodes: node_ids,
            covers: edges,
        })
    }

    /// Pieces `(J, w)` with `e <=_{J,sigma} w` but `w != e`; expected empty.
    pub fn verify_openness(&self) -> OpennessReport {
        let e = self.group.identity();
        let counterexamples: Vec<String> =
            self.pieces.iter().filter(|p| p.w != e && self.closure_leq(p.j, p.w, e)).map(|p| p.id.clone()).collect();
        OpennessReport {
            type_label: self.type_label(),
            automorphism: self.sigma.spec_string(),
            pieces_checked: self.pieces.len(),
            pass: counterexamples.is_empty(),
            counterexamples,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosurePoset {
    #[serde(rename = "type")]
    pub type_label: String,
    pub automorphism: String,
    /// Piece IDs, sorted.
    pub nodes: Vec<String>,
    /// `(upper, lower)` cover pairs, sorted.
    pub covers: Vec<(String, String)>,
}

impl ClosurePoset {
    /// Nodes with nothing above them.
    pub fn maximal(&self) -> Vec<&str> {
        self.nodes.iter().filter(|n| !self.covers.iter().any(|(_, lower)| lower == *n)).map(String::as_str).collect()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"closure_poset_{}_{}\" {{", self.type_label, self.automorphism);
        for n in &self.nodes {
            let _ = writeln!(out, "  \"{n}\";");
        }
        for (upper, lower) in &self.covers {
            let _ = writeln!(out, "  \"{upper}\" -> \"{lower}\";");
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OpennessReport {
    #[serde(rename = "type")]
    pub type_label: String,
    pub automorphism: String,
    pub pieces_checked: usize,
    pub pass: bool,
    pub counterexamples: Vec<String>,
}
