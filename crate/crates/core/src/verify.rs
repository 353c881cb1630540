//! Verification suites and the registry of check names they emit.

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use serde_json::{json, Value};

use crate::check::CheckResult;
use crate::error::{Error, Result};
use crate::git_locus::{regular_samples, verify_nilcone_identities, verify_semistable_partition};
use crate::pgl2_oracle::oracle_report;
use crate::pieces::{core, is_piece_index, PieceContext};
use crate::quotient_strata::verify_quotient;
use crate::rootsys::{DiagramAutomorphism, RootSystem};
use crate::subset::Subset;
use crate::weyl::{WeylElement, WeylGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Bruhat,
    Pieces,
    Git,
    Quotient,
    Pgl2,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Bruhat, Suite::Pieces, Suite::Git, Suite::Quotient, Suite::Pgl2];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bruhat => "bruhat",
            Suite::Pieces => "pieces",
            Suite::Git => "git",
            Suite::Quotient => "quotient",
            Suite::Pgl2 => "pgl2",
        }
    }

    /// `"all"` expands to every suite.
    pub fn parse_selection(s: &str) -> Option<Vec<Suite>> {
        if s == "all" {
            return Some(Suite::ALL.to_vec());
        }
        Suite::ALL.iter().find(|x| x.name() == s).map(|&x| vec![x])
    }
}

/// Every check the suites emit, by suite. Parameterized checks are listed by
/// the name before the `[...]` suffix.
pub const REGISTRY: &[(Suite, &[&str])] = &[
    (
        Suite::Bruhat,
        &[
            "weyl.group_order",
            "weyl.length_parity",
            "weyl.bruhat_subword",
            "weyl.bruhat_partial_order",
            "weyl.parabolic_factorization",
            "weyl.support_word_independence",
            "weyl.twist_automorphism",
        ],
    ),
    (
        Suite::Pieces,
        &[
            "pieces.count",
            "pieces.distinct_ids",
            "pieces.core_maximal",
            "pieces.core_of_identity",
            "pieces.closure_reflexive",
            "pieces.closure_antisymmetric",
            "pieces.closure_idempotent",
            "pieces.closure_members_valid",
            "pieces.openness",
            "pieces.poset",
        ],
    ),
    (
        Suite::Git,
        &[
            "git.semistable_partition",
            "git.lambda_independence",
            "git.nilcone_union",
            "git.common_nilcone_intersection",
            "git.nilcone_monotone",
            "git.semistable_count",
            "git.unstable_locus_closed",
        ],
    ),
    (
        Suite::Quotient,
        &["quotient.cone_count", "quotient.action_law", "quotient.orbit_partition", "quotient.strata_match_pieces"],
    ),
    (
        Suite::Pgl2,
        &[
            "pgl2.swap_invariance",
            "pgl2.swap_injectivity",
            "pgl2.torus_conjugate_agreement",
            "pgl2.conjugation_invariance",
            "pgl2.classify_conjugation_invariance",
            "pgl2.nilpotent_iff_unstable",
            "pgl2.semistable_iff_w_e",
            "pgl2.unipotent_fiber",
            "pgl2.projective_scaling",
        ],
    ),
];

/// Check name without a `[...]` parameter suffix.
pub fn base_name(name: &str) -> &str {
    name.split('[').next().unwrap_or(name)
}

pub fn registered(suite: Suite) -> &'static [&'static str] {
    REGISTRY.iter().find(|(s, _)| *s == suite).map(|(_, names)| *names).unwrap_or(&[])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteCheck {
    pub suite: &'static str,
    #[serde(flatten)]
    pub check: CheckResult,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    #[serde(rename = "type")]
    pub type_label: String,
    pub automorphism: String,
    pub checks: Vec<SuiteCheck>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.check.pass)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub pgl2_samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { pgl2_samples: 1000, seed: 42 }
    }
}

/// The configurations exercised by `verify --matrix`.
pub const CONFIG_MATRIX: &[(&str, &str)] = &[
    ("A1", "id"),
    ("A2", "id"),
    ("A2", "1:2,2:1"),
    ("B2", "id"),
    ("G2", "id"),
    ("A3", "id"),
    ("A3", "1:3,3:1"),
    ("D4", "id"),
    ("D4", "3:4,4:3"),
    ("D4", "1:3,3:4,4:1"),
];

/// Run the selected suites for one `(group, sigma)` configuration.
pub fn run_suites(ctx: &PieceContext, suites: &[Suite], opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let mut push = |suite: Suite, list: Vec<CheckResult>| {
        checks.extend(list.into_iter().map(|check| SuiteCheck { suite: suite.name(), check }));
    };
    for &suite in suites {
        match suite {
            Suite::Bruhat => push(suite, weyl_checks(ctx.group())),
            Suite::Pieces => push(suite, piece_checks(ctx)),
            Suite::Git => {
                let mut list = verify_semistable_partition(ctx, &regular_samples(ctx.sigma()))?;
                list.extend(verify_nilcone_identities(ctx));
                push(suite, list)
            }
            Suite::Quotient => {
                let list = if ctx.sigma().is_identity() {
                    verify_quotient(ctx)?
                } else {
                    let untwisted =
                        PieceContext::new(ctx.group_arc(), DiagramAutomorphism::identity(ctx.group().rank()))?;
                    verify_quotient(&untwisted)?
                };
                push(suite, list)
            }
            Suite::Pgl2 => push(suite, oracle_report(opts.pgl2_samples, opts.seed).checks),
        }
    }
    Ok(VerifyReport { type_label: ctx.type_label(), automorphism: ctx.sigma().spec_string(), checks })
}

/// Build a piece context from textual specs.
pub fn context_for(type_spec: &str, auto_spec: &str, guard: u128) -> Result<PieceContext> {
    let rs = RootSystem::build_with_guard(type_spec, guard)?;
    let sigma = DiagramAutomorphism::parse(&rs, auto_spec)?;
    let group = WeylGroup::generate_with_guard(rs, guard)?;
    PieceContext::new(Arc::new(group), sigma)
}

fn first_failure<T>(items: impl IntoIterator<Item = T>, mut bad: impl FnMut(&T) -> Option<Value>) -> Option<Value> {
    items.into_iter().find_map(|x| bad(&x))
}

/// Elements reachable as products of subwords of `word`.
pub fn subword_products(g: &WeylGroup, word: &[usize]) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(g.size());
    set.insert(g.identity().id());
    for &i in word {
        let current: Vec<usize> = set.ones().collect();
        for x in current {
            set.insert(g.right_mul_simple(g.element(x).expect("in range"), i).id());
        }
    }
    set
}

/// Elements used as `y` for the Bruhat oracle: everything for small groups,
/// otherwise an evenly spaced sample plus the longest element.
fn bruhat_sample(g: &WeylGroup) -> Vec<WeylElement> {
    if g.size() <= 2000 {
        g.elements().collect()
    } else {
        let step = g.size() / 32;
        g.elements().step_by(step).chain([g.longest()]).collect()
    }
}

pub fn weyl_checks(g: &WeylGroup) -> Vec<CheckResult> {
    let rs = g.root_system();
    let mut out = Vec::new();

    let expected = rs.cartan_type().weyl_order();
    out.push(if g.size() as u128 == expected && rs.num_roots() == rs.cartan_type().root_count() {
        CheckResult::pass("weyl.group_order")
    } else {
        CheckResult::fail("weyl.group_order", json!({"size": g.size(), "expected": expected.to_string()}))
    });

    let parity_bad = first_failure(g.elements(), |&w| {
        (0..g.rank())
            .find(|&i| g.length(g.right_mul_simple(w, i)).abs_diff(g.length(w)) != 1)
            .map(|i| json!({"w": g.format(w), "i": i + 1}))
    });
    out.push(CheckResult::from_counterexample("weyl.length_parity", parity_bad));

    // subword property against one reduced word of y
    let subword_bad = first_failure(bruhat_sample(g), |&y| {
        let below = subword_products(g, &g.reduced_word(y));
        g.elements()
            .find(|&x| g.bruhat_leq(x, y) != below.contains(x.id()))
            .map(|x| json!({"x": g.format(x), "y": g.format(y)}))
    });
    out.push(CheckResult::from_counterexample("weyl.bruhat_subword", subword_bad));

    let order_bad = if g.size() <= 2000 {
        first_failure(g.elements(), |&x| {
            let up = g.bruhat_upper_set(x);
            if !up.contains(x.id()) {
                return Some(json!({"reflexivity": g.format(x)}));
            }
            for y in up.ones().filter(|&y| y != x.id()) {
                let y_el = g.element(y).expect("in range");
                let up_y = g.bruhat_upper_set(y_el);
                if up_y.contains(x.id()) {
                    return Some(json!({"antisymmetry": [g.format(x), g.format(y_el)]}));
                }
                if !up_y.is_subset(up) {
                    return Some(json!({"transitivity": [g.format(x), g.format(y_el)]}));
                }
            }
            None
        })
    } else {
        None
    };
    out.push(CheckResult::from_counterexample("weyl.bruhat_partial_order", order_bad));

    let factor_bad = first_failure(Subset::all(g.rank()), |&j| {
        let reps = g.minimal_coset_reps(j);
        let para = g.parabolic_elements(j);
        if reps.len() * para.len() != g.size() {
            return Some(json!({"J": j, "reps": reps.len(), "parabolic": para.len()}));
        }
        let mut hit = FixedBitSet::with_capacity(g.size());
        for &a in &reps {
            for &b in &para {
                let w = g.mul(a, b);
                if hit.put(w.id()) || g.length(w) != g.length(a) + g.length(b) {
                    return Some(json!({"J": j, "w^J": g.format(a), "w_J": g.format(b)}));
                }
            }
        }
        None
    });
    out.push(CheckResult::from_counterexample("weyl.parabolic_factorization", factor_bad));

    // Every reduced word of w starts with a left descent i followed by a
    // reduced word of s_i w, so this recursion covers all reduced words.
    let support_bad = first_failure(g.elements(), |&w| {
        (0..g.rank()).filter(|&i| g.is_left_descent(w, i)).find_map(|i| {
            let rest = g.support(g.left_mul_simple(w, i));
            let mut expect = rest;
            expect.insert(i);
            (g.support(w) != expect).then(|| json!({"w": g.format(w), "descent": i + 1}))
        })
    });
    out.push(CheckResult::from_counterexample("weyl.support_word_independence", support_bad));

    let mut autos = vec![DiagramAutomorphism::identity(g.rank())];
    autos.extend(diagram_automorphisms(rs).into_iter().filter(|a| !a.is_identity()));
    let twist_bad = first_failure(autos, |sigma| {
        if g.twist(sigma, g.identity()) != g.identity() {
            return Some(json!({"sigma": sigma.spec_string(), "identity": false}));
        }
        g.elements().find_map(|w| {
            let tw = g.twist(sigma, w);
            let hom = (0..g.rank())
                .all(|i| g.twist(sigma, g.right_mul_simple(w, i)) == g.right_mul_simple(tw, sigma.apply(i)));
            // root-level route: sigma w sigma^{-1}
            let by_roots = (0..rs.num_roots()).all(|k| {
                let pre = rs.root_index(&sigma.inverse().apply_root(rs.root(k))).expect("root");
                let img = rs.root(g.perm(w)[pre] as usize);
                rs.root_index(&sigma.apply_root(img)) == Some(g.perm(tw)[k] as usize)
            });
            (!hom || !by_roots || g.length(tw) != g.length(w))
                .then(|| json!({"sigma": sigma.spec_string(), "w": g.format(w)}))
        })
    });
    out.push(CheckResult::from_counterexample("weyl.twist_automorphism", twist_bad));
    out
}

/// All Cartan-preserving permutations of `I` (brute force over `rank!` permutations).
pub fn diagram_automorphisms(rs: &RootSystem) -> Vec<DiagramAutomorphism> {
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }
    if rs.rank() > 8 {
        return vec![DiagramAutomorphism::identity(rs.rank())];
    }
    let mut out: Vec<DiagramAutomorphism> =
        permutations(rs.rank()).into_iter().filter_map(|p| DiagramAutomorphism::new(rs, p).ok()).collect();
    out.sort_by(|a, b| a.perm().cmp(b.perm()));
    out
}

/// Largest sigma-stable subset of `j`.
fn sigma_stable_part(sigma: &DiagramAutomorphism, j: Subset) -> Subset {
    let mut k = j;
    loop {
        let next = k.intersection(sigma.apply_subset(k));
        if next == k {
            return k;
        }
        k = next;
    }
}

/// Pieces whose closures are checked for idempotence: all of them up to
/// 1000 pieces, otherwise 50 evenly spaced ones.
fn idempotence_sample(ctx: &PieceContext) -> Vec<usize> {
    if ctx.len() <= 1000 {
        (0..ctx.len()).collect()
    } else {
        let step = ctx.len() / 50;
        (0..ctx.len()).step_by(step).take(50).collect()
    }
}

pub fn closure_idempotence_counterexample(ctx: &PieceContext, sample: &[usize]) -> Option<Value> {
    sample.iter().find_map(|&p| {
        let cl = ctx.closure_set(p);
        cl.ones()
            .find(|&q| !ctx.closure_set(q).is_subset(cl))
            .map(|q| json!({"p": ctx.piece(p).id, "q": ctx.piece(q).id}))
    })
}

/// `wσ(K) = K` as sets of simple roots.
pub fn is_twist_stable(g: &WeylGroup, sigma: &DiagramAutomorphism, w: WeylElement, k: Subset) -> bool {
    let perm = g.perm(w);
    let image: Option<Vec<usize>> = k
        .iter()
        .map(|i| {
            let r = perm[sigma.apply(i)] as usize;
            (r < g.rank()).then_some(r)
        })
        .collect();
    image.is_some_and(|img| Subset::from_indices(img) == k)
}

pub fn piece_checks(ctx: &PieceContext) -> Vec<CheckResult> {
    let g = ctx.group();
    let sigma = ctx.sigma();
    let mut out = Vec::new();

    let expected = ctx.expected_count();
    out.push(if ctx.len() == expected {
        CheckResult::pass("pieces.count")
    } else {
        CheckResult::fail("pieces.count", json!({"got": ctx.len(), "expected": expected}))
    });

    let mut ids: Vec<&str> = ctx.pieces().iter().map(|p| p.id.as_str()).collect();
    ids.sort();
    let dup = ids.windows(2).find(|w| w[0] == w[1]).map(|w| json!({"id": w[0]}));
    out.push(CheckResult::from_counterexample("pieces.distinct_ids", dup));

    let core_bad = first_failure(ctx.pieces(), |p| {
        if !p.core.is_subset(p.j) || !is_twist_stable(g, sigma, p.w, p.core) {
            return Some(json!({"piece": p.id, "core": p.core}));
        }
        p.j.subsets()
            .find(|&k| is_twist_stable(g, sigma, p.w, k) && !k.is_subset(p.core))
            .map(|k| json!({"piece": p.id, "core": p.core, "larger": k}))
    });
    out.push(CheckResult::from_counterexample("pieces.core_maximal", core_bad));

    let id_core_bad = first_failure(Subset::all(g.rank()), |&j| {
        let c = core(g, sigma, j, g.identity()).ok()?;
        let expect = if sigma.is_identity() { j } else { sigma_stable_part(sigma, j) };
        (c != expect).then(|| json!({"J": j, "core": c}))
    });
    out.push(CheckResult::from_counterexample("pieces.core_of_identity", id_core_bad));

    let refl_bad = (0..ctx.len()).find(|&p| !ctx.in_closure(p, p)).map(|p| json!({"piece": ctx.piece(p).id}));
    out.push(CheckResult::from_counterexample("pieces.closure_reflexive", refl_bad));

    let anti_bad = (0..ctx.len()).find_map(|p| {
        ctx.closure_set(p)
            .ones()
            .find(|&q| q != p && ctx.in_closure(p, q))
            .map(|q| json!({"p": ctx.piece(p).id, "q": ctx.piece(q).id}))
    });
    out.push(CheckResult::from_counterexample("pieces.closure_antisymmetric", anti_bad));

    out.push(CheckResult::from_counterexample(
        "pieces.closure_idempotent",
        closure_idempotence_counterexample(ctx, &idempotence_sample(ctx)),
    ));

    let members_bad = (0..ctx.len()).find_map(|p| {
        let piece = ctx.piece(p);
        ctx.closure_set(p).ones().find_map(|q| {
            let m = ctx.piece(q);
            let ok =
                m.j.is_subset(piece.j) && is_piece_index(g, sigma, m.j, m.w) && ctx.closure_leq(piece.j, piece.w, m.w);
            (!ok).then(|| json!({"p": piece.id, "member": m.id}))
        })
    });
    out.push(CheckResult::from_counterexample("pieces.closure_members_valid", members_bad));

    let open = ctx.verify_openness();
    out.push(if open.pass {
        CheckResult::pass("pieces.openness")
    } else {
        CheckResult::fail("pieces.openness", json!({"counterexamples": open.counterexamples}))
    });

    let top = format!("J={};w=e", g.root_system().index_set());
    let poset_bad = match ctx.closure_poset() {
        Err(Error::Inconsistent(msg)) => Some(json!({"error": msg})),
        Err(e) => Some(json!({"error": e.to_string()})),
        Ok(poset) => {
            let max = poset.maximal();
            (max != [top.as_str()]).then(|| json!({"maximal": max}))
        }
    };
    out.push(CheckResult::from_counterexample("pieces.poset", poset_bad));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_covers_every_emitted_check() {
        let ctx = context_for("A2", "id", crate::rootsys::DEFAULT_GROUP_GUARD).unwrap();
        let report = run_suites(&ctx, &Suite::ALL, &VerifyOptions { pgl2_samples: 50, seed: 1 }).unwrap();
        for suite in Suite::ALL {
            let mut emitted: Vec<&str> =
                report.checks.iter().filter(|c| c.suite == suite.name()).map(|c| base_name(&c.check.name)).collect();
            emitted.dedup();
            let mut listed = registered(suite).to_vec();
            emitted.sort();
            emitted.dedup();
            listed.sort();
            assert_eq!(emitted, listed, "suite {}", suite.name());
        }
        assert!(report.pass(), "{report:#?}");
    }

    #[test]
    fn suite_selection() {
        assert_eq!(Suite::parse_selection("all").unwrap().len(), 5);
        assert_eq!(Suite::parse_selection("git"), Some(vec![Suite::Git]));
        assert_eq!(Suite::parse_selection("nope"), None);
    }

    #[test]
    fn automorphism_groups_of_small_diagrams() {
        let count = |t: &str| diagram_automorphisms(&RootSystem::build(t).unwrap()).len();
        assert_eq!(count("A1"), 1);
        assert_eq!(count("A2"), 2);
        assert_eq!(count("A3"), 2);
        assert_eq!(count("B3"), 1);
        assert_eq!(count("D4"), 6);
        assert_eq!(count("D5"), 2);
        assert_eq!(count("E6"), 2);
    }

    #[test]
    fn subword_products_of_longest_word_cover_the_group() {
        let ctx = context_for("B2", "id", crate::rootsys::DEFAULT_GROUP_GUARD).unwrap();
        let g = ctx.group();
        assert_eq!(subword_products(g, &g.reduced_word(g.longest())).count_ones(..), 8);
        assert_eq!(subword_products(g, &[]).count_ones(..), 1);
    }
}
