mod common;

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use common::*;
use stablepieces::pieces::{core, PieceContext};
use stablepieces::verify::diagram_automorphisms;
use stablepieces::{weight_predicates, DiagramAutomorphism, RootSystem, Subset, Weight, WeylGroup};

const TYPES: &[&str] = &["A1", "A2", "A3", "A4", "B2", "B3", "C3", "D4", "G2", "F4"];

fn group(t: &str) -> Arc<WeylGroup> {
    static CACHE: OnceLock<Vec<Arc<WeylGroup>>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        TYPES.iter().map(|t| Arc::new(WeylGroup::generate(RootSystem::build(t).unwrap()).unwrap())).collect()
    });
    Arc::clone(&all[TYPES.iter().position(|x| *x == t).unwrap()])
}

fn type_strategy() -> impl Strategy<Value = &'static str> {
    prop::sample::select(TYPES)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_closed_under_negation_and_reflection(t in type_strategy(), i in 0usize..8) {
        let g = group(t);
        let rs = g.root_system();
        let i = i % rs.rank();
        prop_assert_eq!(rs.num_roots(), 2 * rs.positive_count());
        prop_assert_eq!(rs.num_roots(), rs.cartan_type().root_count());
        for (k, beta) in rs.roots().iter().enumerate() {
            let neg: Vec<i32> = beta.iter().map(|x| -x).collect();
            prop_assert_eq!(rs.root_index(&neg), Some(rs.negate_index(k)));
            let r = rs.reflect(i, beta).unwrap();
            prop_assert!(rs.root_index(&r).is_some());
            prop_assert_eq!(rs.reflect(i, &r).unwrap(), beta.clone());
            let positive = beta.iter().all(|&x| x >= 0);
            prop_assert_eq!(positive, rs.is_positive_index(k));
        }
    }

    #[test]
    fn diagram_automorphisms_preserve_positivity(t in type_strategy()) {
        let g = group(t);
        let rs = g.root_system();
        for sigma in diagram_automorphisms(rs) {
            for (k, beta) in rs.roots().iter().enumerate() {
                let image = rs.root_index(&sigma.apply_root(beta));
                prop_assert!(image.is_some());
                prop_assert_eq!(rs.is_positive_index(image.unwrap()), rs.is_positive_index(k));
            }
        }
    }

    #[test]
    fn length_matches_inversions_and_words(t in type_strategy(), seed in any::<u64>()) {
        let g = group(t);
        let rs = g.root_system();
        let w = g.element((seed % g.size() as u64) as usize).unwrap();
        let p = as_perm(&g, w);
        prop_assert_eq!(g.length(w), inversions(rs, &p));
        let word = g.reduced_word(w);
        prop_assert_eq!(word.len(), g.length(w));
        prop_assert_eq!(word_perm(rs, &word), p.clone());
        prop_assert_eq!(g.parse(&g.format(w)).unwrap(), w);
        prop_assert_eq!(g.support(w), support_oracle(rs, &p));
        prop_assert_eq!(as_perm(&g, g.inv(w)), invert(&p));
    }

    #[test]
    fn multiplication_matches_permutations(t in type_strategy(), a in any::<u64>(), b in any::<u64>()) {
        let g = group(t);
        let x = g.element((a % g.size() as u64) as usize).unwrap();
        let y = g.element((b % g.size() as u64) as usize).unwrap();
        prop_assert_eq!(as_perm(&g, g.mul(x, y)), compose(&as_perm(&g, x), &as_perm(&g, y)));
        let lx = g.length(x) as i64;
        let ly = g.length(y) as i64;
        let lxy = g.length(g.mul(x, y)) as i64;
        prop_assert!(lxy <= lx + ly && lxy >= (lx - ly).abs());
        prop_assert_eq!((lx + ly - lxy) % 2, 0);
    }

    #[test]
    fn bruhat_is_compatible_with_length_and_inverse(t in type_strategy(), a in any::<u64>(), b in any::<u64>()) {
        let g = group(t);
        let x = g.element((a % g.size() as u64) as usize).unwrap();
        let y = g.element((b % g.size() as u64) as usize).unwrap();
        let leq = g.bruhat_leq(x, y);
        if leq {
            prop_assert!(g.length(x) <= g.length(y));
        }
        prop_assert_eq!(leq, g.bruhat_leq(g.inv(x), g.inv(y)));
        // Multiplying by the longest element reverses the order.
        let w0 = g.longest();
        prop_assert_eq!(leq, g.bruhat_leq(g.mul(y, w0), g.mul(x, w0)));
        prop_assert!(g.bruhat_leq(g.identity(), x) && g.bruhat_leq(x, w0));
    }

    #[test]
    fn coset_factorization(t in type_strategy(), bits in any::<u32>(), a in any::<u64>()) {
        let g = group(t);
        let j = Subset::from_bits(bits & g.root_system().index_set().bits());
        let w = g.element((a % g.size() as u64) as usize).unwrap();
        let rep = g.min_coset_rep(w, j);
        prop_assert!(g.is_minimal_rep(rep, j));
        let rest = g.mul(g.inv(rep), w);
        prop_assert!(g.support(rest).is_subset(j));
        prop_assert_eq!(g.length(w), g.length(rep) + g.length(rest));
    }

    #[test]
    fn weight_predicates_follow_definitions(coeffs in prop::collection::vec(-2i64..3, 3)) {
        let rs = RootSystem::build("A3").unwrap();
        let swap = DiagramAutomorphism::parse(&rs, "1:3,3:1").unwrap();
        let info = weight_predicates(&rs, &swap, &Weight::new(coeffs.clone())).unwrap();
        prop_assert_eq!(info.dominant, coeffs.iter().all(|&a| a >= 0));
        prop_assert_eq!(info.regular, coeffs.iter().all(|&a| a > 0));
        prop_assert_eq!(info.sigma_stable, coeffs[0] == coeffs[2]);
        prop_assert_eq!(info.support.one_based(), (1..=3).filter(|&i| coeffs[i - 1] != 0).collect::<Vec<_>>());
    }
}

/// The core is the largest `K ⊆ J` with `w sigma(K) = K`, checked against
/// every subset of `J`.
#[test]
fn core_is_maximal_over_all_subsets() {
    for (t, a) in [("A2", "id"), ("A2", "1:2,2:1"), ("B3", "id"), ("A3", "1:3,3:1"), ("D4", "1:3,3:4,4:1")] {
        let ctx = context(t, a);
        let g = ctx.group();
        let rs = g.root_system();
        for p in ctx.pieces() {
            let w = as_perm(g, p.w);
            let stable = |k: Subset| {
                let image: Subset = k
                    .iter()
                    .filter_map(|i| {
                        let r = w[ctx.sigma().apply(i)];
                        (r < rs.rank()).then_some(r)
                    })
                    .fold(Subset::EMPTY, |acc, r| acc.union(Subset::singleton(r)));
                image == k
            };
            let best = p.j.subsets().filter(|&k| stable(k)).fold(Subset::EMPTY, Subset::union);
            assert!(stable(best), "{t} {a} {}: union of stable sets is unstable", p.id);
            assert_eq!(p.core, best, "{t} {a} {}", p.id);
            assert_eq!(core(g, ctx.sigma(), p.j, p.w).unwrap(), best);
        }
    }
}

#[test]
fn pieces_are_valid_indices_with_distinct_ids() {
    for (t, a) in [("B3", "id"), ("C3", "id"), ("D4", "3:4,4:3"), ("A4", "1:4,2:3,3:2,4:1")] {
        let ctx: PieceContext = context(t, a);
        let g = ctx.group();
        let rs = g.root_system();
        assert_eq!(ctx.len(), ctx.expected_count());
        let mut ids: Vec<&str> = ctx.pieces().iter().map(|p| p.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), ctx.len());
        for p in ctx.pieces() {
            let w = as_perm(g, p.w);
            for j in ctx.sigma().apply_subset(p.j).iter() {
                assert!(rs.is_positive_index(w[j]), "{}", p.id);
            }
            assert_eq!(ctx.parse_id(&p.id).unwrap(), ctx.index_of(p.j, p.w).unwrap());
        }
    }
}
