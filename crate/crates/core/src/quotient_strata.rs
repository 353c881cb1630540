//! Torus-orbit strata of the closure of the maximal torus, modeled by the
//! cones `w C_J` of the Coxeter fan, and their `W`-orbits. Each orbit is one
//! stratum of the quotient and is matched with the semistable piece `(J, e)`.
//! Untwisted only.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use serde_json::json;

use crate::check::CheckResult;
use crate::error::{Error, Result};
use crate::pieces::{piece_id, PieceContext};
use crate::subset::Subset;
use crate::weyl::{WeylElement, WeylGroup};

/// The cone `rep · C_J`, named by the coset `rep W_J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoxeterCone {
    pub j: Subset,
    /// Minimal representative of the coset.
    pub rep: WeylElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientStratum {
    #[serde(rename = "J")]
    pub j: Subset,
    pub cone_count: usize,
    #[serde(rename = "piece")]
    pub matched_piece_id: String,
}

/// One cone per `(J, rep ∈ W^J)`, ordered by `J` bitmask then `rep` ID.
pub fn enumerate_cones(group: &WeylGroup) -> Vec<CoxeterCone> {
    Subset::all(group.rank())
        .flat_map(|j| group.minimal_coset_reps(j).into_iter().map(move |rep| CoxeterCone { j, rep }))
        .collect()
}

/// Left translation `v · rep W_J`.
pub fn act(group: &WeylGroup, v: WeylElement, c: CoxeterCone) -> CoxeterCone {
    CoxeterCone { j: c.j, rep: group.min_coset_rep(group.mul(v, c.rep), c.j) }
}

/// Partition `cones` into `W`-orbits, keyed by face type. Fails if an orbit
/// mixes face types or misses a cone of its type.
pub fn orbit_partition(group: &WeylGroup, cones: &[CoxeterCone]) -> Result<BTreeMap<Subset, Vec<CoxeterCone>>> {
    let position: std::collections::HashMap<CoxeterCone, usize> =
        cones.iter().enumerate().map(|(k, c)| (*c, k)).collect();
    let mut seen = FixedBitSet::with_capacity(cones.len());
    let mut out: BTreeMap<Subset, Vec<CoxeterCone>> = BTreeMap::new();
    for (start, &cone) in cones.iter().enumerate() {
        if seen.put(start) {
            continue;
        }
        let mut orbit = vec![cone];
        let mut frontier = vec![cone];
        while let Some(c) = frontier.pop() {
            for i in 0..group.rank() {
                let next = act(group, group.simple(i), c);
                let k = *position.get(&next).ok_or_else(|| {
                    Error::Inconsistent(format!("translate of a cone left the cone list (J={})", c.j))
                })?;
                if !seen.put(k) {
                    orbit.push(next);
                    frontier.push(next);
                }
            }
        }
        orbit.sort();
        let j = orbit[0].j;
        if orbit.iter().any(|c| c.j != j) {
            return Err(Error::Inconsistent("an orbit mixes cones of different face types".into()));
        }
        if out.insert(j, orbit).is_some() {
            return Err(Error::Inconsistent(format!("cones of type {j} split into several orbits")));
        }
    }
    Ok(out)
}

/// One stratum per `J`, matched with the semistable piece `(J, e)`.
pub fn quotient_strata(group: &WeylGroup) -> Result<Vec<QuotientStratum>> {
    let cones = enumerate_cones(group);
    let orbits = orbit_partition(group, &cones)?;
    Ok(orbits
        .into_iter()
        .map(|(j, orbit)| QuotientStratum {
            j,
            cone_count: orbit.len(),
            matched_piece_id: piece_id(group, j, group.identity()),
        })
        .collect())
}

/// Strata for a piece context; only the identity automorphism is allowed.
pub fn quotient_strata_for(ctx: &PieceContext) -> Result<Vec<QuotientStratum>> {
    if !ctx.sigma().is_identity() {
        return Err(Error::TwistedQuotient);
    }
    quotient_strata(ctx.group())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrataReport {
    pub strata: Vec<QuotientStratum>,
}

/// Checks for the cone model against an untwisted piece context.
pub fn verify_quotient(ctx: &PieceContext) -> Result<Vec<CheckResult>> {
    if !ctx.sigma().is_identity() {
        return Err(Error::TwistedQuotient);
    }
    let g = ctx.group();
    let cones = enumerate_cones(g);
    let mut checks = Vec::new();

    let expected: usize = Subset::all(g.rank()).map(|j| g.size() / g.parabolic_elements(j).len()).sum();
    checks.push(if cones.len() == expected && cones.len() == ctx.len() {
        CheckResult::pass("quotient.cone_count")
    } else {
        CheckResult::fail(
            "quotient.cone_count",
            json!({"cones": cones.len(), "formula": expected, "pieces": ctx.len()}),
        )
    });

    // act(s v, c) = act(s, act(v, c)) for simple s and all v implies the law
    // for all u by induction on the length of u.
    let mut law_bad = None;
    'outer: for i in 0..g.rank() {
        let s = g.simple(i);
        for v in g.elements() {
            let sv = g.mul(s, v);
            for &c in &cones {
                if act(g, sv, c) != act(g, s, act(g, v, c)) {
                    law_bad = Some(json!({"u": g.format(s), "v": g.format(v), "J": c.j, "rep": g.format(c.rep)}));
                    break 'outer;
                }
            }
        }
    }
    if law_bad.is_none() {
        law_bad = cones
            .iter()
            .find(|&&c| act(g, g.identity(), c) != c)
            .map(|c| json!({"identity_moves": g.format(c.rep), "J": c.j}));
    }
    checks.push(CheckResult::from_counterexample("quotient.action_law", law_bad));

    let partition = orbit_partition(g, &cones);
    let partition_bad = match &partition {
        Err(e) => Some(json!({"error": e.to_string()})),
        Ok(map) if map.len() != 1 << g.rank() => Some(json!({"orbits": map.len()})),
        Ok(map) => map.iter().find_map(|(j, orbit)| {
            let reps: Vec<WeylElement> = orbit.iter().map(|c| c.rep).collect();
            (reps != g.minimal_coset_reps(*j)).then(|| json!({"J": j}))
        }),
    };
    checks.push(CheckResult::from_counterexample("quotient.orbit_partition", partition_bad));

    let match_bad = match quotient_strata(g) {
        Err(e) => Some(json!({"error": e.to_string()})),
        Ok(strata) => strata.iter().find_map(|s| {
            let size_ok = s.cone_count * g.parabolic_elements(s.j).len() == g.size();
            let piece_ok = ctx.parse_id(&s.matched_piece_id).is_ok();
            (!size_ok || !piece_ok).then(|| json!({"J": s.j, "piece": s.matched_piece_id}))
        }),
    };
    checks.push(CheckResult::from_counterexample("quotient.strata_match_pieces", match_bad));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{DiagramAutomorphism, RootSystem};
    use std::sync::Arc;

    fn group(t: &str) -> WeylGroup {
        WeylGroup::generate(RootSystem::build(t).unwrap()).unwrap()
    }

    #[test]
    fn cone_counts() {
        let a1 = group("A1");
        let cones = enumerate_cones(&a1);
        let named: Vec<(String, String)> = cones.iter().map(|c| (c.j.to_string(), a1.format(c.rep))).collect();
        assert_eq!(named, [("{}".into(), "e".into()), ("{}".into(), "s1".into()), ("{1}".into(), "e".into())]);
        assert_eq!(enumerate_cones(&group("A2")).len(), 13);
        for t in ["B2", "G2", "A3"] {
            let g = group(t);
            let full = g.root_system().index_set();
            assert_eq!(enumerate_cones(&g).iter().filter(|c| c.j == full).count(), 1);
        }
    }

    #[test]
    fn act_examples() {
        let a2 = group("A2");
        let s1 = a2.simple(0);
        let e = a2.identity();
        let empty = CoxeterCone { j: Subset::EMPTY, rep: e };
        assert_eq!(act(&a2, e, empty), empty);
        assert_eq!(act(&a2, s1, empty), CoxeterCone { j: Subset::EMPTY, rep: s1 });
        let face = CoxeterCone { j: Subset::from_indices([0]), rep: e };
        assert_eq!(act(&a2, s1, face), face);
    }

    #[test]
    fn orbit_examples() {
        let a1 = group("A1");
        let orbits = orbit_partition(&a1, &enumerate_cones(&a1)).unwrap();
        assert_eq!(orbits.len(), 2);
        assert_eq!(orbits[&Subset::EMPTY].len(), 2);
        assert_eq!(orbits[&Subset::from_indices([0])].len(), 1);

        let a2 = group("A2");
        let orbits = orbit_partition(&a2, &enumerate_cones(&a2)).unwrap();
        assert_eq!(orbits.len(), 4);
        assert_eq!(orbits[&a2.root_system().index_set()].len(), 1);
    }

    #[test]
    fn incomplete_cone_list_is_inconsistent() {
        let a2 = group("A2");
        let mut cones = enumerate_cones(&a2);
        cones.remove(1);
        assert!(matches!(orbit_partition(&a2, &cones), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn strata_examples() {
        let a1 = group("A1");
        let strata = quotient_strata(&a1).unwrap();
        let pieces: Vec<&str> = strata.iter().map(|s| s.matched_piece_id.as_str()).collect();
        assert_eq!(pieces, ["J={};w=e", "J={1};w=e"]);
        assert_eq!(strata[0].cone_count, 2);
        let text = serde_json::to_string(&StrataReport { strata }).unwrap();
        assert_eq!(
            text,
            r#"{"strata":[{"J":[],"cone_count":2,"piece":"J={};w=e"},{"J":[1],"cone_count":1,"piece":"J={1};w=e"}]}"#
        );

        let a2 = group("A2");
        let strata = quotient_strata(&a2).unwrap();
        assert_eq!(strata.len(), 4);
        assert_eq!(strata.last().unwrap().matched_piece_id, "J={1,2};w=e");
    }

    #[test]
    fn twisted_context_rejected() {
        let rs = RootSystem::build("A2").unwrap();
        let swap = DiagramAutomorphism::parse(&rs, "1:2,2:1").unwrap();
        let ctx = PieceContext::new(Arc::new(WeylGroup::generate(rs).unwrap()), swap).unwrap();
        assert_eq!(quotient_strata_for(&ctx), Err(Error::TwistedQuotient));
        assert_eq!(verify_quotient(&ctx), Err(Error::TwistedQuotient));
    }
}
