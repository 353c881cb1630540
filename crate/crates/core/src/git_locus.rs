//! Nilpotent cones and the semistable locus, as sets of pieces.
//!
//! A piece `(J, w)` lies in the nilpotent cone of a sigma-stable dominant
//! weight `lambda` iff `supp(w)` meets `I(lambda)`. The semistable locus is
//! the union of the pieces with `w = e`.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::json;

use crate::check::CheckResult;
use crate::error::{Error, Result};
use crate::pieces::PieceContext;
use crate::rootsys::{weight_predicates, DiagramAutomorphism, Weight};
use crate::subset::Subset;

fn validate(ctx: &PieceContext, lambda: &Weight, need_regular: bool) -> Result<Subset> {
    let info = weight_predicates(ctx.group().root_system(), ctx.sigma(), lambda)?;
    if !info.dominant {
        return Err(Error::NotDominant(lambda.to_string()));
    }
    if !info.sigma_stable {
        return Err(Error::NotSigmaStable(lambda.to_string()));
    }
    if need_regular && !info.regular {
        return Err(Error::NotRegular(lambda.to_string()));
    }
    Ok(info.support)
}

fn nilcone_for_support(ctx: &PieceContext, support: Subset) -> Vec<usize> {
    let g = ctx.group();
    ctx.pieces()
        .iter()
        .enumerate()
        .filter(|(_, p)| !g.support(p.w).intersection(support).is_empty())
        .map(|(k, _)| k)
        .collect()
}

/// Pieces in `N(lambda)_sigma`; `lambda` must be dominant and sigma-stable.
pub fn nilcone_pieces(ctx: &PieceContext, lambda: &Weight) -> Result<Vec<usize>> {
    let support = validate(ctx, lambda, false)?;
    Ok(nilcone_for_support(ctx, support))
}

/// Pieces with `w = e`.
pub fn semistable_pieces(ctx: &PieceContext) -> Vec<usize> {
    let e = ctx.group().identity();
    ctx.pieces().iter().enumerate().filter(|(_, p)| p.w == e).map(|(k, _)| k).collect()
}

/// Pieces with `supp(w) = I`.
pub fn common_nilcone(ctx: &PieceContext) -> Vec<usize> {
    let g = ctx.group();
    let full = g.root_system().index_set();
    ctx.pieces().iter().enumerate().filter(|(_, p)| g.support(p.w) == full).map(|(k, _)| k).collect()
}

/// Pieces whose `supp(w)` meets every sigma-orbit on `I`: the intersection of
/// all nonzero sigma-stable nilpotent cones. Equals [`common_nilcone`] when
/// sigma is the identity.
pub fn orbitwise_common_nilcone(ctx: &PieceContext) -> Vec<usize> {
    let g = ctx.group();
    let orbits = ctx.sigma().orbits();
    ctx.pieces()
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            let supp = g.support(p.w);
            orbits.iter().all(|o| !o.intersection(supp).is_empty())
        })
        .map(|(k, _)| k)
        .collect()
}

/// `sum_{i ∈ O} omega_i` for each sigma-orbit `O` on `I`.
pub fn orbit_weights(sigma: &DiagramAutomorphism) -> Vec<Weight> {
    sigma.orbits().into_iter().map(|o| Weight::indicator(sigma.rank(), o)).collect()
}

/// Every sigma-stable weight with entries in `{lo..=hi}`, one value per sigma-orbit.
pub fn stable_weights_in_range(sigma: &DiagramAutomorphism, lo: i64, hi: i64) -> Vec<Weight> {
    let orbits = sigma.orbits();
    let span = (hi - lo + 1) as usize;
    let total = span.pow(orbits.len() as u32);
    (0..total)
        .map(|mut code| {
            let mut coeffs = vec![0i64; sigma.rank()];
            for o in &orbits {
                let v = lo + (code % span) as i64;
                code /= span;
                for i in o.iter() {
                    coeffs[i] = v;
                }
            }
            Weight::new(coeffs)
        })
        .collect()
}

/// Regular sigma-stable weights with entries in `{1, 2}`.
pub fn regular_samples(sigma: &DiagramAutomorphism) -> Vec<Weight> {
    stable_weights_in_range(sigma, 1, 2)
}

fn ids(ctx: &PieceContext, set: &[usize]) -> Vec<String> {
    let mut out: Vec<String> = set.iter().map(|&k| ctx.piece(k).id.clone()).collect();
    out.sort();
    out
}

fn complement(ctx: &PieceContext, set: &[usize]) -> Vec<usize> {
    let mut mask = vec![true; ctx.len()];
    for &k in set {
        mask[k] = false;
    }
    (0..ctx.len()).filter(|&k| mask[k]).collect()
}

/// For each regular sigma-stable `lambda`: the semistable pieces are exactly the
/// complement of `N(lambda)_sigma`, and that complement does not depend on `lambda`.
pub fn verify_semistable_partition(ctx: &PieceContext, samples: &[Weight]) -> Result<Vec<CheckResult>> {
    let semistable = semistable_pieces(ctx);
    let mut checks = Vec::new();
    let mut complements: Vec<(String, Vec<usize>)> = Vec::new();
    for lambda in samples {
        let support = validate(ctx, lambda, true)?;
        let comp = complement(ctx, &nilcone_for_support(ctx, support));
        let name = format!("git.semistable_partition[{lambda}]");
        checks.push(if comp == semistable {
            CheckResult::pass(name)
        } else {
            CheckResult::fail(
                name,
                json!({"lambda": lambda.to_string(), "complement": ids(ctx, &comp), "semistable": ids(ctx, &semistable)}),
            )
        });
        complements.push((lambda.to_string(), comp));
    }
    let mismatch = complements.windows(2).find(|w| w[0].1 != w[1].1);
    checks.push(CheckResult::from_counterexample(
        "git.lambda_independence",
        mismatch.map(|w| json!({"lambda_a": w[0].0, "lambda_b": w[1].0})),
    ));
    Ok(checks)
}

/// Remaining nilpotent-cone identities: the union over orbit weights, the
/// intersection over orbit weights, monotonicity in `I(lambda)`, the
/// semistable count, and closedness of the unstable locus.
pub fn verify_nilcone_identities(ctx: &PieceContext) -> Vec<CheckResult> {
    let e = ctx.group().identity();
    let n = ctx.len();
    let mut checks = Vec::new();

    let orbit_sets: Vec<Vec<bool>> = orbit_weights(ctx.sigma())
        .iter()
        .map(|l| {
            let mut mask = vec![false; n];
            for k in nilcone_for_support(ctx, l.support()) {
                mask[k] = true;
            }
            mask
        })
        .collect();

    let union_bad = (0..n).find(|&k| {
        let in_union = orbit_sets.iter().any(|m| m[k]);
        in_union != (ctx.piece(k).w != e)
    });
    checks.push(CheckResult::from_counterexample(
        "git.nilcone_union",
        union_bad.map(|k| json!({"piece": ctx.piece(k).id})),
    ));

    // For twisted sigma only orbit-unions occur as supports, so the
    // intersection is the orbitwise set; at sigma = id it must be supp(w) = I.
    let mut common = vec![false; n];
    for k in orbitwise_common_nilcone(ctx) {
        common[k] = true;
    }
    let mut inter_bad =
        (0..n).find(|&k| orbit_sets.iter().all(|m| m[k]) != common[k]).map(|k| json!({"piece": ctx.piece(k).id}));
    if inter_bad.is_none() && ctx.sigma().is_identity() {
        let full = common_nilcone(ctx);
        let orbitwise = orbitwise_common_nilcone(ctx);
        if full != orbitwise {
            inter_bad = Some(json!({"full_support": ids(ctx, &full), "intersection": ids(ctx, &orbitwise)}));
        }
    }
    checks.push(CheckResult::from_counterexample("git.common_nilcone_intersection", inter_bad));

    let mut samples = stable_weights_in_range(ctx.sigma(), 0, 1);
    samples.extend(regular_samples(ctx.sigma()));
    let cones: Vec<Vec<bool>> = samples
        .iter()
        .map(|l| {
            let mut mask = vec![false; n];
            for k in nilcone_for_support(ctx, l.support()) {
                mask[k] = true;
            }
            mask
        })
        .collect();
    let mut mono_bad = None;
    'outer: for (a, la) in samples.iter().enumerate() {
        for (b, lb) in samples.iter().enumerate() {
            if la.support().is_subset(lb.support()) {
                if let Some(k) = (0..n).find(|&k| cones[a][k] && !cones[b][k]) {
                    mono_bad = Some(json!({
                        "lambda": la.to_string(),
                        "mu": lb.to_string(),
                        "piece": ctx.piece(k).id,
                    }));
                    break 'outer;
                }
            }
        }
    }
    checks.push(CheckResult::from_counterexample("git.nilcone_monotone", mono_bad));

    let semistable = semistable_pieces(ctx);
    let expected = 1usize << ctx.group().rank();
    checks.push(if semistable.len() == expected {
        CheckResult::pass("git.semistable_count")
    } else {
        CheckResult::fail("git.semistable_count", json!({"got": semistable.len(), "expected": expected}))
    });

    // the unstable pieces form a closed set
    let mut closed_bad = None;
    for (p, piece) in ctx.pieces().iter().enumerate() {
        if piece.w == e {
            continue;
        }
        if let Some(q) = ctx.closure_set(p).ones().find(|&q| ctx.piece(q).w == e) {
            closed_bad = Some(json!({"piece": piece.id, "semistable_in_closure": ctx.piece(q).id}));
            break;
        }
    }
    checks.push(CheckResult::from_counterexample("git.unstable_locus_closed", closed_bad));
    checks
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocusReport {
    #[serde(rename = "type")]
    pub type_label: String,
    pub automorphism: String,
    #[serde(rename = "semistable")]
    pub semistable_ids: Vec<String>,
    #[serde(rename = "nilcone")]
    pub nilcone_ids: BTreeMap<String, Vec<String>>,
    #[serde(rename = "common_nilcone")]
    pub common_nilcone_ids: Vec<String>,
    pub checks: Vec<CheckSummary>,
}

/// Build the full locus report. Weights must be dominant and sigma-stable;
/// regular ones additionally take part in the partition check.
pub fn locus_report(ctx: &PieceContext, weights: &[Weight]) -> Result<LocusReport> {
    let mut nilcone_ids = BTreeMap::new();
    let mut regular = Vec::new();
    for lambda in weights {
        let set = nilcone_pieces(ctx, lambda)?;
        nilcone_ids.insert(lambda.to_string(), ids(ctx, &set));
        if lambda.coeffs.iter().all(|&a| a > 0) {
            regular.push(lambda.clone());
        }
    }
    let mut checks = if regular.is_empty() { Vec::new() } else { verify_semistable_partition(ctx, &regular)? };
    checks.extend(verify_nilcone_identities(ctx));
    Ok(LocusReport {
        type_label: ctx.type_label(),
        automorphism: ctx.sigma().spec_string(),
        semistable_ids: ids(ctx, &semistable_pieces(ctx)),
        nilcone_ids,
        common_nilcone_ids: ids(ctx, &common_nilcone(ctx)),
        checks: checks.into_iter().map(|c| CheckSummary { name: c.name, pass: c.pass }).collect(),
    })
}
