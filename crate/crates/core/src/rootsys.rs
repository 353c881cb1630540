//! Finite irreducible root systems of types A–G.
//!
//! Roots are integer coordinate vectors in the simple-root basis. The Cartan
//! matrix uses the convention `cartan[i][j] = <alpha_i^vee, alpha_j>`, so the
//! simple reflection is `s_i(beta) = beta - (sum_j cartan[i][j] * beta_j) alpha_i`.
//! Numbering of the Dynkin diagram follows Bourbaki.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::subset::{Subset, MAX_RANK};

/// Default upper bound on the Weyl group order accepted by [`RootSystem::build`].
pub const DEFAULT_GROUP_GUARD: u128 = 2_000_000;

/// Environment variable that overrides [`DEFAULT_GROUP_GUARD`] for the CLI.
pub const GUARD_ENV: &str = "STABLEPIECES_GROUP_GUARD";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }
}

/// A Cartan type such as `A3` or `D4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CartanType {
    pub family: Family,
    pub rank: usize,
}

impl CartanType {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B => rank >= 2,
            Family::C => rank >= 3,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if !ok || rank > MAX_RANK {
            return Err(Error::InvalidRank { letter: family.letter(), rank });
        }
        Ok(CartanType { family, rank })
    }

    /// Order of the Weyl group, computed from the classical formulas.
    pub fn weyl_order(&self) -> u128 {
        let n = self.rank as u128;
        let fact = |k: u128| (1..=k).try_fold(1u128, |acc, x| acc.checked_mul(x));
        let sat = |x: Option<u128>| x.unwrap_or(u128::MAX);
        match self.family {
            Family::A => sat(fact(n + 1)),
            Family::B | Family::C => sat(fact(n).and_then(|f| f.checked_mul(1u128 << n.min(100)))),
            Family::D => sat(fact(n).and_then(|f| f.checked_mul(1u128 << (n - 1).min(100)))),
            Family::E => match n {
                6 => 51_840,
                7 => 2_903_040,
                _ => 696_729_600,
            },
            Family::F => 1_152,
            Family::G => 12,
        }
    }

    /// Number of roots from the classical formulas.
    pub fn root_count(&self) -> usize {
        let n = self.rank;
        match self.family {
            Family::A => n * (n + 1),
            Family::B | Family::C => 2 * n * n,
            Family::D => 2 * n * (n - 1),
            Family::E => match n {
                6 => 72,
                7 => 126,
                _ => 240,
            },
            Family::F => 48,
            Family::G => 12,
        }
    }

    pub fn cartan_matrix(&self) -> Vec<Vec<i32>> {
        let n = self.rank;
        let mut c = vec![vec![0i32; n]; n];
        for (i, row) in c.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut link = |i: usize, j: usize| {
            c[i][j] = -1;
            c[j][i] = -1;
        };
        match self.family {
            Family::A | Family::B | Family::C | Family::F | Family::G => {
                for i in 0..n - 1 {
                    link(i, i + 1);
                }
            }
            Family::D => {
                for i in 0..n - 2 {
                    link(i, i + 1);
                }
                link(n - 3, n - 1);
            }
            Family::E => {
                for (i, j) in [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)] {
                    if i < n && j < n {
                        link(i, j);
                    }
                }
            }
        }
        match self.family {
            // alpha_n short
            Family::B => c[n - 1][n - 2] = -2,
            // alpha_n long
            Family::C => c[n - 2][n - 1] = -2,
            Family::F => c[2][1] = -2,
            // alpha_1 short
            Family::G => c[0][1] = -3,
            _ => {}
        }
        c
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

impl FromStr for CartanType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return Err(Error::UnknownType(s.to_string())),
        };
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::UnknownType(s.to_string()));
        }
        let rank: usize = digits.parse().map_err(|_| Error::UnknownType(s.to_string()))?;
        CartanType::new(family, rank)
    }
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    cartan_type: CartanType,
    cartan: Vec<Vec<i32>>,
    /// Positive roots first (by height, ties broken by descending
    /// lexicographic order so that `alpha_1..alpha_n` come first), then
    /// their negatives in the same order.
    roots: Vec<Vec<i32>>,
    index: HashMap<Vec<i32>, usize>,
    positive_count: usize,
    /// `reflections[i][k]` is the index of `s_i(roots[k])`.
    reflections: Vec<Vec<usize>>,
}

impl RootSystem {
    /// Build the root system for a type string like `"A3"`, using the default guard.
    pub fn build(type_spec: &str) -> Result<Self> {
        Self::build_with_guard(type_spec, DEFAULT_GROUP_GUARD)
    }

    pub fn build_with_guard(type_spec: &str, guard: u128) -> Result<Self> {
        let cartan_type: CartanType = type_spec.parse()?;
        Self::from_type(cartan_type, guard)
    }

    pub fn from_type(cartan_type: CartanType, guard: u128) -> Result<Self> {
        let estimated = cartan_type.weyl_order();
        if estimated > guard {
            return Err(Error::GuardExceeded { estimated, guard });
        }
        let cartan = cartan_type.cartan_matrix();
        let n = cartan_type.rank;

        let simple = |i: usize| {
            let mut v = vec![0i32; n];
            v[i] = 1;
            v
        };
        let reflect_vec = |i: usize, beta: &[i32]| {
            let pairing: i32 = (0..n).map(|j| cartan[i][j] * beta[j]).sum();
            let mut out = beta.to_vec();
            out[i] -= pairing;
            out
        };

        let mut seen: HashMap<Vec<i32>, ()> = HashMap::new();
        let mut queue: VecDeque<Vec<i32>> = (0..n).map(simple).collect();
        for v in &queue {
            seen.insert(v.clone(), ());
        }
        while let Some(beta) = queue.pop_front() {
            for i in 0..n {
                let image = reflect_vec(i, &beta);
                if !seen.contains_key(&image) {
                    seen.insert(image.clone(), ());
                    queue.push_back(image);
                }
            }
        }

        let mut positive: Vec<Vec<i32>> = seen.into_keys().filter(|v| v.iter().all(|&c| c >= 0)).collect();
        positive.sort_by(|a, b| {
            let ha: i32 = a.iter().sum();
            let hb: i32 = b.iter().sum();
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });
        let positive_count = positive.len();
        let mut roots = positive.clone();
        roots.extend(positive.iter().map(|v| v.iter().map(|c| -c).collect::<Vec<_>>()));

        let index: HashMap<Vec<i32>, usize> = roots.iter().enumerate().map(|(k, v)| (v.clone(), k)).collect();
        if index.len() != 2 * positive_count {
            return Err(Error::Inconsistent("root table is not symmetric under negation".into()));
        }
        let reflections = (0..n)
            .map(|i| {
                roots
                    .iter()
                    .map(|beta| {
                        index
                            .get(&reflect_vec(i, beta))
                            .copied()
                            .ok_or_else(|| Error::Inconsistent("root table not closed under reflections".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(RootSystem { cartan_type, cartan, roots, index, positive_count, reflections })
    }

    pub fn cartan_type(&self) -> CartanType {
        self.cartan_type
    }

    pub fn type_label(&self) -> String {
        self.cartan_type.to_string()
    }

    pub fn rank(&self) -> usize {
        self.cartan_type.rank
    }

    pub fn cartan(&self) -> &[Vec<i32>] {
        &self.cartan
    }

    pub fn roots(&self) -> &[Vec<i32>] {
        &self.roots
    }

    pub fn root(&self, k: usize) -> &[i32] {
        &self.roots[k]
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn positive_count(&self) -> usize {
        self.positive_count
    }

    pub fn index_set(&self) -> Subset {
        Subset::full(self.rank())
    }

    pub fn root_index(&self, beta: &[i32]) -> Option<usize> {
        self.index.get(beta).copied()
    }

    pub fn is_positive_index(&self, k: usize) -> bool {
        k < self.positive_count
    }

    /// Index of `-roots[k]`.
    pub fn negate_index(&self, k: usize) -> usize {
        if k < self.positive_count {
            k + self.positive_count
        } else {
            k - self.positive_count
        }
    }

    /// Index of `s_i(roots[k])`.
    pub fn reflect_index(&self, i: usize, k: usize) -> usize {
        self.reflections[i][k]
    }

    /// `s_i(beta)` for a root `beta` given by coordinates.
    pub fn reflect(&self, i: usize, beta: &[i32]) -> Result<Vec<i32>> {
        if i >= self.rank() {
            return Err(Error::IndexOutOfRange { index: i + 1, rank: self.rank() });
        }
        let k = self.root_index(beta).ok_or_else(|| Error::NotARoot(beta.iter().map(|&c| c as i64).collect()))?;
        Ok(self.roots[self.reflections[i][k]].clone())
    }

    /// Height of a root: the sum of its coordinates.
    pub fn height(&self, k: usize) -> i32 {
        self.roots[k].iter().sum()
    }
}

/// A permutation of `I` preserving the Cartan matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiagramAutomorphism {
    perm: Vec<usize>,
    order: usize,
}

impl DiagramAutomorphism {
    pub fn identity(rank: usize) -> Self {
        DiagramAutomorphism { perm: (0..rank).collect(), order: 1 }
    }

    /// Validate a 0-based permutation against the Cartan matrix of `rs`.
    pub fn new(rs: &RootSystem, perm: Vec<usize>) -> Result<Self> {
        let n = rs.rank();
        if perm.len() != n {
            return Err(Error::InvalidAutomorphism(format!("expected {n} images, got {}", perm.len())));
        }
        let mut hit = vec![false; n];
        for &p in &perm {
            if p >= n || hit[p] {
                return Err(Error::InvalidAutomorphism("not a permutation".into()));
            }
            hit[p] = true;
        }
        let c = rs.cartan();
        for i in 0..n {
            for j in 0..n {
                if c[perm[i]][perm[j]] != c[i][j] {
                    return Err(Error::NotCartanPreserving);
                }
            }
        }
        let order = permutation_order(&perm);
        Ok(DiagramAutomorphism { perm, order })
    }

    /// Parse `"id"` or a list of 1-based `index:image` pairs such as `"1:3,2:2,3:1"`.
    /// Indices that are not listed are fixed.
    pub fn parse(rs: &RootSystem, spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let n = rs.rank();
        if spec.eq_ignore_ascii_case("id") {
            return Ok(Self::identity(n));
        }
        let mut perm: Vec<Option<usize>> = vec![None; n];
        for item in spec.split(',') {
            let (a, b) =
                item.split_once(':').ok_or_else(|| Error::InvalidAutomorphism(format!("bad entry `{item}`")))?;
            let parse = |t: &str| -> Result<usize> {
                let v: usize = t.trim().parse().map_err(|_| Error::InvalidAutomorphism(format!("bad index `{t}`")))?;
                if v == 0 || v > n {
                    return Err(Error::IndexOutOfRange { index: v, rank: n });
                }
                Ok(v - 1)
            };
            let (a, b) = (parse(a)?, parse(b)?);
            if perm[a].replace(b).is_some() {
                return Err(Error::InvalidAutomorphism(format!("index {} mapped twice", a + 1)));
            }
        }
        let perm = perm.iter().enumerate().map(|(i, p)| p.unwrap_or(i)).collect();
        Self::new(rs, perm)
    }

    pub fn rank(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_identity(&self) -> bool {
        self.order == 1
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        DiagramAutomorphism { perm: inv, order: self.order }
    }

    /// Image of a subset of `I`.
    pub fn apply_subset(&self, s: Subset) -> Subset {
        s.map(&self.perm)
    }

    /// Image of a root vector: `sigma(sum b_i alpha_i) = sum b_i alpha_{sigma(i)}`.
    pub fn apply_root(&self, beta: &[i32]) -> Vec<i32> {
        let mut out = vec![0; beta.len()];
        for (i, &b) in beta.iter().enumerate() {
            out[self.perm[i]] = b;
        }
        out
    }

    /// Orbits of `sigma` on `I`, each as a subset, ordered by least element.
    pub fn orbits(&self) -> Vec<Subset> {
        let mut seen = Subset::EMPTY;
        let mut out = Vec::new();
        for i in 0..self.rank() {
            if seen.contains(i) {
                continue;
            }
            let mut orbit = Subset::EMPTY;
            let mut j = i;
            while !orbit.contains(j) {
                orbit.insert(j);
                j = self.perm[j];
            }
            seen = seen.union(orbit);
            out.push(orbit);
        }
        out
    }

    /// Canonical text form: `id` or the full 1-based mapping list.
    pub fn spec_string(&self) -> String {
        if self.is_identity() {
            return "id".into();
        }
        self.perm.iter().enumerate().map(|(i, p)| format!("{}:{}", i + 1, p + 1)).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for DiagramAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

fn permutation_order(perm: &[usize]) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let mut order = 1;
    let mut seen = vec![false; perm.len()];
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        order = order / gcd(order, len) * len;
    }
    order
}

/// A weight `sum a_i omega_i` in the fundamental-weight basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    pub coeffs: Vec<i64>,
}

impl Weight {
    pub fn new(coeffs: Vec<i64>) -> Self {
        Weight { coeffs }
    }

    /// Parse a comma-separated integer vector such as `1,0,2`.
    pub fn parse(s: &str) -> Option<Self> {
        s.split(',').map(|t| t.trim().parse::<i64>().ok()).collect::<Option<Vec<_>>>().map(Weight::new)
    }

    /// Sum of the fundamental weights indexed by `s`.
    pub fn indicator(rank: usize, s: Subset) -> Self {
        Weight::new((0..rank).map(|i| s.contains(i) as i64).collect())
    }

    /// `I(lambda) = { i : a_i != 0 }`.
    pub fn support(&self) -> Subset {
        Subset::from_indices(self.coeffs.iter().enumerate().filter(|(_, &a)| a != 0).map(|(i, _)| i))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|a| a.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightInfo {
    pub dominant: bool,
    pub regular: bool,
    pub sigma_stable: bool,
    pub support: Subset,
}

pub fn weight_predicates(rs: &RootSystem, sigma: &DiagramAutomorphism, lambda: &Weight) -> Result<WeightInfo> {
    let n = rs.rank();
    if lambda.coeffs.len() != n {
        return Err(Error::WeightLength { expected: n, got: lambda.coeffs.len() });
    }
    let a = &lambda.coeffs;
    Ok(WeightInfo {
        dominant: a.iter().all(|&x| x >= 0),
        regular: a.iter().all(|&x| x > 0),
        sigma_stable: (0..n).all(|i| a[sigma.apply(i)] == a[i]),
        support: lambda.support(),
    })
}
