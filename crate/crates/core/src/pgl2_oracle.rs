//! Concrete model for `G = PGL_2`: the wonderful compactification is the
//! projective space of nonzero 2×2 matrices, `G` acts by conjugation, the
//! invariant sections are `tr^2` and `det`, and the closure of the diagonal
//! torus maps onto the quotient. Everything is exact over the rationals.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::check::CheckResult;
use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type Matrix = [[Rational; 2]; 2];

pub const OPEN_PIECE: &str = "J={1};w=e";
pub const CLOSED_SEMISIMPLE_PIECE: &str = "J={};w=e";
pub const NILPOTENT_PIECE: &str = "J={};w=s1";

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn matrix(entries: [[i64; 2]; 2]) -> Matrix {
    entries.map(|row| row.map(rat))
}

fn mat_mul(x: &Matrix, y: &Matrix) -> Matrix {
    let e = |i: usize, j: usize| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn det(m: &Matrix) -> Rational {
    &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
}

fn trace(m: &Matrix) -> Rational {
    &m[0][0] + &m[1][1]
}

/// Divide by the first nonzero entry (row-major).
fn normalize(m: &Matrix) -> Matrix {
    let pivot = m.iter().flatten().find(|x| !x.is_zero()).cloned().unwrap_or_else(Rational::one);
    m.clone().map(|row| row.map(|x| x / &pivot))
}

fn show(x: &Rational) -> String {
    x.to_string()
}

fn show_matrix(m: &Matrix) -> Value {
    json!([[show(&m[0][0]), show(&m[0][1])], [show(&m[1][0]), show(&m[1][1])]])
}

/// A nonzero 2×2 rational matrix up to scale.
#[derive(Clone, Debug)]
pub struct ProjMatrixPoint {
    entries: Matrix,
}

impl ProjMatrixPoint {
    pub fn new(entries: Matrix) -> Result<Self> {
        if entries.iter().flatten().all(Zero::is_zero) {
            return Err(Error::ZeroMatrix);
        }
        Ok(ProjMatrixPoint { entries })
    }

    pub fn from_ints(entries: [[i64; 2]; 2]) -> Result<Self> {
        Self::new(matrix(entries))
    }

    pub fn diagonal(a: Rational, d: Rational) -> Result<Self> {
        Self::new([[a, Rational::zero()], [Rational::zero(), d]])
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    /// Representative whose first nonzero entry is 1.
    pub fn canonical(&self) -> Matrix {
        normalize(&self.entries)
    }

    pub fn trace(&self) -> Rational {
        trace(&self.entries)
    }

    pub fn det(&self) -> Rational {
        det(&self.entries)
    }
}

impl PartialEq for ProjMatrixPoint {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for ProjMatrixPoint {}

/// `[p : q]` up to common nonzero scale.
#[derive(Clone, Debug)]
pub struct QuotientPoint {
    pub p: Rational,
    pub q: Rational,
}

impl QuotientPoint {
    pub fn new(p: Rational, q: Rational) -> Result<Self> {
        if p.is_zero() && q.is_zero() {
            return Err(Error::ZeroMatrix);
        }
        Ok(QuotientPoint { p, q })
    }

    /// `[1 : q/p]` or `[0 : 1]`.
    pub fn canonical(&self) -> (Rational, Rational) {
        if self.p.is_zero() {
            (Rational::zero(), Rational::one())
        } else {
            (Rational::one(), &self.q / &self.p)
        }
    }
}

impl PartialEq for QuotientPoint {
    fn eq(&self, other: &Self) -> bool {
        &self.p * &other.q == &other.p * &self.q
    }
}

impl Eq for QuotientPoint {}

impl fmt::Display for QuotientPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} : {}]", self.p, self.q)
    }
}

/// Piece of the A1 enumeration containing the point: the open piece for
/// invertible matrices, otherwise `(∅, e)` or `(∅, s1)` by whether the trace vanishes.
pub fn classify_piece(a: &ProjMatrixPoint) -> &'static str {
    if !a.det().is_zero() {
        OPEN_PIECE
    } else if !a.trace().is_zero() {
        CLOSED_SEMISIMPLE_PIECE
    } else {
        NILPOTENT_PIECE
    }
}

/// Not nilpotent, i.e. `tr` and `det` do not both vanish.
pub fn is_semistable(a: &ProjMatrixPoint) -> bool {
    !(a.trace().is_zero() && a.det().is_zero())
}

/// `[tr(A)^2 : det(A)]`
pub fn quotient_point(a: &ProjMatrixPoint) -> Result<QuotientPoint> {
    if !is_semistable(a) {
        return Err(Error::Unstable);
    }
    let t = a.trace();
    QuotientPoint::new(&t * &t, a.det())
}

/// `g A g^{-1}`
pub fn conjugate(a: &ProjMatrixPoint, g: &Matrix) -> Result<ProjMatrixPoint> {
    let dg = det(g);
    if dg.is_zero() {
        return Err(Error::Singular);
    }
    let inv = [[&g[1][1] / &dg, -&g[0][1] / &dg], [-&g[1][0] / &dg, &g[0][0] / &dg]];
    ProjMatrixPoint::new(mat_mul(&mat_mul(g, &a.entries), &inv))
}

/// Image of the torus point `diag(a, d)`: `[(a + d)^2 : a d]`.
pub fn torus_quotient_map(a: &Rational, d: &Rational) -> Result<QuotientPoint> {
    if a.is_zero() && d.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let s = a + d;
    QuotientPoint::new(&s * &s, a * d)
}

/// `(a : d)` and `(a' : d')` agree up to swapping and scaling.
fn same_up_to_swap(x: &(Rational, Rational), y: &(Rational, Rational)) -> bool {
    let proportional = |u: &(Rational, Rational), v: &(Rational, Rational)| &u.0 * &v.1 == &u.1 * &v.0;
    proportional(x, y) || proportional(x, &(y.1.clone(), y.0.clone()))
}

/// Sample source with one independent stream per `(tag, index)`.
struct Sampler {
    seed: u64,
}

impl Sampler {
    fn rng(&self, tag: u64, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((tag << 40) | index);
        rng
    }
}

/// Numerator and denominator uniform in `[-9, 9]`, denominator nonzero.
fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let n: i64 = rng.gen_range(-9..=9);
    let mut d: i64 = 0;
    while d == 0 {
        d = rng.gen_range(-9..=9);
    }
    ratio(n, d)
}

fn random_nonzero(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let x = random_rational(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

fn random_matrix(rng: &mut ChaCha8Rng) -> Matrix {
    [[random_rational(rng), random_rational(rng)], [random_rational(rng), random_rational(rng)]]
}

fn random_invertible(rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let g = random_matrix(rng);
        if !det(&g).is_zero() {
            return g;
        }
    }
}

fn random_torus_pair(rng: &mut ChaCha8Rng) -> (Rational, Rational) {
    loop {
        let (a, d) = (random_rational(rng), random_rational(rng));
        if !(a.is_zero() && d.is_zero()) {
            return (a, d);
        }
    }
}

/// A sample point of one of several shapes, so that every piece is hit.
fn random_point(rng: &mut ChaCha8Rng, kind: u64) -> ProjMatrixPoint {
    let g = random_invertible(rng);
    let base = match kind % 4 {
        0 => loop {
            let m = random_matrix(rng);
            if let Ok(p) = ProjMatrixPoint::new(m) {
                break p;
            }
        },
        1 => ProjMatrixPoint::new([[Rational::zero(), random_nonzero(rng)], [Rational::zero(), Rational::zero()]])
            .expect("nonzero"),
        2 => ProjMatrixPoint::diagonal(random_nonzero(rng), Rational::zero()).expect("nonzero"),
        _ => {
            let (a, d) = random_torus_pair(rng);
            ProjMatrixPoint::diagonal(a, d).expect("nonzero")
        }
    };
    conjugate(&base, &g).expect("g is invertible")
}

const TAG_TORUS: u64 = 1;
const TAG_POINTS: u64 = 2;
const TAG_CONJ: u64 = 3;
const TAG_UNIPOTENT: u64 = 4;

/// Torus checks: swap invariance, injectivity up to swap and scale, and
/// agreement of the torus map with the conjugation-invariant quotient map.
pub fn verify_torus_quotient_pgl2(sample_count: usize, seed: u64) -> Vec<CheckResult> {
    let sampler = Sampler { seed };
    let mut swap_bad = None;
    let mut agree_bad = None;
    // each sample together with a rescaled swap of itself, so fibers are nontrivial
    let mut pool: Vec<(Rational, Rational)> = Vec::with_capacity(2 * sample_count);
    for i in 0..sample_count as u64 {
        let mut rng = sampler.rng(TAG_TORUS, i);
        let (a, d) = random_torus_pair(&mut rng);
        let image = torus_quotient_map(&a, &d).expect("not both zero");
        if swap_bad.is_none() && image != torus_quotient_map(&d, &a).expect("not both zero") {
            swap_bad = Some(json!({"a": show(&a), "d": show(&d)}));
        }
        let g = random_invertible(&mut rng);
        let diag = ProjMatrixPoint::diagonal(a.clone(), d.clone()).expect("not both zero");
        let conj = conjugate(&diag, &g).expect("invertible");
        let agrees = quotient_point(&conj).map(|q| q == image).unwrap_or(false);
        if agree_bad.is_none() && !agrees {
            agree_bad = Some(json!({"a": show(&a), "d": show(&d), "g": show_matrix(&g)}));
        }
        let c = random_nonzero(&mut rng);
        pool.push((&c * &d, &c * &a));
        pool.push((a, d));
    }

    let mut fibers: HashMap<(Rational, Rational), Vec<usize>> = HashMap::new();
    for (k, (a, d)) in pool.iter().enumerate() {
        let key = torus_quotient_map(a, d).expect("not both zero").canonical();
        fibers.entry(key).or_default().push(k);
    }
    let mut keys: Vec<_> = fibers.keys().cloned().collect();
    keys.sort();
    let inj_bad = keys.iter().find_map(|key| {
        let members = &fibers[key];
        let first = &pool[members[0]];
        members.iter().map(|&k| &pool[k]).find(|other| !same_up_to_swap(first, other)).map(|other| {
            json!({
                "first": [show(&first.0), show(&first.1)],
                "second": [show(&other.0), show(&other.1)],
            })
        })
    });

    vec![
        CheckResult::from_counterexample("pgl2.swap_invariance", swap_bad),
        CheckResult::from_counterexample("pgl2.swap_injectivity", inj_bad),
        CheckResult::from_counterexample("pgl2.torus_conjugate_agreement", agree_bad),
    ]
}

/// Pointwise checks on random points of the matrix model.
pub fn verify_pgl2_invariants(sample_count: usize, seed: u64) -> Vec<CheckResult> {
    let sampler = Sampler { seed };
    let mut conj_bad = None;
    let mut classify_bad = None;
    let mut nilpotent_bad = None;
    let mut piece_bad = None;
    for i in 0..sample_count as u64 {
        let mut rng = sampler.rng(TAG_POINTS, i);
        let a = random_point(&mut rng, i);
        let g = random_invertible(&mut rng);
        let b = conjugate(&a, &g).expect("invertible");

        if classify_bad.is_none() && classify_piece(&a) != classify_piece(&b) {
            classify_bad = Some(json!({"A": show_matrix(a.entries()), "g": show_matrix(&g)}));
        }
        if conj_bad.is_none() && is_semistable(&a) {
            let same = match (quotient_point(&a), quotient_point(&b)) {
                (Ok(x), Ok(y)) => x == y,
                _ => false,
            };
            if !same {
                conj_bad = Some(json!({"A": show_matrix(a.entries()), "g": show_matrix(&g)}));
            }
        }
        // nilpotency via A^2 = 0, independent of the trace/determinant test
        let square = mat_mul(a.entries(), a.entries());
        let nilpotent = square.iter().flatten().all(Zero::is_zero);
        if nilpotent_bad.is_none() && nilpotent == is_semistable(&a) {
            nilpotent_bad = Some(json!({"A": show_matrix(a.entries())}));
        }
        let w_is_e = classify_piece(&a) != NILPOTENT_PIECE;
        if piece_bad.is_none() && w_is_e != is_semistable(&a) {
            piece_bad = Some(json!({"A": show_matrix(a.entries())}));
        }
    }

    let identity_image =
        quotient_point(&ProjMatrixPoint::from_ints([[1, 0], [0, 1]]).expect("nonzero")).expect("semistable");
    let four_one = QuotientPoint::new(rat(4), rat(1)).expect("nonzero");
    let mut unipotent_bad = (identity_image != four_one).then(|| json!({"identity": identity_image.to_string()}));
    for i in 0..sample_count as u64 {
        if unipotent_bad.is_some() {
            break;
        }
        let mut rng = sampler.rng(TAG_UNIPOTENT, i);
        let t = random_nonzero(&mut rng);
        let u = ProjMatrixPoint::new([[rat(1), t], [Rational::zero(), rat(1)]]).expect("nonzero");
        let g = random_invertible(&mut rng);
        let v = conjugate(&u, &g).expect("invertible");
        let ok = classify_piece(&v) == OPEN_PIECE && quotient_point(&v).map(|q| q == identity_image).unwrap_or(false);
        if !ok {
            unipotent_bad = Some(json!({"U": show_matrix(v.entries())}));
        }
    }

    // scalar multiples of a conjugate land on the same quotient point
    let mut scale_bad = None;
    for i in 0..sample_count as u64 {
        let mut rng = sampler.rng(TAG_CONJ, i);
        let a = random_point(&mut rng, 3);
        let c = random_nonzero(&mut rng);
        let scaled = ProjMatrixPoint::new(a.entries().clone().map(|r| r.map(|x| x * &c))).expect("nonzero");
        if scaled != a || quotient_point(&scaled).ok() != quotient_point(&a).ok() {
            scale_bad = Some(json!({"A": show_matrix(a.entries()), "c": show(&c)}));
            break;
        }
    }

    vec![
        CheckResult::from_counterexample("pgl2.conjugation_invariance", conj_bad),
        CheckResult::from_counterexample("pgl2.classify_conjugation_invariance", classify_bad),
        CheckResult::from_counterexample("pgl2.nilpotent_iff_unstable", nilpotent_bad),
        CheckResult::from_counterexample("pgl2.semistable_iff_w_e", piece_bad),
        CheckResult::from_counterexample("pgl2.unipotent_fiber", unipotent_bad),
        CheckResult::from_counterexample("pgl2.projective_scaling", scale_bad),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl OracleReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Every PGL_2 check with the given sample count and seed.
pub fn oracle_report(sample_count: usize, seed: u64) -> OracleReport {
    let mut checks = verify_torus_quotient_pgl2(sample_count, seed);
    checks.extend(verify_pgl2_invariants(sample_count, seed));
    OracleReport { samples: sample_count, seed, checks }
}
