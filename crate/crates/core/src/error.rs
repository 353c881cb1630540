use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown root system type `{0}`")]
    UnknownType(String),
    #[error("rank {rank} is not valid for type {letter}")]
    InvalidRank { letter: char, rank: usize },
    #[error("estimated Weyl group order {estimated} exceeds the guard {guard}")]
    GuardExceeded { estimated: u128, guard: u128 },
    #[error("vector {0:?} is not a root")]
    NotARoot(Vec<i64>),
    #[error("index {index} is outside 1..={rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("invalid automorphism specification: {0}")]
    InvalidAutomorphism(String),
    #[error("permutation does not preserve the Cartan matrix")]
    NotCartanPreserving,
    #[error("weight has {got} coefficients, expected {expected}")]
    WeightLength { expected: usize, got: usize },
    #[error("weight {0} is not dominant")]
    NotDominant(String),
    #[error("weight {0} is not regular")]
    NotRegular(String),
    #[error("weight {0} is not stable under the diagram automorphism")]
    NotSigmaStable(String),
    #[error("Weyl group elements belong to different group tables")]
    TableMismatch,
    #[error("cannot parse element `{0}`")]
    ParseElement(String),
    #[error("cannot parse piece id `{0}`")]
    ParsePiece(String),
    #[error("element {w} is not a minimal coset representative for {subset}")]
    NotMinimalRep { w: String, subset: String },
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error("the zero matrix is not a projective point")]
    ZeroMatrix,
    #[error("matrix is singular")]
    Singular,
    #[error("point is not semistable")]
    Unstable,
    #[error("quotient strata are only defined for the identity automorphism")]
    TwistedQuotient,
}

pub type Result<T> = std::result::Result<T, Error>;
