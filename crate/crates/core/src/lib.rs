pub mod check;
pub mod cli;
pub mod error;
pub mod git_locus;
pub mod pgl2_oracle;
pub mod pieces;
pub mod quotient_strata;
pub mod rootsys;
pub mod subset;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
pub use rootsys::{weight_predicates, CartanType, DiagramAutomorphism, RootSystem, Weight, WeightInfo};
pub use subset::Subset;
pub use weyl::{WeylElement, WeylGroup};
