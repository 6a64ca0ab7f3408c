//! Packing-based k-Set Cover approximation.
//!
//! The pipeline ([`prpsli::solve`]) runs unrestricted local-search set packing
//! for set sizes `k` down to 7, 1-set-restricted packing for sizes 6, 5 and 4,
//! and finishes with the semi-local (2,1)-improvement for 3-Set Cover. Around
//! it sit exact oracles for small instances, generators for structured
//! worst-case families, a verifier for the blocking-forest structure of
//! restricted packings, and an exact-rational factor-revealing LP.

pub mod bitset;
pub mod blocking;
pub mod combinatorics;
pub mod error;
pub mod frlp;
pub mod generators;
pub mod instance;
pub mod matching;
pub mod oracle;
pub mod packing;
pub mod prpsli;
pub mod semilocal;

pub use bitset::ElemSet;
pub use error::{CoverError, InstanceError, ParseError, ParseErrorKind};
pub use instance::{
    induced_subinstance, parse_instance, validate_cover, validate_packing, ChosenSet, Cover,
    CoverStats, Instance, Packing,
};
