//! Canonical labelling of Latin squares, Steiner triple systems and
//! 1-factorisations of complete graphs by row-cycle branch-and-extend search,
//! together with a Jacobson–Matthews sampler and brute-force oracles.
//!
//! All Rust APIs index rows, columns, symbols and points from 0. The text
//! formats read and written by the CLI are 1-based.

pub mod canonical;
pub mod cli;
pub mod cycles;
pub mod error;
pub mod latin;
pub mod onefact;
pub mod oracle;
pub mod sampler;
pub mod steiner;

pub use canonical::{canonical_labelling, same_isotopism_class, species_canonical, CanonicalResult, SearchStats};
pub use cycles::{hamiltonian_count, longest_cycle, CycleStructure, CycleTable};
pub use error::{Error, Result};
pub use latin::{apply_labelling, lex_compare, Conjugate, LatinSquare, PartialArray, PartialLabelling, PartialPermutation};
