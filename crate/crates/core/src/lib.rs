//! Exact arithmetic for symplectic hypergeometric monodromy groups.
//!
//! A pair of parameter tuples determines two companion matrices `A, B` whose
//! quotient `T = A⁻¹B` is a transvection. A word `γ` in `A^{±1}, B^{±1}`
//! with `T` and `γTγ⁻¹` having linearly independent, Ω-orthogonal
//! directions certifies that the (Zariski-dense) group has finite index in
//! `Sp_Ω(ℤ)`. This crate builds the groups, checks such certificates,
//! searches for them, and reconstructs the unipotent element behind the
//! criterion.
//!
//! All arithmetic is exact.

pub mod catalog;
pub mod certify;
#[cfg(feature = "cli")]
pub mod cli;
pub mod form;
pub mod group;
mod json;
pub mod linalg;
pub mod params;
pub mod search;

pub use catalog::{Catalog, CatalogEntry};
pub use certify::{
    build_proof_witness, check_certificate, Certificate, Verdict, VerificationReport, WitnessReport,
};
pub use form::{solve_invariant_form, SymplecticForm};
pub use group::{build_group, eval_word, parse_word, Generators, GroupPresentation, Letter, Word};
pub use linalg::IntMatrix;
pub use params::{parse_rational_tuple, IntPolynomial, ParamTuple};
pub use search::{search_certificate, SearchConfig, SearchOutcome};
