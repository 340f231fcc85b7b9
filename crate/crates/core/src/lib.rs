//! A two-sorted lambda calculus of proofs and refutations for
//! bi-intuitionistic logic.
//!
//! Terms carry a polarity: positive terms encode proofs, negative terms
//! encode refutations. The crate provides parsing and printing, type
//! checking and principal-type inference, explicit derivations, reduction
//! to normal form, the duality map, and decision procedures for identity
//! and synonymy of derivations.

pub mod derivation;
pub mod duality;
pub mod meaning;
pub mod rewrite;
pub mod syntax;
pub mod testkit;
pub mod textio;
pub mod typing;

pub use derivation::{Derivation, Judgment, Rule};
pub use syntax::{alpha_eq, canonical, free_vars, substitute, Basis, Formula, Name, Polarity, Term, Var};
pub use textio::{parse_formula, parse_term, print_basis, print_formula, print_term};

/// Renders a path of child indices, `root` for the empty path.
pub fn render_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}
