//! Polynomials, polynomial systems and the operations the solvers need on
//! them: parsing, evaluation, symbolic Jacobians, squaring, coordinate
//! changes and multihomogeneous root counts.

mod multihom;
mod parse;
mod poly;
mod system;

pub use multihom::{multihomogeneous_count, VariableGroups};
pub use parse::{parse_poly, parse_system, ParseError, ParseErrorKind, MAX_DEGREE, MAX_TERMS};
pub use poly::{Monomial, Poly, PolyDisplay, Term, COEFF_EPS};
pub use system::{
    apply_diagonal, diagonal_change, random_orthogonal, square_system, AlgebraError,
    CompiledSystem, PolySystem, SquaredSystem,
};

/// Variable names `prefix1, prefix2, ...`.
pub fn numbered_vars(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}
