//! Symbolic delta calculus over binomially expanded powers.
//!
//! Every power `(a + b + ...)^n` is expanded in nonnegative powers of all entries
//! after the first. Two expansions with the same first entry and the same multiset of
//! remaining entries are equal, which is what makes cancellation purely syntactic.

mod atom;
mod engine;
mod expr;
mod prove;
mod rewrite;
mod var;

use thiserror::Error;

pub use atom::{Canonical, CanonicalValue, DeltaAtom, ExpansionAtom};
pub use engine::{certify, certify_term, coeff_of, expand_on_window, Window};
pub use expr::{default_universe, DeltaExpr, Term, TermKey};
pub use prove::{hash_text, identity_lhs, prove_identity, Identity, ProofStep, ProofTrace};
pub use rewrite::{
    delta_substitute, delta_to_atoms, expand_deltas, reflect, rename, residue, taylor_shift,
    SubstitutionDirection,
};
pub use var::{Monomial, SignedVar, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("invalid variable name {0:?}")]
    BadVariable(String),
    #[error("variable {0} is outside the expression's universe")]
    UnknownVariable(String),
    #[error("malformed expression: {0}")]
    Malformed(String),
    #[error("not certifiably summable: {0}")]
    NotSummable(String),
    #[error("unsupported rewrite: {0}")]
    Unsupported(String),
    #[error("substitution refused: {0}")]
    SubstitutionRefused(String),
    #[error("residue refused: {0}")]
    ResidueRefused(String),
    #[error("identity did not reduce to zero; residual {0}")]
    ProverFailure(String),
}

#[cfg(test)]
mod tests;
