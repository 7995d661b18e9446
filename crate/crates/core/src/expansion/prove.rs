//! Mechanical proofs of the two- and three-term delta identities.

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::atom::DeltaAtom;
use super::expr::{DeltaExpr, Term};
use super::rewrite::expand_deltas;
use super::var::{Monomial, Var};
use super::ExprError;
use crate::scalars::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    TwoTerm,
    ThreeTerm,
}

impl Identity {
    pub fn name(self) -> &'static str {
        match self {
            Identity::TwoTerm => "two-term",
            Identity::ThreeTerm => "three-term",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofStep {
    pub rule: String,
    pub before: String,
    pub after: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProofTrace {
    pub identity: Identity,
    /// Left-hand side as a list of delta terms.
    pub lhs: String,
    /// Atom terms after delta expansion, in order, 1-based in `pairs`.
    pub expanded: Vec<String>,
    pub pairs: Vec<(usize, usize)>,
    pub steps: Vec<ProofStep>,
    pub residual: String,
}

pub fn hash_text(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn sv(s: &str) -> super::var::SignedVar {
    s.parse().expect("literal signed variable")
}

fn delta_term(coeff: i64, numerator: &[&str], denom: &str) -> Term<Rational> {
    let d = DeltaAtom::new(numerator.iter().map(|s| sv(s)).collect(), Var::named(denom))
        .expect("literal delta");
    Term::new(Rational::from(coeff), Monomial::one()).with_delta(d)
}

/// Left-hand side of the identity as an expression in `x0, x1, x2`.
pub fn identity_lhs(which: Identity) -> DeltaExpr<Rational> {
    let terms = match which {
        Identity::TwoTerm => vec![
            delta_term(1, &["+x2", "+x0"], "x1"),
            delta_term(-1, &["+x1", "-x0"], "x2"),
        ],
        Identity::ThreeTerm => vec![
            delta_term(1, &["+x1", "-x2"], "x0"),
            delta_term(-1, &["-x2", "+x1"], "x0"),
            delta_term(-1, &["+x2", "+x0"], "x1"),
        ],
    };
    let mut e = DeltaExpr::over_default();
    for t in terms {
        e.push(t).expect("default variables");
    }
    e
}

/// Expand every delta, canonicalize each atom term, then cancel equal-and-opposite pairs.
/// Fails with the residual when anything is left over.
pub fn prove_identity(which: Identity) -> Result<ProofTrace, ExprError> {
    let lhs = identity_lhs(which);
    let mut steps = Vec::new();
    let mut record = |rule: String, before: &DeltaExpr<Rational>, after: &DeltaExpr<Rational>| {
        steps.push(ProofStep {
            rule,
            before: hash_text(&before.canonical_text()),
            after: hash_text(&after.canonical_text()),
        });
    };

    let expanded = expand_deltas(&lhs);
    record("delta_to_atoms".into(), &lhs, &expanded);
    let canon_terms: Vec<Term<Rational>> = expanded.terms().iter().map(Term::normalized).collect();
    let canon = expanded.with_terms(canon_terms.clone());
    record("reassociate".into(), &expanded, &canon);

    let mut alive: Vec<bool> = vec![true; canon_terms.len()];
    let mut pairs = Vec::new();
    for i in 0..canon_terms.len() {
        if !alive[i] {
            continue;
        }
        let partner = (i + 1..canon_terms.len()).find(|&j| {
            alive[j]
                && canon_terms[j].key() == canon_terms[i].key()
                && (&canon_terms[i].coeff + &canon_terms[j].coeff).is_zero()
        });
        if let Some(j) = partner {
            let before = expanded.with_terms(
                canon_terms.iter().zip(&alive).filter(|(_, &a)| a).map(|(t, _)| t.clone()).collect(),
            );
            alive[i] = false;
            alive[j] = false;
            let after = expanded.with_terms(
                canon_terms.iter().zip(&alive).filter(|(_, &a)| a).map(|(t, _)| t.clone()).collect(),
            );
            record(format!("cancel_pair({},{})", i + 1, j + 1), &before, &after);
            pairs.push((i + 1, j + 1));
        }
    }
    let leftover = expanded.with_terms(
        canon_terms.iter().zip(&alive).filter(|(_, &a)| a).map(|(t, _)| t.clone()).collect(),
    );
    let residual = leftover.normalize();
    if !residual.is_empty() {
        return Err(ExprError::ProverFailure(residual.to_string()));
    }
    Ok(ProofTrace {
        identity: which,
        lhs: lhs.to_string(),
        expanded: expanded.terms().iter().map(|t| t.to_string()).collect(),
        pairs,
        steps,
        residual: residual.to_string(),
    })
}
