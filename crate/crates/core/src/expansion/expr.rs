use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::atom::{CanonicalValue, DeltaAtom, ExpansionAtom};
use super::var::{Monomial, Var};
use super::ExprError;
use crate::scalars::{Coefficient, Rational};

/// `coeff * monomial * delta? * product(atoms)`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "C: Coefficient")]
pub struct Term<C> {
    pub coeff: C,
    pub monomial: Monomial,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<DeltaAtom>,
    #[serde(default)]
    pub atoms: Vec<ExpansionAtom>,
}

pub type TermKey = (Monomial, Option<DeltaAtom>, Vec<ExpansionAtom>);

impl<C: Coefficient> Term<C> {
    pub fn new(coeff: C, monomial: Monomial) -> Self {
        Term { coeff, monomial, delta: None, atoms: Vec::new() }
    }

    pub fn with_delta(mut self, delta: DeltaAtom) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn with_atom(mut self, atom: ExpansionAtom) -> Self {
        self.atoms.push(atom);
        self
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out: BTreeSet<Var> = self.monomial.vars().collect();
        if let Some(d) = &self.delta {
            out.insert(d.denom());
            out.extend(d.numerator().iter().map(|s| s.var));
        }
        for a in &self.atoms {
            out.extend(a.vars());
        }
        out
    }

    pub fn contains(&self, v: Var) -> bool {
        self.monomial.exp(v) != 0
            || self.delta.as_ref().is_some_and(|d| d.contains(v))
            || self.atoms.iter().any(|a| a.contains(v))
    }

    pub fn key(&self) -> TermKey {
        (self.monomial.clone(), self.delta.clone(), self.atoms.clone())
    }

    /// Canonicalize atoms, fold plain powers into the monomial and merge atoms with a common base.
    pub fn normalized(&self) -> Term<C> {
        let mut negate = false;
        let mut monomial = self.monomial.clone();
        let mut merged: BTreeMap<ExpansionAtom, i64> = BTreeMap::new();
        for atom in &self.atoms {
            let c = atom.canonical();
            negate ^= c.negate;
            match c.value {
                CanonicalValue::One => {}
                CanonicalValue::Power(v, e) => monomial.mul_var(v, e),
                CanonicalValue::Atom(a) => {
                    let base = ExpansionAtom { exp: 0, ..a.clone() };
                    *merged.entry(base).or_insert(0) += a.exp;
                }
            }
        }
        let atoms = merged
            .into_iter()
            .filter(|(_, e)| *e != 0)
            .map(|(base, e)| ExpansionAtom { exp: e, ..base })
            .collect();
        let coeff = if negate { self.coeff.negated() } else { self.coeff.clone() };
        Term { coeff, monomial, delta: self.delta.clone(), atoms }
    }
}

impl<C: Coefficient> fmt::Display for Term<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        if !self.monomial.is_one() {
            write!(f, " * {}", self.monomial)?;
        }
        if let Some(d) = &self.delta {
            write!(f, " * {d}")?;
        }
        for a in &self.atoms {
            write!(f, " * {a}")?;
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for Term<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite sum of terms over a fixed set of variables.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "C: Coefficient")]
pub struct DeltaExpr<C> {
    universe: BTreeSet<Var>,
    terms: Vec<Term<C>>,
}

pub fn default_universe() -> BTreeSet<Var> {
    ["x0", "x1", "x2"].iter().map(|n| Var::named(n)).collect()
}

impl<C: Coefficient> DeltaExpr<C> {
    pub fn new(universe: impl IntoIterator<Item = Var>) -> Self {
        DeltaExpr { universe: universe.into_iter().collect(), terms: Vec::new() }
    }

    pub fn over_default() -> Self {
        DeltaExpr { universe: default_universe(), terms: Vec::new() }
    }

    pub fn universe(&self) -> &BTreeSet<Var> {
        &self.universe
    }

    pub fn terms(&self) -> &[Term<C>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn extend_universe(&mut self, vars: impl IntoIterator<Item = Var>) {
        self.universe.extend(vars);
    }

    pub fn push(&mut self, term: Term<C>) -> Result<(), ExprError> {
        if let Some(v) = term.vars().into_iter().find(|v| !self.universe.contains(v)) {
            return Err(ExprError::UnknownVariable(v.to_string()));
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn with_term(mut self, term: Term<C>) -> Result<Self, ExprError> {
        self.push(term)?;
        Ok(self)
    }

    /// Same universe, new terms. Terms are trusted to stay inside the universe.
    pub(crate) fn with_terms(&self, terms: Vec<Term<C>>) -> Self {
        DeltaExpr { universe: self.universe.clone(), terms }
    }

    pub fn add(&self, other: &DeltaExpr<C>) -> DeltaExpr<C> {
        let mut universe = self.universe.clone();
        universe.extend(other.universe.iter().copied());
        let terms = self.terms.iter().chain(other.terms.iter()).cloned().collect();
        DeltaExpr { universe, terms }
    }

    pub fn sub(&self, other: &DeltaExpr<C>) -> DeltaExpr<C> {
        self.add(&other.scaled(&Rational::from(-1)))
    }

    pub fn scaled(&self, by: &Rational) -> DeltaExpr<C> {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { coeff: t.coeff.scaled(by), ..t.clone() })
            .collect();
        self.with_terms(terms)
    }

    /// Termwise product with a scalar expression. Refuses terms that would carry two deltas.
    pub fn mul(&self, other: &DeltaExpr<Rational>) -> Result<DeltaExpr<C>, ExprError> {
        let mut universe = self.universe.clone();
        universe.extend(other.universe.iter().copied());
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in other.terms() {
                let delta = match (&a.delta, &b.delta) {
                    (Some(_), Some(_)) => {
                        return Err(ExprError::NotSummable("product of two delta factors".into()))
                    }
                    (Some(d), None) | (None, Some(d)) => Some(d.clone()),
                    (None, None) => None,
                };
                let mut atoms = a.atoms.clone();
                atoms.extend(b.atoms.iter().cloned());
                terms.push(Term {
                    coeff: a.coeff.scaled(&b.coeff),
                    monomial: a.monomial.mul(&b.monomial),
                    delta,
                    atoms,
                });
            }
        }
        Ok(DeltaExpr { universe, terms })
    }

    /// Canonical atoms, like terms collected, zero terms dropped. Idempotent.
    pub fn normalize(&self) -> DeltaExpr<C> {
        let mut collected: BTreeMap<TermKey, C> = BTreeMap::new();
        for t in &self.terms {
            let n = t.normalized();
            if n.coeff.is_zero() {
                continue;
            }
            collected.entry(n.key()).or_insert_with(C::zero).add_assign_ref(&n.coeff);
        }
        let terms = collected
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((monomial, delta, atoms), coeff)| Term { coeff, monomial, delta, atoms })
            .collect();
        self.with_terms(terms)
    }

    /// Deterministic text form used for hashing and reports.
    pub fn canonical_text(&self) -> String {
        serde_json::to_string(self).expect("expression serializes")
    }
}

impl<C: Coefficient> fmt::Display for DeltaExpr<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "[{t}]")?;
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for DeltaExpr<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
