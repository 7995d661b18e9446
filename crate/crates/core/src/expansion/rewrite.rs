//! Semantics-preserving rewrites: delta expansion, Taylor shifts, delta substitution, residues.

use super::atom::{DeltaAtom, ExpansionAtom};
use super::engine::{certify, certify_term};
use super::expr::{DeltaExpr, Term};
use super::var::{Monomial, SignedVar, Var};
use super::ExprError;
use crate::scalars::{binom_int, Coefficient, Rational};

/// `d^-1 delta(N/d) = (N - d)^-1 + (d - N)^-1`.
pub fn delta_to_atoms(d: &DeltaAtom) -> DeltaExpr<Rational> {
    let (first, second) = delta_atom_pair(d);
    let mut universe: Vec<Var> = d.numerator().iter().map(|s| s.var).collect();
    universe.push(d.denom());
    DeltaExpr::new(universe)
        .with_term(Term::new(Rational::one(), Monomial::one()).with_atom(first))
        .and_then(|e| e.with_term(Term::new(Rational::one(), Monomial::one()).with_atom(second)))
        .expect("delta variables are in the universe")
}

fn delta_atom_pair(d: &DeltaAtom) -> (ExpansionAtom, ExpansionAtom) {
    let mut tail1 = d.tail().to_vec();
    tail1.push(d.denom().neg());
    let first = ExpansionAtom::new(d.head(), tail1, -1);
    let tail2 = d.numerator().into_iter().map(SignedVar::flip).collect();
    let second = ExpansionAtom::new(d.denom().pos(), tail2, -1);
    (first, second)
}

/// Replace every delta factor by its pair of atoms, keeping term order.
pub fn expand_deltas<C: Coefficient>(e: &DeltaExpr<C>) -> DeltaExpr<C> {
    let mut terms = Vec::with_capacity(e.len() * 2);
    for t in e.terms() {
        match &t.delta {
            None => terms.push(t.clone()),
            Some(d) => {
                let (a, b) = delta_atom_pair(d);
                for atom in [a, b] {
                    let mut nt = Term { delta: None, ..t.clone() };
                    nt.atoms.push(atom);
                    terms.push(nt);
                }
            }
        }
    }
    e.with_terms(terms)
}

/// Replace each occurrence `s*var` inside a signed sum by `s*var + s*shift`.
fn shift_sum(head: SignedVar, tail: &[SignedVar], var: Var, shift: SignedVar) -> Vec<SignedVar> {
    let mut out = tail.to_vec();
    for s in std::iter::once(&head).chain(tail.iter()) {
        if s.var == var {
            out.push(shift.times(s.negative));
        }
    }
    out
}

fn check_universe<C: Coefficient>(e: &DeltaExpr<C>, v: Var) -> Result<(), ExprError> {
    if e.universe().contains(&v) {
        Ok(())
    } else {
        Err(ExprError::UnknownVariable(v.to_string()))
    }
}

/// `e^{shift d/dvar}`: every `var` becomes `var + shift`, expanded in nonnegative powers of `shift`.
pub fn taylor_shift<C: Coefficient>(
    e: &DeltaExpr<C>,
    var: Var,
    shift: SignedVar,
) -> Result<DeltaExpr<C>, ExprError> {
    if shift.var == var {
        return Err(ExprError::Unsupported(format!("shift of {var} by itself")));
    }
    check_universe(e, var)?;
    check_universe(e, shift.var)?;
    let mut terms = Vec::with_capacity(e.len());
    for t in e.terms() {
        let mut nt = t.clone();
        if let Some(d) = &t.delta {
            if d.denom() == var {
                return Err(ExprError::Unsupported(format!(
                    "cannot shift the delta denominator {var}; expand the delta first"
                )));
            }
            if d.numerator_contains(var) {
                let tail = shift_sum(d.head(), d.tail(), var, shift);
                nt.delta = Some(d.with_numerator(d.head(), tail)?);
            }
        }
        let a = nt.monomial.take(var);
        for atom in &mut nt.atoms {
            if atom.contains(var) {
                *atom = ExpansionAtom::new(atom.head, shift_sum(atom.head, &atom.tail, var, shift), atom.exp);
            }
        }
        if a != 0 {
            nt.atoms.push(ExpansionAtom::new(var.pos(), vec![shift], a));
        }
        terms.push(nt);
    }
    let out = e.with_terms(terms).normalize();
    certify(&out)?;
    Ok(out)
}

/// Rename `from` to a variable `to` that does not occur in the expression.
pub fn rename<C: Coefficient>(e: &DeltaExpr<C>, from: Var, to: Var) -> Result<DeltaExpr<C>, ExprError> {
    if from == to {
        return Ok(e.clone());
    }
    if e.terms().iter().any(|t| t.contains(to)) {
        return Err(ExprError::Unsupported(format!("rename target {to} already occurs")));
    }
    let map_sv = |s: SignedVar| if s.var == from { SignedVar { var: to, ..s } } else { s };
    let mut terms = Vec::with_capacity(e.len());
    for t in e.terms() {
        let mut nt = t.clone();
        let a = nt.monomial.take(from);
        nt.monomial.mul_var(to, a);
        for atom in &mut nt.atoms {
            *atom = ExpansionAtom::new(map_sv(atom.head), atom.tail.iter().map(|&s| map_sv(s)).collect(), atom.exp);
        }
        if let Some(d) = &t.delta {
            let denom = if d.denom() == from { to } else { d.denom() };
            nt.delta = Some(DeltaAtom::new(d.numerator().into_iter().map(map_sv).collect(), denom)?);
        }
        terms.push(nt);
    }
    let mut out = e.with_terms(terms);
    out.extend_universe([to]);
    Ok(out)
}

/// Which way a delta factor is used to rewrite its cofactor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubstitutionDirection {
    /// `delta(N/d) f(d, ...) = delta(N/d) f(N, ...)`
    DenominatorToNumerator,
    /// `delta((y+T)/d) f(y, ...) = delta((y+T)/d) f(d - T, ...)`
    NumeratorHeadToDenominator,
    /// `delta(N/d) N^n = delta(N/d) d^n` for atoms whose base is exactly the numerator.
    NumeratorToDenominator,
}

/// Replace each `s*var` by `s*replacement` in a signed sum with head `head`.
fn substitute_sum(
    head: SignedVar,
    tail: &[SignedVar],
    var: Var,
    replacement: &[SignedVar],
) -> (SignedVar, Vec<SignedVar>) {
    let mut new_tail: Vec<SignedVar> = Vec::new();
    let new_head = if head.var == var {
        new_tail.extend(replacement[1..].iter().map(|r| r.times(head.negative)));
        replacement[0].times(head.negative)
    } else {
        head
    };
    for &t in tail {
        if t.var == var {
            new_tail.extend(replacement.iter().map(|r| r.times(t.negative)));
        } else {
            new_tail.push(t);
        }
    }
    (new_head, new_tail)
}

fn substitute_var<C: Coefficient>(t: &Term<C>, var: Var, replacement: &[SignedVar]) -> Term<C> {
    let mut nt = t.clone();
    let a = nt.monomial.take(var);
    for atom in &mut nt.atoms {
        if atom.contains(var) {
            let (h, tail) = substitute_sum(atom.head, &atom.tail, var, replacement);
            *atom = ExpansionAtom::new(h, tail, atom.exp);
        }
    }
    if a != 0 {
        nt.atoms.push(ExpansionAtom::new(replacement[0], replacement[1..].to_vec(), a));
    }
    nt
}

/// Rewrite the cofactor of each delta using the delta's own relation.
///
/// Only applied when a conservative syntactic rule certifies it: the numerator's tail
/// variables never head a negative power, no negative power mixes the denominator with
/// the numerator head, and both input and output expand finitely.
pub fn delta_substitute<C: Coefficient>(
    e: &DeltaExpr<C>,
    direction: SubstitutionDirection,
) -> Result<DeltaExpr<C>, ExprError> {
    certify(e).map_err(|err| ExprError::SubstitutionRefused(format!("input: {err}")))?;
    let mut terms = Vec::with_capacity(e.len());
    for t in e.terms() {
        let Some(d) = &t.delta else {
            terms.push(t.clone());
            continue;
        };
        let nt = match direction {
            SubstitutionDirection::NumeratorToDenominator => {
                let mut nt = t.clone();
                let mut kept = Vec::new();
                for atom in &t.atoms {
                    let plain = atom.head == d.head() && atom.tail == d.tail();
                    let negated = atom.head == d.head().flip()
                        && atom.tail.len() == d.tail().len()
                        && {
                            let mut flipped: Vec<SignedVar> = d.tail().iter().map(|s| s.flip()).collect();
                            flipped.sort();
                            flipped == atom.tail
                        };
                    if plain {
                        nt.monomial.mul_var(d.denom(), atom.exp);
                    } else if negated {
                        nt.monomial.mul_var(d.denom(), atom.exp);
                        if atom.exp.rem_euclid(2) == 1 {
                            nt.coeff = nt.coeff.negated();
                        }
                    } else {
                        kept.push(atom.clone());
                    }
                }
                nt.atoms = kept;
                nt
            }
            SubstitutionDirection::DenominatorToNumerator => {
                admissible(t, d)?;
                let mut nt = substitute_var(&Term { delta: None, ..t.clone() }, d.denom(), &d.numerator());
                nt.delta = Some(d.clone());
                nt
            }
            SubstitutionDirection::NumeratorHeadToDenominator => {
                admissible(t, d)?;
                let h = d.head();
                // N = s*y + T = d  =>  y = s*d - s*T
                let mut replacement = vec![d.denom().pos().times(h.negative)];
                replacement.extend(d.tail().iter().map(|s| s.flip().times(h.negative)));
                let mut nt = substitute_var(&Term { delta: None, ..t.clone() }, h.var, &replacement);
                nt.delta = Some(d.clone());
                nt
            }
        };
        let nt = nt.normalized();
        certify_term(&nt).map_err(|err| ExprError::SubstitutionRefused(format!("output: {err}")))?;
        terms.push(nt);
    }
    Ok(e.with_terms(terms).normalize())
}

fn admissible<C: Coefficient>(t: &Term<C>, d: &DeltaAtom) -> Result<(), ExprError> {
    for atom in t.atoms.iter().filter(|a| a.exp < 0) {
        if d.tail().iter().any(|s| s.var == atom.head.var) {
            return Err(ExprError::SubstitutionRefused(format!(
                "{atom} is not truncated in the numerator tail variable {}",
                atom.head.var
            )));
        }
        if atom.contains(d.denom()) && atom.contains(d.head().var) {
            return Err(ExprError::SubstitutionRefused(format!(
                "{atom} has no limit as {} approaches the numerator",
                d.denom()
            )));
        }
    }
    Ok(())
}

/// All ways to write `total` as an ordered sum of `parts` nonnegative integers.
fn for_each_composition(total: i64, parts: usize, f: &mut dyn FnMut(&[i64])) {
    fn go(total: i64, parts: usize, cur: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
        if cur.len() + 1 == parts {
            cur.push(total);
            f(cur);
            cur.pop();
            return;
        }
        for k in 0..=total {
            cur.push(k);
            go(total - k, parts, cur, f);
            cur.pop();
        }
    }
    if total < 0 {
        return;
    }
    if parts == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    go(total, parts, &mut Vec::with_capacity(parts), f);
}

fn multinomial_rational(ks: &[i64]) -> Rational {
    let mut acc = Rational::one();
    let mut running = 0i64;
    for &k in ks {
        running += k;
        acc = acc * Rational::from_bigint(binom_int(running, k as u64));
    }
    acc
}

/// Expand nonnegative powers that mention `var` into monomials of all their variables.
fn expand_finite_with<C: Coefficient>(t: &Term<C>, var: Var) -> Vec<Term<C>> {
    let mut out = vec![Term { atoms: Vec::new(), ..t.clone() }];
    for atom in &t.atoms {
        if atom.exp < 0 || !atom.contains(var) {
            for o in &mut out {
                o.atoms.push(atom.clone());
            }
            continue;
        }
        let entries: Vec<SignedVar> = std::iter::once(atom.head).chain(atom.tail.iter().copied()).collect();
        let mut next = Vec::new();
        for_each_composition(atom.exp, entries.len(), &mut |ks| {
            let mut factor = multinomial_rational(ks);
            let mut m = Monomial::one();
            for (s, &k) in entries.iter().zip(ks) {
                m.mul_var(s.var, k);
                if s.negative && k % 2 == 1 {
                    factor = -factor;
                }
            }
            for o in &out {
                next.push(Term {
                    coeff: o.coeff.scaled(&factor),
                    monomial: o.monomial.mul(&m),
                    ..o.clone()
                });
            }
        });
        out = next;
    }
    out
}

fn refuse(var: Var, why: &str) -> ExprError {
    ExprError::ResidueRefused(format!("Res_{var}: {why}"))
}

/// Coefficient of `var^-1`, returned as a `var`-free expression.
pub fn residue<C: Coefficient>(e: &DeltaExpr<C>, var: Var) -> Result<DeltaExpr<C>, ExprError> {
    check_universe(e, var)?;
    let mut out = Vec::new();
    for raw in e.terms() {
        let t = raw.normalized();
        if !t.contains(var) {
            continue;
        }
        if let Some(d) = &t.delta {
            if d.numerator_contains(var) {
                return Err(refuse(var, "variable occurs in a delta numerator"));
            }
            if d.denom() == var {
                if t.atoms.iter().any(|a| a.contains(var)) {
                    return Err(refuse(var, "delta denominator also occurs in a power"));
                }
                // sum_n N^n var^(a-n-1): the var^-1 coefficient is N^a
                let mut nt = t.clone();
                let a = nt.monomial.take(var);
                nt.delta = None;
                nt.atoms.push(d.numerator_power(a));
                out.push(nt.normalized());
                continue;
            }
        }
        for ft in expand_finite_with(&t, var) {
            residue_of_powers(&ft, var, &mut out)?;
        }
    }
    Ok(e.with_terms(out).normalize())
}

/// Residue of a term in which `var` occurs only in the monomial and in negative powers.
fn residue_of_powers<C: Coefficient>(t: &Term<C>, var: Var, out: &mut Vec<Term<C>>) -> Result<(), ExprError> {
    let a = t.monomial.exp(var);
    let mut rest = t.clone();
    rest.monomial.take(var);
    rest.atoms.clear();
    let mut headed: Vec<&ExpansionAtom> = Vec::new();
    let mut tailed: Vec<&ExpansionAtom> = Vec::new();
    for atom in &t.atoms {
        if !atom.contains(var) {
            rest.atoms.push(atom.clone());
        } else if atom.is_inert() {
            return Err(refuse(var, "head variable also occurs in the tail"));
        } else if atom.head.var == var {
            headed.push(atom);
        } else {
            tailed.push(atom);
        }
    }
    match (headed.len(), tailed.len()) {
        (0, _) => {
            // var only in tails: split off c*var from each and collect var^(-1-a).
            let total = -1 - a;
            let split: Vec<(i64, ExpansionAtom)> = tailed
                .iter()
                .map(|atom| {
                    let c: i64 = atom.tail.iter().filter(|s| s.var == var).map(|s| s.sign()).sum();
                    let tail = atom.tail.iter().copied().filter(|s| s.var != var).collect();
                    (c, ExpansionAtom::new(atom.head, tail, atom.exp))
                })
                .collect();
            for_each_composition(total, split.len(), &mut |js| {
                let mut nt = rest.clone();
                let mut factor = Rational::one();
                for ((c, atom), &j) in split.iter().zip(js) {
                    factor = factor
                        * Rational::from_bigint(binom_int(atom.exp, j as u64))
                        * Rational::from(*c).pow(j as u32);
                    nt.atoms.push(ExpansionAtom { exp: atom.exp - j, ..atom.clone() });
                }
                if !factor.is_zero() {
                    nt.coeff = nt.coeff.scaled(&factor);
                    out.push(nt.normalized());
                }
            });
            Ok(())
        }
        (1, 0) => {
            let atom = headed[0];
            // (s*var + T)^n var^a: need n - K + a = -1.
            let k_total = atom.exp + 1 + a;
            let head_sign = atom.head.negative;
            for_each_composition(k_total, atom.tail.len(), &mut |ks| {
                let mut factor = Rational::from_bigint(binom_int(atom.exp, k_total as u64)) * multinomial_rational(ks);
                if head_sign && (atom.exp - k_total).rem_euclid(2) == 1 {
                    factor = -factor;
                }
                let mut nt = rest.clone();
                for (s, &k) in atom.tail.iter().zip(ks) {
                    nt.monomial.mul_var(s.var, k);
                    if s.negative && k % 2 == 1 {
                        factor = -factor.clone();
                    }
                }
                if !factor.is_zero() {
                    nt.coeff = nt.coeff.scaled(&factor);
                    out.push(nt.normalized());
                }
            });
            Ok(())
        }
        _ => Err(refuse(var, "variable heads several powers or mixes head and tail roles")),
    }
}

/// `var -> -var`.
pub fn reflect<C: Coefficient>(e: &DeltaExpr<C>, var: Var) -> Result<DeltaExpr<C>, ExprError> {
    check_universe(e, var)?;
    let flip = |s: SignedVar| if s.var == var { s.flip() } else { s };
    let mut terms = Vec::with_capacity(e.len());
    for t in e.terms() {
        let mut nt = t.clone();
        if nt.monomial.exp(var).rem_euclid(2) == 1 {
            nt.coeff = nt.coeff.negated();
        }
        for atom in &mut nt.atoms {
            *atom = ExpansionAtom::new(flip(atom.head), atom.tail.iter().map(|&s| flip(s)).collect(), atom.exp);
        }
        if let Some(d) = &t.delta {
            if d.denom() == var {
                // (-x)^-1 delta(N/(-x)) = -x^-1 delta(-N/x)
                nt.delta = Some(DeltaAtom::new(d.numerator().into_iter().map(SignedVar::flip).collect(), var)?);
                nt.coeff = nt.coeff.negated();
            } else {
                nt.delta = Some(DeltaAtom::new(d.numerator().into_iter().map(flip).collect(), d.denom())?);
            }
        }
        terms.push(nt);
    }
    Ok(e.with_terms(terms).normalize())
}
