use std::fmt;

use serde::{Deserialize, Serialize};

use super::var::{SignedVar, Var};
use super::ExprError;

/// `(head + t1 + t2 + ...)^exp`, expanded in nonnegative powers of every tail entry.
///
/// The tail is a sorted multiset. Reassociation makes its order irrelevant.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExpansionAtom {
    pub head: SignedVar,
    pub tail: Vec<SignedVar>,
    pub exp: i64,
}

/// Result of putting an atom in canonical form: `(-1)^negate * value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub negate: bool,
    pub value: CanonicalValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CanonicalValue {
    One,
    Power(Var, i64),
    Atom(ExpansionAtom),
}

impl ExpansionAtom {
    pub fn new(head: SignedVar, mut tail: Vec<SignedVar>, exp: i64) -> Self {
        tail.sort();
        ExpansionAtom { head, tail, exp }
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        std::iter::once(self.head.var).chain(self.tail.iter().map(|s| s.var))
    }

    pub fn contains(&self, v: Var) -> bool {
        self.vars().any(|w| w == v)
    }

    pub fn tail_contains(&self, v: Var) -> bool {
        self.tail.iter().any(|s| s.var == v)
    }

    /// The head variable also sits in the tail. Such atoms are left untouched and
    /// their expansion is not a finite computation.
    pub fn is_inert(&self) -> bool {
        self.tail_contains(self.head.var)
    }

    /// Cancel opposite tail pairs, make the head positive, and collapse an empty tail.
    pub fn canonical(&self) -> Canonical {
        if self.exp == 0 {
            return Canonical { negate: false, value: CanonicalValue::One };
        }
        let tail = cancel_pairs(&self.tail);
        let mut head = self.head;
        let mut negate = false;
        let tail = if head.negative {
            // (-h + T)^n = (-1)^n (h - T)^n
            head = head.flip();
            negate = self.exp.rem_euclid(2) == 1;
            tail.into_iter().map(SignedVar::flip).collect()
        } else {
            tail
        };
        if tail.is_empty() {
            return Canonical { negate, value: CanonicalValue::Power(head.var, self.exp) };
        }
        Canonical { negate, value: CanonicalValue::Atom(ExpansionAtom::new(head, tail, self.exp)) }
    }

    /// The base `(head, tail)`; atoms with equal bases multiply by adding exponents.
    pub fn base(&self) -> (SignedVar, &[SignedVar]) {
        (self.head, &self.tail)
    }
}

pub(crate) fn cancel_pairs(tail: &[SignedVar]) -> Vec<SignedVar> {
    let mut sorted = tail.to_vec();
    sorted.sort();
    let mut out: Vec<SignedVar> = Vec::with_capacity(sorted.len());
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i].var;
        let mut pos = 0usize;
        let mut neg = 0usize;
        while i < sorted.len() && sorted[i].var == v {
            if sorted[i].negative {
                neg += 1;
            } else {
                pos += 1;
            }
            i += 1;
        }
        let keep = pos.abs_diff(neg);
        let s = if pos > neg { v.pos() } else { v.neg() };
        out.extend(std::iter::repeat(s).take(keep));
    }
    out.sort();
    out
}

fn write_sum(f: &mut fmt::Formatter<'_>, head: SignedVar, tail: &[SignedVar]) -> fmt::Result {
    if head.negative {
        f.write_str("-")?;
    }
    write!(f, "{}", head.var)?;
    for t in tail {
        write!(f, " {} {}", if t.negative { '-' } else { '+' }, t.var)?;
    }
    Ok(())
}

impl fmt::Display for ExpansionAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        write_sum(f, self.head, &self.tail)?;
        write!(f, ")^{}", self.exp)
    }
}

impl fmt::Debug for ExpansionAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `denom^-1 * delta(numerator / denom) = sum_n numerator^n denom^(-n-1)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "DeltaRepr", into = "DeltaRepr")]
pub struct DeltaAtom {
    head: SignedVar,
    tail: Vec<SignedVar>,
    denom: Var,
}

#[derive(Serialize, Deserialize)]
struct DeltaRepr {
    numerator: Vec<SignedVar>,
    denom: Var,
}

impl TryFrom<DeltaRepr> for DeltaAtom {
    type Error = ExprError;
    fn try_from(r: DeltaRepr) -> Result<Self, ExprError> {
        DeltaAtom::new(r.numerator, r.denom)
    }
}

impl From<DeltaAtom> for DeltaRepr {
    fn from(d: DeltaAtom) -> Self {
        DeltaRepr { numerator: d.numerator(), denom: d.denom }
    }
}

impl DeltaAtom {
    /// The first numerator entry is the one carrying negative powers.
    pub fn new(numerator: Vec<SignedVar>, denom: Var) -> Result<Self, ExprError> {
        let Some((&head, rest)) = numerator.split_first() else {
            return Err(ExprError::Malformed("empty delta numerator".into()));
        };
        if numerator.iter().any(|s| s.var == denom) {
            return Err(ExprError::Malformed(format!(
                "delta denominator {denom} occurs in its numerator"
            )));
        }
        Ok(DeltaAtom { head, tail: cancel_pairs(rest), denom })
    }

    pub fn head(&self) -> SignedVar {
        self.head
    }

    pub fn tail(&self) -> &[SignedVar] {
        &self.tail
    }

    pub fn denom(&self) -> Var {
        self.denom
    }

    pub fn numerator(&self) -> Vec<SignedVar> {
        std::iter::once(self.head).chain(self.tail.iter().copied()).collect()
    }

    pub fn numerator_contains(&self, v: Var) -> bool {
        self.head.var == v || self.tail.iter().any(|s| s.var == v)
    }

    pub fn contains(&self, v: Var) -> bool {
        self.denom == v || self.numerator_contains(v)
    }

    /// `numerator^exp` as an atom (not canonicalized).
    pub fn numerator_power(&self, exp: i64) -> ExpansionAtom {
        ExpansionAtom::new(self.head, self.tail.clone(), exp)
    }

    pub(crate) fn with_numerator(&self, head: SignedVar, tail: Vec<SignedVar>) -> Result<Self, ExprError> {
        let mut num = vec![head];
        num.extend(tail);
        DeltaAtom::new(num, self.denom)
    }
}

impl fmt::Display for DeltaAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^-1*delta((", self.denom)?;
        write_sum(f, self.head, &self.tail)?;
        write!(f, ")/{})", self.denom)
    }
}

impl fmt::Debug for DeltaAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
