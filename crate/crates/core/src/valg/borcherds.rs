//! Commutative vertex algebras `Y(u,x)v = (e^{xD}u)·v`, and curated single-entry
//! mutants of them.

use super::laurent::{apply, exp_apply};
use super::{Axiom, Result, ValgError, VertexStructure};
use crate::scalars::{BasisId, Coefficient, Matrix, Rational, VectorCoeff};

/// A finite-dimensional commutative algebra with a derivation.
#[derive(Clone, Debug, PartialEq)]
pub struct Algebra {
    pub basis: Vec<BasisId>,
    /// `product[i][j] = e_i · e_j`
    pub product: Vec<Vec<VectorCoeff>>,
    pub derivation: Matrix,
    pub unit: Option<BasisId>,
}

impl Algebra {
    pub fn mul(&self, a: &VectorCoeff, b: &VectorCoeff) -> VectorCoeff {
        let mut out = VectorCoeff::new();
        for (bi, ca) in a.entries() {
            let i = self.pos(bi);
            for (bj, cb) in b.entries() {
                out.add_scaled(&self.product[i][self.pos(bj)], &(ca * cb));
            }
        }
        out
    }

    fn pos(&self, b: &BasisId) -> usize {
        self.basis.iter().position(|c| c == b).expect("vector in the algebra")
    }

    fn e(&self, i: usize) -> VectorCoeff {
        VectorCoeff::basis(self.basis[i].clone())
    }

    fn d(&self, v: &VectorCoeff) -> VectorCoeff {
        apply(&self.derivation, &self.basis, v)
    }

    /// Commutativity, associativity, the Leibniz rule, nilpotency of the derivation and
    /// the unit law.
    pub fn validate(&self) -> Result<()> {
        let n = self.basis.len();
        let name = |i: usize| self.basis[i].to_string();
        if self.product.len() != n || self.product.iter().any(|r| r.len() != n) {
            return Err(ValgError::Refused("product table does not match the basis".into()));
        }
        if self.derivation.rows() != n || self.derivation.cols() != n {
            return Err(ValgError::Refused("derivation does not match the basis".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if self.product[i][j] != self.product[j][i] {
                    return Err(ValgError::Refused(format!("not commutative on ({}, {})", name(i), name(j))));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (self.e(i), self.e(j));
                let mut leibniz = self.d(&self.mul(&a, &b));
                leibniz.add_scaled(&self.mul(&self.d(&a), &b), &Rational::from_integer(-1));
                leibniz.add_scaled(&self.mul(&a, &self.d(&b)), &Rational::from_integer(-1));
                if !leibniz.is_zero() {
                    return Err(ValgError::Refused(format!("Leibniz rule fails on ({}, {})", name(i), name(j))));
                }
                for k in 0..n {
                    let c = self.e(k);
                    if self.mul(&self.mul(&a, &b), &c) != self.mul(&a, &self.mul(&b, &c)) {
                        return Err(ValgError::Refused(format!(
                            "not associative on ({}, {}, {})",
                            name(i),
                            name(j),
                            name(k)
                        )));
                    }
                }
            }
        }
        if self.derivation.nilpotency_index().is_none() {
            return Err(ValgError::Refused("derivation is not nilpotent".into()));
        }
        if let Some(one) = &self.unit {
            let one = VectorCoeff::basis(one.clone());
            for i in 0..n {
                if self.mul(&one, &self.e(i)) != self.e(i) {
                    return Err(ValgError::Refused(format!("unit law fails on {}", name(i))));
                }
            }
        }
        Ok(())
    }
}

/// `Q[t]/(t^k)` with `D = t^2 d/dt`, basis `1, t, t2, ...`. (`d/dt` itself is not a
/// derivation here: it would send `t^k = 0` to `k t^(k-1)`.)
pub fn truncated_polynomial(k: usize) -> Algebra {
    let name = |i: usize| match i {
        0 => BasisId::new("1"),
        1 => BasisId::new("t"),
        _ => BasisId::new(&format!("t{i}")),
    };
    let basis: Vec<BasisId> = (0..k).map(name).collect();
    let product = (0..k)
        .map(|i| (0..k).map(|j| if i + j < k { VectorCoeff::basis(name(i + j)) } else { VectorCoeff::new() }).collect())
        .collect();
    let mut derivation = Matrix::zeros(k, k);
    for i in 1..k.saturating_sub(1) {
        derivation.set(i + 1, i, Rational::from_integer(i as i64));
    }
    Algebra { basis, product, derivation, unit: Some(name(0)) }
}

/// `Y(u,x)v = (e^{xD}u)·v` on `span`, which must be closed under every mode. The unit
/// becomes the vacuum when `unital` is set and the unit lies in `span`.
pub fn borcherds_construct(alg: &Algebra, unital: bool, span: Option<&[BasisId]>, name: &str) -> Result<VertexStructure> {
    alg.validate()?;
    let span: Vec<BasisId> = span.map(<[BasisId]>::to_vec).unwrap_or_else(|| alg.basis.clone());
    let vacuum = if unital {
        let one = alg.unit.clone().ok_or_else(|| ValgError::Refused("unital structure needs a unit".into()))?;
        if !span.contains(&one) {
            return Err(ValgError::Refused("the unit is outside the span".into()));
        }
        Some(one)
    } else {
        None
    };
    let mut entries = Vec::new();
    for u in &span {
        let series = exp_apply(&alg.derivation, &alg.basis, &VectorCoeff::basis(u.clone()));
        for v in &span {
            for (&k, du) in &series {
                let c = alg.mul(du, &VectorCoeff::basis(v.clone()));
                if let Some((b, _)) = c.entries().find(|(b, _)| !span.contains(b)) {
                    return Err(ValgError::Refused(format!("span not closed: Y({u},x){v} involves {b}")));
                }
                entries.push((u.clone(), -k - 1, v.clone(), c));
            }
        }
    }
    VertexStructure::new(name, span, entries, vacuum)
}

/// `Q[t]/(t^k)` for `k = 2..=5`, each followed by its ideal `tA` without vacuum. The
/// ideal is never injective: `Y(t^(k-1),x)` kills `tA`.
pub fn borcherds_family() -> Vec<VertexStructure> {
    let mut out = Vec::new();
    for k in 2..=5 {
        let alg = truncated_polynomial(k);
        let full = borcherds_construct(&alg, true, None, &format!("borcherds-k{k}"))
            .expect("truncated polynomial algebras are valid")
            .with_tags([Axiom::Injectivity, Axiom::VacuumProp, Axiom::CreationProp]);
        let ideal = borcherds_construct(&alg, false, Some(&alg.basis[1..]), &format!("borcherds-k{k}-ideal"))
            .expect("tA is closed under every mode");
        out.push(full);
        out.push(ideal);
    }
    out
}

/// One edited table entry: `u_n v` replaced by `value`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mutant {
    pub name: &'static str,
    pub base: &'static str,
    pub u: &'static str,
    pub n: i64,
    pub v: &'static str,
    pub value: &'static [(&'static str, i64)],
    /// The axiom the edit is designed to break.
    pub target: Axiom,
}

impl Mutant {
    pub fn apply(&self, base: &VertexStructure) -> Result<VertexStructure> {
        let (u, v) = (BasisId::new(self.u), BasisId::new(self.v));
        let mut entries: Vec<_> =
            base.entries().into_iter().filter(|(a, n, b, _)| !(a == &u && *n == self.n && b == &v)).collect();
        let value = VectorCoeff::from_entries(self.value.iter().map(|&(b, c)| (b, Rational::from_integer(c))));
        entries.push((u, self.n, v, value));
        let one = base.vacuum().map(|vac| vac.one.entries().next().expect("vacuum is a basis vector").0.clone());
        VertexStructure::new(self.name, base.basis().to_vec(), entries, one)
    }
}

pub const MUTANTS: [Mutant; 10] = [
    Mutant { name: "jacobi-break-1", base: "borcherds-k3", u: "t", n: -1, v: "t", value: &[("t", 1)], target: Axiom::Jacobi },
    Mutant { name: "jacobi-break-2", base: "borcherds-k4", u: "t", n: -1, v: "t2", value: &[("t3", 2)], target: Axiom::Jacobi },
    Mutant { name: "pole-insert", base: "borcherds-k3", u: "t", n: 0, v: "t", value: &[("1", 1)], target: Axiom::WeakComm },
    Mutant { name: "vacuum-break", base: "borcherds-k2", u: "1", n: -1, v: "t", value: &[("t", 2)], target: Axiom::VacuumProp },
    Mutant { name: "vacuum-shift", base: "borcherds-k5", u: "1", n: -2, v: "t", value: &[("t2", 1)], target: Axiom::VacuumProp },
    Mutant { name: "creation-break", base: "borcherds-k3", u: "t", n: -1, v: "1", value: &[("t2", 1)], target: Axiom::CreationProp },
    Mutant { name: "derivative-scale", base: "borcherds-k4", u: "t", n: -2, v: "1", value: &[("t2", 2)], target: Axiom::StrongCreation },
    Mutant { name: "skew-break", base: "borcherds-k4", u: "t2", n: -1, v: "t", value: &[("t3", 2)], target: Axiom::SkewSymmetry },
    Mutant { name: "bracket-break", base: "borcherds-k4", u: "t", n: -2, v: "t", value: &[("t3", 2)], target: Axiom::DBracket },
    Mutant { name: "injectivity-break", base: "borcherds-k3", u: "t2", n: -1, v: "1", value: &[], target: Axiom::Injectivity },
];

/// Every curated mutant next to the structure it produces.
pub fn mutants() -> Vec<(Mutant, VertexStructure)> {
    let family = borcherds_family();
    MUTANTS
        .iter()
        .map(|m| {
            let base = family.iter().find(|s| s.name == m.base).expect("mutant base is in the family");
            (m.clone(), m.apply(base).expect("curated mutants keep D nilpotent"))
        })
        .collect()
}
