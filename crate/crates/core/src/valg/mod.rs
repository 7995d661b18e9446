//! Finite vertex structures with polynomial mode tables, their axiom checkers, and the
//! implication matrix.
//!
//! A structure stores the modes `u_n v` for basis vectors `u, v`, finitely many per
//! pair, so `Y(u,x)v` is a Laurent polynomial and every check below is exact except
//! the Jacobi identity, which is compared coefficient by coefficient on a window.

mod axioms;
mod borcherds;
mod config;
mod implication;
pub(crate) mod laurent;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expansion::{Monomial, Var};
use crate::scalars::{BasisId, Coefficient, Matrix, Rational, VectorCoeff};
use crate::series::{SeriesError, WindowedSeries};

pub use axioms::{
    check_axiom, holds_at, jacobi_coefficients, jacobi_via_three_term, minimal_pole_order, BasisTriple, CheckParams,
    Checkable, PropertyReport, TripleProducts, Verdict, WeakKind, Witness,
};
pub(crate) use axioms::{check_jacobi, check_vf_skew, check_weak};
pub use borcherds::{borcherds_construct, borcherds_family, mutants, truncated_polynomial, Algebra, Mutant};
pub use config::{StructureConfig, ModeEntry};
pub use implication::{
    all_reports, implication_matrix, matrix_from_reports, Implication, MatrixReport, RowReport, RowStatus, Violation,
    IMPLICATIONS,
};
use laurent::{add1, add2, Poly1, Poly2};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValgError {
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error("construction refused: {0}")]
    Refused(String),
    /// Two independent computations of the same quantity disagree.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("{0} needs a vacuum vector")]
    NoVacuum(&'static str),
    #[error("{0}")]
    Series(#[from] SeriesError),
    #[error("{0}")]
    Expr(#[from] crate::expansion::ExprError),
    #[error("{0}")]
    Elem(#[from] crate::elemprop::ElemError),
}

pub type Result<T> = std::result::Result<T, ValgError>;

/// The axioms and derived properties a structure can be checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Jacobi,
    WeakComm,
    WeakAssoc,
    WeakSkewAssoc,
    VfSkewSymmetry,
    SkewSymmetry,
    DDerivative,
    DBracket,
    VacuumProp,
    CreationProp,
    StrongCreation,
    Injectivity,
}

impl Axiom {
    pub const ALL: [Axiom; 12] = [
        Axiom::Jacobi,
        Axiom::WeakComm,
        Axiom::WeakAssoc,
        Axiom::WeakSkewAssoc,
        Axiom::VfSkewSymmetry,
        Axiom::SkewSymmetry,
        Axiom::DDerivative,
        Axiom::DBracket,
        Axiom::VacuumProp,
        Axiom::CreationProp,
        Axiom::StrongCreation,
        Axiom::Injectivity,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Axiom::Jacobi => "jacobi",
            Axiom::WeakComm => "weak_comm",
            Axiom::WeakAssoc => "weak_assoc",
            Axiom::WeakSkewAssoc => "weak_skew_assoc",
            Axiom::VfSkewSymmetry => "vf_skew_symmetry",
            Axiom::SkewSymmetry => "skew_symmetry",
            Axiom::DDerivative => "d_derivative",
            Axiom::DBracket => "d_bracket",
            Axiom::VacuumProp => "vacuum_prop",
            Axiom::CreationProp => "creation_prop",
            Axiom::StrongCreation => "strong_creation",
            Axiom::Injectivity => "injectivity",
        }
    }

    pub fn anchor(self) -> &'static str {
        match self {
            Axiom::Jacobi => {
                "x0^-1 δ((x1-x2)/x0) Y(u,x1)Y(v,x2) - x0^-1 δ((-x2+x1)/x0) Y(v,x2)Y(u,x1) = x1^-1 δ((x2+x0)/x1) Y(Y(u,x0)v,x2)"
            }
            Axiom::WeakComm => "(x1-x2)^m [Y(u,x1)Y(v,x2) - Y(v,x2)Y(u,x1)] = 0",
            Axiom::WeakAssoc => "(x0+x2)^m [Y(u,x0+x2)Y(v,x2)w - Y(Y(u,x0)v,x2)w] = 0",
            Axiom::WeakSkewAssoc => "(x1-x0)^m [Y(v,-x0+x1)Y(u,x1)w - Y(Y(u,x0)v,x1-x0)w] = 0",
            Axiom::VfSkewSymmetry => "Y(Y(u,x0)v,x2) = Y(Y(v,-x0)u,x2+x0)",
            Axiom::SkewSymmetry => "Y(u,x)v = e^{xD}Y(v,-x)u",
            Axiom::DDerivative => "Y(Du,x) = d/dx Y(u,x)",
            Axiom::DBracket => "[D,Y(u,x)] = d/dx Y(u,x)",
            Axiom::VacuumProp => "Y(1,x) = 1",
            Axiom::CreationProp => "Y(u,x)1 in V[[x]] and Y(u,0)1 = u",
            Axiom::StrongCreation => "Y(u,x)1 = e^{xD}u",
            Axiom::Injectivity => "v -> Y(v,x) is injective",
        }
    }

    pub fn needs_vacuum(self) -> bool {
        matches!(
            self,
            Axiom::SkewSymmetry
                | Axiom::DDerivative
                | Axiom::DBracket
                | Axiom::VacuumProp
                | Axiom::CreationProp
                | Axiom::StrongCreation
        )
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for Axiom {
    type Err = ValgError;
    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| ValgError::Invalid(format!("unknown axiom {s:?}")))
    }
}

/// The vacuum vector and `D`, read off as `Dv = v_{-2} 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct VacuumData {
    pub one: VectorCoeff,
    pub dop: Matrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VertexStructure {
    pub name: String,
    basis: Vec<BasisId>,
    /// `modes[u][v][n] = u_n v`
    modes: Vec<Vec<BTreeMap<i64, VectorCoeff>>>,
    vacuum: Option<VacuumData>,
    /// Minor axioms the structure was built to satisfy.
    pub tags: BTreeSet<Axiom>,
}

pub(crate) fn x() -> Var {
    Var::named("x")
}

impl VertexStructure {
    /// Build from a mode list `(u, n, v, u_n v)`. Repeated entries add up.
    pub fn new(
        name: &str,
        basis: Vec<BasisId>,
        entries: impl IntoIterator<Item = (BasisId, i64, BasisId, VectorCoeff)>,
        vacuum: Option<BasisId>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for b in &basis {
            if !seen.insert(b.clone()) {
                return Err(ValgError::Invalid(format!("basis element {b} listed twice")));
            }
        }
        if basis.is_empty() {
            return Err(ValgError::Invalid("empty basis".into()));
        }
        let lookup = basis.clone();
        let pos = |b: &BasisId| {
            lookup
                .iter()
                .position(|c| c == b)
                .ok_or_else(|| ValgError::Invalid(format!("{b} is not a basis element")))
        };
        let d = basis.len();
        let mut modes = vec![vec![BTreeMap::<i64, VectorCoeff>::new(); d]; d];
        for (u, n, v, c) in entries {
            let (i, j) = (pos(&u)?, pos(&v)?);
            for (b, _) in c.entries() {
                pos(b)?;
            }
            let slot = modes[i][j].entry(n).or_default();
            slot.add_assign_ref(&c);
        }
        for row in &mut modes {
            for m in row.iter_mut() {
                m.retain(|_, c| !c.is_zero());
            }
        }
        let mut s = VertexStructure { name: name.to_string(), basis, modes, vacuum: None, tags: BTreeSet::new() };
        if let Some(one) = vacuum {
            let k = pos(&one)?;
            let mut dop = Matrix::zeros(d, d);
            for j in 0..d {
                let image = s.modes[j][k].get(&-2).cloned().unwrap_or_default();
                for (i, b) in s.basis.iter().enumerate() {
                    dop.set(i, j, image.get(b));
                }
            }
            if dop.nilpotency_index().is_none() {
                return Err(ValgError::Invalid("the derived D = v_{-2}1 is not nilpotent".into()));
            }
            s.vacuum = Some(VacuumData { one: VectorCoeff::basis(one), dop });
        }
        Ok(s)
    }

    pub fn with_tags(mut self, tags: impl IntoIterator<Item = Axiom>) -> Self {
        self.tags = tags.into_iter().collect();
        self
    }

    pub fn basis(&self) -> &[BasisId] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn vacuum(&self) -> Option<&VacuumData> {
        self.vacuum.as_ref()
    }

    pub(crate) fn vac(&self, what: &'static str) -> Result<&VacuumData> {
        self.vacuum.as_ref().ok_or(ValgError::NoVacuum(what))
    }

    pub fn index_of(&self, b: &BasisId) -> Option<usize> {
        self.basis.iter().position(|c| c == b)
    }

    /// The table as `(u, v) -> n -> u_n v`.
    pub fn ytable(&self) -> BTreeMap<(BasisId, BasisId), BTreeMap<i64, VectorCoeff>> {
        let mut out = BTreeMap::new();
        for (i, u) in self.basis.iter().enumerate() {
            for (j, v) in self.basis.iter().enumerate() {
                if !self.modes[i][j].is_empty() {
                    out.insert((u.clone(), v.clone()), self.modes[i][j].clone());
                }
            }
        }
        out
    }

    /// Every mode as `(u, n, v, u_n v)`, in table order.
    pub fn entries(&self) -> Vec<(BasisId, i64, BasisId, VectorCoeff)> {
        self.ytable()
            .into_iter()
            .flat_map(|((u, v), row)| row.into_iter().map(move |(n, c)| (u.clone(), n, v.clone(), c)))
            .collect()
    }

    pub(crate) fn ytable_row(&self, u: usize, v: usize) -> &BTreeMap<i64, VectorCoeff> {
        &self.modes[u][v]
    }

    pub fn mode(&self, u: usize, n: i64, v: usize) -> Option<&VectorCoeff> {
        self.modes[u][v].get(&n)
    }

    /// Largest pole order over the table.
    pub fn max_pole(&self) -> u32 {
        self.modes
            .iter()
            .flatten()
            .filter_map(|m| m.keys().next_back())
            .map(|&n| (n + 1).max(0) as u32)
            .max()
            .unwrap_or(0)
    }

    /// Largest nonnegative power of `x` over the table.
    pub fn max_degree(&self) -> u32 {
        self.modes
            .iter()
            .flatten()
            .filter_map(|m| m.keys().next())
            .map(|&n| (-n - 1).max(0) as u32)
            .max()
            .unwrap_or(0)
    }

    fn coords(&self, v: &VectorCoeff) -> Vec<(usize, Rational)> {
        v.entries()
            .map(|(b, c)| (self.index_of(b).expect("vector in the structure's span"), c.clone()))
            .collect()
    }

    /// `Y(u,x)v` for arbitrary vectors, keyed by the power of `x`.
    pub(crate) fn y(&self, u: &VectorCoeff, v: &VectorCoeff) -> Poly1 {
        let mut out = Poly1::new();
        for (i, a) in self.coords(u) {
            for (j, b) in self.coords(v) {
                let ab = &a * &b;
                for (&n, c) in &self.modes[i][j] {
                    add1(&mut out, -n - 1, c, &ab);
                }
            }
        }
        out
    }

    pub(crate) fn e(&self, i: usize) -> VectorCoeff {
        VectorCoeff::basis(self.basis[i].clone())
    }

    /// `Y(u,x1)Y(v,x2)w` keyed by `(x1, x2)` powers.
    pub(crate) fn compose(&self, u: &VectorCoeff, v: &VectorCoeff, w: &VectorCoeff) -> Poly2 {
        let mut out = Poly2::new();
        let one = Rational::one();
        for (e2, inner) in self.y(v, w) {
            for (e1, c) in self.y(u, &inner) {
                add2(&mut out, (e1, e2), &c, &one);
            }
        }
        out
    }

    /// `Y(Y(u,x0)v,x2)w` keyed by `(x0, x2)` powers.
    pub(crate) fn iterate(&self, u: &VectorCoeff, v: &VectorCoeff, w: &VectorCoeff) -> Poly2 {
        let mut out = Poly2::new();
        let one = Rational::one();
        for (e0, inner) in self.y(u, v) {
            for (e2, c) in self.y(&inner, w) {
                add2(&mut out, (e0, e2), &c, &one);
            }
        }
        out
    }

    pub(crate) fn dop(&self, v: &VectorCoeff) -> Result<VectorCoeff> {
        let vac = self.vac("D")?;
        Ok(laurent::apply(&vac.dop, &self.basis, v))
    }
}

fn poly1_series(p: &Poly1, var: Var) -> WindowedSeries<VectorCoeff> {
    WindowedSeries::polynomial([var], p.iter().map(|(&k, c)| (Monomial::var(var, k), c.clone())))
        .expect("single variable polynomial")
}

fn poly2_series(p: &Poly2, a: Var, b: Var) -> WindowedSeries<VectorCoeff> {
    WindowedSeries::polynomial(
        [a, b],
        p.iter().map(|(&(i, j), c)| (Monomial::from_pairs([(a, i), (b, j)]), c.clone())),
    )
    .expect("two variable polynomial")
}

/// `Y(u,x)v` as a series in `x`.
pub fn y_series(s: &VertexStructure, u: &VectorCoeff, v: &VectorCoeff) -> WindowedSeries<VectorCoeff> {
    poly1_series(&s.y(u, v), x())
}

/// `Y(u,x1)Y(v,x2)w` in the variables `x1, x2`.
pub fn compose_y(
    s: &VertexStructure,
    u: &VectorCoeff,
    x1: Var,
    v: &VectorCoeff,
    x2: Var,
    w: &VectorCoeff,
) -> WindowedSeries<VectorCoeff> {
    poly2_series(&s.compose(u, v, w), x1, x2)
}

/// `Y(Y(u,x0)v,x2)w` in the variables `x0, x2`.
pub fn iterate_y(
    s: &VertexStructure,
    u: &VectorCoeff,
    x0: Var,
    v: &VectorCoeff,
    x2: Var,
    w: &VectorCoeff,
) -> WindowedSeries<VectorCoeff> {
    poly2_series(&s.iterate(u, v, w), x0, x2)
}

#[cfg(test)]
mod tests;
