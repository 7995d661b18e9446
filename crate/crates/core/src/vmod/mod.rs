//! Modules `W` for finite vertex structures: `Y_W(u,x)w` stored as finitely many modes
//! per pair, the module axiom checkers, and the harness comparing weak associativity
//! and weak skew-associativity with the module Jacobi identity.

mod config;
mod construct;
mod harness;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scalars::{BasisId, Coefficient, Rational, VectorCoeff};
use crate::valg::laurent::{add1, add2, derivative1, diff1, Poly1, Poly2};
use crate::valg::{
    BasisTriple, CheckParams, Checkable, PropertyReport, Result, TripleProducts, ValgError, Verdict, VertexStructure,
    WeakKind, Witness,
};

pub use config::{ModuleConfig, WModeEntry};
pub use construct::{
    ideal_module, module_construct, module_family, module_mutants, quotient_module, regular_module, AModule,
    ModuleMutant, MODULE_MUTANTS,
};
pub use harness::{
    main_theorem_harness, EquivalenceRow, HarnessReport, HarnessRowReport, MemberRow, RowClaim, RowOutcome, HARNESS_ROWS,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuleAxiom {
    MJacobi,
    MWeakComm,
    MWeakAssoc,
    MWeakSkewAssoc,
    MVfSkewSymmetry,
    MVacuumProp,
    MDDerivative,
}

impl ModuleAxiom {
    pub const ALL: [ModuleAxiom; 7] = [
        ModuleAxiom::MJacobi,
        ModuleAxiom::MWeakComm,
        ModuleAxiom::MWeakAssoc,
        ModuleAxiom::MWeakSkewAssoc,
        ModuleAxiom::MVfSkewSymmetry,
        ModuleAxiom::MVacuumProp,
        ModuleAxiom::MDDerivative,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ModuleAxiom::MJacobi => "m_jacobi",
            ModuleAxiom::MWeakComm => "m_weak_comm",
            ModuleAxiom::MWeakAssoc => "m_weak_assoc",
            ModuleAxiom::MWeakSkewAssoc => "m_weak_skew_assoc",
            ModuleAxiom::MVfSkewSymmetry => "m_vf_skew_symmetry",
            ModuleAxiom::MVacuumProp => "m_vacuum_prop",
            ModuleAxiom::MDDerivative => "m_d_derivative",
        }
    }

    pub fn anchor(self) -> &'static str {
        match self {
            ModuleAxiom::MJacobi => {
                "x0^-1 δ((x1-x2)/x0) Y_W(u,x1)Y_W(v,x2) - x0^-1 δ((-x2+x1)/x0) Y_W(v,x2)Y_W(u,x1) = x1^-1 δ((x2+x0)/x1) Y_W(Y(u,x0)v,x2)"
            }
            ModuleAxiom::MWeakComm => "(x1-x2)^m [Y_W(u,x1)Y_W(v,x2) - Y_W(v,x2)Y_W(u,x1)] = 0",
            ModuleAxiom::MWeakAssoc => "(x0+x2)^m [Y_W(u,x0+x2)Y_W(v,x2)w - Y_W(Y(u,x0)v,x2)w] = 0",
            ModuleAxiom::MWeakSkewAssoc => "(x1-x0)^m [Y_W(v,-x0+x1)Y_W(u,x1)w - Y_W(Y(u,x0)v,x1-x0)w] = 0",
            ModuleAxiom::MVfSkewSymmetry => "Y_W(Y(u,x0)v,x2) = Y_W(Y(v,-x0)u,x2+x0)",
            ModuleAxiom::MVacuumProp => "Y_W(1,x) = 1",
            ModuleAxiom::MDDerivative => "Y_W(Dv,x) = d/dx Y_W(v,x)",
        }
    }

    pub fn needs_vacuum(self) -> bool {
        matches!(self, ModuleAxiom::MVacuumProp | ModuleAxiom::MDDerivative)
    }
}

impl Checkable for ModuleAxiom {
    fn id(self) -> &'static str {
        ModuleAxiom::id(self)
    }

    fn anchor(self) -> &'static str {
        ModuleAxiom::anchor(self)
    }
}

impl fmt::Display for ModuleAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ModuleAxiom {
    type Err = ValgError;

    fn from_str(s: &str) -> Result<Self> {
        ModuleAxiom::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| ValgError::Invalid(format!("unknown module axiom {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModuleStructure {
    pub name: String,
    over: VertexStructure,
    wbasis: Vec<BasisId>,
    /// `modes[u][w][n] = u_n w`
    modes: Vec<Vec<BTreeMap<i64, VectorCoeff>>>,
}

impl ModuleStructure {
    /// Build from a mode list `(u, n, w, u_n w)` with `u` in the structure and `w` in
    /// `wbasis`. Repeated entries add up.
    pub fn new(
        name: &str,
        over: VertexStructure,
        wbasis: Vec<BasisId>,
        entries: impl IntoIterator<Item = (BasisId, i64, BasisId, VectorCoeff)>,
    ) -> Result<Self> {
        if wbasis.is_empty() {
            return Err(ValgError::Invalid("empty module basis".into()));
        }
        let mut seen = BTreeSet::new();
        for b in &wbasis {
            if !seen.insert(b.clone()) {
                return Err(ValgError::Invalid(format!("module basis element {b} listed twice")));
            }
        }
        let wpos = |b: &BasisId| {
            wbasis
                .iter()
                .position(|c| c == b)
                .ok_or_else(|| ValgError::Invalid(format!("{b} is not a module basis element")))
        };
        let mut modes = vec![vec![BTreeMap::<i64, VectorCoeff>::new(); wbasis.len()]; over.dim()];
        for (u, n, w, c) in entries {
            let i = over.index_of(&u).ok_or_else(|| ValgError::Invalid(format!("{u} is not in {}", over.name)))?;
            let j = wpos(&w)?;
            for (b, _) in c.entries() {
                wpos(b)?;
            }
            modes[i][j].entry(n).or_default().add_assign_ref(&c);
        }
        for row in &mut modes {
            for m in row.iter_mut() {
                m.retain(|_, c| !c.is_zero());
            }
        }
        Ok(ModuleStructure { name: name.to_string(), over, wbasis, modes })
    }

    /// `W = V` with `Y_W = Y`.
    pub fn regular(s: &VertexStructure) -> Self {
        ModuleStructure::new(&format!("{}-regular", s.name), s.clone(), s.basis().to_vec(), s.entries())
            .expect("a structure is a module over itself")
    }

    pub fn over(&self) -> &VertexStructure {
        &self.over
    }

    pub fn wbasis(&self) -> &[BasisId] {
        &self.wbasis
    }

    /// Every mode as `(u, n, w, u_n w)`, in table order.
    pub fn entries(&self) -> Vec<(BasisId, i64, BasisId, VectorCoeff)> {
        let mut out = Vec::new();
        for (i, u) in self.over.basis().iter().enumerate() {
            for (j, w) in self.wbasis.iter().enumerate() {
                for (&n, c) in &self.modes[i][j] {
                    out.push((u.clone(), n, w.clone(), c.clone()));
                }
            }
        }
        out
    }

    pub fn mode(&self, u: usize, n: i64, w: usize) -> Option<&VectorCoeff> {
        self.modes[u][w].get(&n)
    }

    fn w(&self, j: usize) -> VectorCoeff {
        VectorCoeff::basis(self.wbasis[j].clone())
    }

    /// `Y_W(u,x)w`, keyed by the power of `x`.
    pub(crate) fn yw(&self, u: &VectorCoeff, w: &VectorCoeff) -> Poly1 {
        let mut out = Poly1::new();
        for (bu, a) in u.entries() {
            let i = self.over.index_of(bu).expect("vector in the structure");
            for (bw, b) in w.entries() {
                let j = self.wbasis.iter().position(|c| c == bw).expect("vector in the module");
                let ab = a * b;
                for (&n, c) in &self.modes[i][j] {
                    add1(&mut out, -n - 1, c, &ab);
                }
            }
        }
        out
    }

    fn table_pole(&self) -> u32 {
        self.modes.iter().flatten().filter_map(|m| m.keys().next_back()).map(|&n| (n + 1).max(0) as u32).max().unwrap_or(0)
    }

    fn table_degree(&self) -> u32 {
        self.modes.iter().flatten().filter_map(|m| m.keys().next()).map(|&n| (-n - 1).max(0) as u32).max().unwrap_or(0)
    }
}

impl TripleProducts for ModuleStructure {
    fn name(&self) -> &str {
        &self.name
    }

    fn basis_triples(&self) -> Vec<BasisTriple> {
        let vb = self.over.basis();
        let mut out = Vec::new();
        for u in vb {
            for v in vb {
                for (k, w) in self.wbasis.iter().enumerate() {
                    out.push((
                        [VectorCoeff::basis(u.clone()), VectorCoeff::basis(v.clone()), self.w(k)],
                        vec![u.to_string(), v.to_string(), w.to_string()],
                    ));
                }
            }
        }
        out
    }

    fn product(&self, u: &VectorCoeff, v: &VectorCoeff, w: &VectorCoeff) -> Poly2 {
        let mut out = Poly2::new();
        let one = Rational::one();
        for (e2, inner) in self.yw(v, w) {
            for (e1, c) in self.yw(u, &inner) {
                add2(&mut out, (e1, e2), &c, &one);
            }
        }
        out
    }

    fn iterate(&self, u: &VectorCoeff, v: &VectorCoeff, w: &VectorCoeff) -> Poly2 {
        let mut out = Poly2::new();
        let one = Rational::one();
        for (e0, inner) in self.over.y(u, v) {
            for (e2, c) in self.yw(&inner, w) {
                add2(&mut out, (e0, e2), &c, &one);
            }
        }
        out
    }

    fn max_pole(&self) -> u32 {
        self.table_pole().max(self.over.max_pole())
    }

    fn max_degree(&self) -> u32 {
        self.table_degree().max(self.over.max_degree())
    }
}

fn first_failure(
    axiom: ModuleAxiom,
    cases: impl IntoIterator<Item = (Vec<String>, Poly1)>,
) -> PropertyReport<ModuleAxiom> {
    for (at, diff) in cases {
        if let Some((&e, c)) = diff.iter().next() {
            let monomial = crate::expansion::Monomial::var(crate::valg::x(), e).to_string();
            let witness = Witness::Counterexample { at, monomial, value: c.to_string() };
            return PropertyReport::new(axiom, Verdict::Fail, Some(witness));
        }
    }
    PropertyReport::new(axiom, Verdict::Pass, None)
}

pub fn check_module_axiom(
    m: &ModuleStructure,
    axiom: ModuleAxiom,
    params: &CheckParams,
) -> Result<PropertyReport<ModuleAxiom>> {
    let vac = if axiom.needs_vacuum() { Some(m.over.vac(axiom.id())?) } else { None };
    let mut report = match axiom {
        ModuleAxiom::MJacobi => PropertyReport::from_outcome(axiom, crate::valg::check_jacobi(m, params.window_for(m))?),
        ModuleAxiom::MWeakComm => {
            PropertyReport::from_outcome(axiom, crate::valg::check_weak(m, WeakKind::Comm, params.m_max_for(m)))
        }
        ModuleAxiom::MWeakAssoc => {
            PropertyReport::from_outcome(axiom, crate::valg::check_weak(m, WeakKind::Assoc, params.m_max_for(m)))
        }
        ModuleAxiom::MWeakSkewAssoc => {
            PropertyReport::from_outcome(axiom, crate::valg::check_weak(m, WeakKind::SkewAssoc, params.m_max_for(m)))
        }
        ModuleAxiom::MVfSkewSymmetry => PropertyReport::from_outcome(axiom, crate::valg::check_vf_skew(m)),
        ModuleAxiom::MVacuumProp => {
            let one = &vac.expect("vacuum checked above").one;
            let cases = (0..m.wbasis.len()).map(|j| {
                let w = m.w(j);
                let mut constant = Poly1::new();
                add1(&mut constant, 0, &w, &Rational::one());
                (vec![m.wbasis[j].to_string()], diff1(&m.yw(one, &w), &constant))
            });
            first_failure(axiom, cases)
        }
        ModuleAxiom::MDDerivative => {
            let mut cases = Vec::new();
            for vb in m.over.basis() {
                let v = VectorCoeff::basis(vb.clone());
                let dv = m.over.dop(&v)?;
                for j in 0..m.wbasis.len() {
                    let w = m.w(j);
                    cases.push((
                        vec![vb.to_string(), m.wbasis[j].to_string()],
                        diff1(&m.yw(&dv, &w), &derivative1(&m.yw(&v, &w))),
                    ));
                }
            }
            first_failure(axiom, cases)
        }
    };
    match axiom {
        ModuleAxiom::MJacobi => report.window = Some(params.window_for(m)),
        ModuleAxiom::MWeakComm | ModuleAxiom::MWeakAssoc | ModuleAxiom::MWeakSkewAssoc => {
            report.m_max = Some(params.m_max_for(m))
        }
        _ => {}
    }
    Ok(report)
}

/// Every module axiom's report; the vacuum ones are `N/A` over a vacuum-free structure.
pub fn all_module_reports(
    m: &ModuleStructure,
    params: &CheckParams,
) -> Result<BTreeMap<ModuleAxiom, PropertyReport<ModuleAxiom>>> {
    let mut out = BTreeMap::new();
    for a in ModuleAxiom::ALL {
        let r = if a.needs_vacuum() && m.over.vacuum().is_none() {
            PropertyReport::new(a, Verdict::NotApplicable, None)
        } else {
            check_module_axiom(m, a, params)?
        };
        out.insert(a, r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
