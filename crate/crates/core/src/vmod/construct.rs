//! Modules `Y_W(u,x)m = (e^{xD}u)·m` from modules over a commutative algebra, and
//! curated single-entry mutants of them.

use super::ModuleStructure;
use crate::scalars::{BasisId, Coefficient, Rational, VectorCoeff};
use crate::valg::laurent::exp_apply;
use crate::valg::{borcherds_family, truncated_polynomial, Algebra, Result, ValgError, VertexStructure};

/// A module over an [`Algebra`]: `action[i][j] = e_i · m_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct AModule {
    pub basis: Vec<BasisId>,
    pub action: Vec<Vec<VectorCoeff>>,
}

impl AModule {
    fn pos(&self, b: &BasisId) -> usize {
        self.basis.iter().position(|c| c == b).expect("vector in the module")
    }

    pub fn act(&self, alg: &Algebra, a: &VectorCoeff, m: &VectorCoeff) -> VectorCoeff {
        let mut out = VectorCoeff::new();
        for (ba, ca) in a.entries() {
            let i = alg.basis.iter().position(|c| c == ba).expect("vector in the algebra");
            for (bm, cm) in m.entries() {
                out.add_scaled(&self.action[i][self.pos(bm)], &(ca * cm));
            }
        }
        out
    }

    /// `(ab)m = a(bm)` on basis triples, and `1m = m` when the algebra has a unit.
    pub fn validate(&self, alg: &Algebra) -> Result<()> {
        let n = alg.basis.len();
        if self.action.len() != n || self.action.iter().any(|r| r.len() != self.basis.len()) {
            return Err(ValgError::Refused("action table does not match the bases".into()));
        }
        for row in &self.action {
            for c in row {
                if let Some((b, _)) = c.entries().find(|(b, _)| !self.basis.contains(b)) {
                    return Err(ValgError::Refused(format!("action leaves the module: {b}")));
                }
            }
        }
        let e = |i: usize| VectorCoeff::basis(alg.basis[i].clone());
        for i in 0..n {
            for j in 0..n {
                for m in &self.basis {
                    let m = VectorCoeff::basis(m.clone());
                    let lhs = self.act(alg, &alg.mul(&e(i), &e(j)), &m);
                    let rhs = self.act(alg, &e(i), &self.act(alg, &e(j), &m));
                    if lhs != rhs {
                        return Err(ValgError::Refused(format!(
                            "action is not associative on ({}, {}, {})",
                            alg.basis[i],
                            alg.basis[j],
                            m.entries().next().expect("basis vector").0
                        )));
                    }
                }
            }
        }
        if let Some(one) = &alg.unit {
            let one = VectorCoeff::basis(one.clone());
            for m in &self.basis {
                let m = VectorCoeff::basis(m.clone());
                if self.act(alg, &one, &m) != m {
                    return Err(ValgError::Refused(format!("unit does not act as 1 on {}", m.entries().next().unwrap().0)));
                }
            }
        }
        Ok(())
    }
}

/// `A` acting on itself.
pub fn regular_module(alg: &Algebra) -> AModule {
    AModule { basis: alg.basis.clone(), action: alg.product.clone() }
}

/// The span of `keep`, which must be an ideal.
pub fn ideal_module(alg: &Algebra, keep: &[BasisId]) -> Result<AModule> {
    let action: Vec<Vec<VectorCoeff>> = alg
        .basis
        .iter()
        .map(|a| keep.iter().map(|m| alg.mul(&VectorCoeff::basis(a.clone()), &VectorCoeff::basis(m.clone()))).collect())
        .collect();
    for c in action.iter().flatten() {
        if let Some((b, _)) = c.entries().find(|(b, _)| !keep.contains(b)) {
            return Err(ValgError::Refused(format!("span is not an ideal: it reaches {b}")));
        }
    }
    Ok(AModule { basis: keep.to_vec(), action })
}

/// `A / span(kill)`, with `kill` spanning an ideal; the remaining basis vectors are the
/// module basis.
pub fn quotient_module(alg: &Algebra, kill: &[BasisId]) -> Result<AModule> {
    ideal_module(alg, kill)?;
    let basis: Vec<BasisId> = alg.basis.iter().filter(|b| !kill.contains(b)).cloned().collect();
    let action = alg
        .basis
        .iter()
        .map(|a| {
            basis
                .iter()
                .map(|m| {
                    let full = alg.mul(&VectorCoeff::basis(a.clone()), &VectorCoeff::basis(m.clone()));
                    VectorCoeff::from_entries(full.entries().filter(|(b, _)| !kill.contains(b)).map(|(b, c)| (b.clone(), c.clone())))
                })
                .collect()
        })
        .collect();
    Ok(AModule { basis, action })
}

/// `Y_W(u,x)m = (e^{xD}u)·m` for `u` in the structure's basis, which must lie in `alg`.
/// The Jacobi identity for `W` needs nothing beyond the module law: both sides reduce to
/// `(e^{x1 D}u)(e^{x2 D}v)·m`.
pub fn module_construct(s: &VertexStructure, alg: &Algebra, module: &AModule, name: &str) -> Result<ModuleStructure> {
    alg.validate()?;
    module.validate(alg)?;
    if let Some(b) = s.basis().iter().find(|b| !alg.basis.contains(b)) {
        return Err(ValgError::Refused(format!("{b} is in the structure but not in the algebra")));
    }
    let mut entries = Vec::new();
    for u in s.basis() {
        let series = exp_apply(&alg.derivation, &alg.basis, &VectorCoeff::basis(u.clone()));
        for m in &module.basis {
            for (&k, du) in &series {
                entries.push((u.clone(), -k - 1, m.clone(), module.act(alg, du, &VectorCoeff::basis(m.clone()))));
            }
        }
    }
    ModuleStructure::new(name, s.clone(), module.basis.clone(), entries)
}

/// Regular, ideal and quotient modules over every member of the Borcherds family.
///
/// Over `A = Q[t]/(t^k)` the modules are `A`, `tA` and `A/t^(k-1)A`; over the ideal
/// structure `tA` they are `tA`, `t^2 A` (when nonzero) and `A/t^(k-1)A`.
pub fn module_family() -> Vec<ModuleStructure> {
    let family = borcherds_family();
    let mut out = Vec::new();
    for k in 2..=5usize {
        let alg = truncated_polynomial(k);
        let quotient = quotient_module(&alg, &alg.basis[k - 1..]).expect("t^(k-1) spans an ideal");
        let from = |j: usize| ideal_module(&alg, &alg.basis[j..]).expect("t^j A is an ideal");
        for s in family.iter().filter(|s| s.name.starts_with(&format!("borcherds-k{k}"))) {
            let mut modules = Vec::new();
            if s.vacuum().is_some() {
                modules.push(("regular", regular_module(&alg)));
                modules.push(("ideal-module", from(1)));
            } else {
                modules.push(("regular", from(1)));
                if k > 2 {
                    modules.push(("ideal-module", from(2)));
                }
            }
            modules.push(("quotient", quotient.clone()));
            for (kind, module) in modules {
                out.push(module_construct(s, &alg, &module, &format!("{}-{kind}", s.name)).expect("valid module"));
            }
        }
    }
    out
}

/// One edited module table entry: `u_n w` replaced by `value`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleMutant {
    pub name: &'static str,
    pub base: &'static str,
    pub u: &'static str,
    pub n: i64,
    pub w: &'static str,
    pub value: &'static [(&'static str, i64)],
}

impl ModuleMutant {
    pub fn apply(&self, base: &ModuleStructure) -> Result<ModuleStructure> {
        let (u, w) = (BasisId::new(self.u), BasisId::new(self.w));
        let mut entries: Vec<_> =
            base.entries().into_iter().filter(|(a, n, b, _)| !(a == &u && *n == self.n && b == &w)).collect();
        let value = VectorCoeff::from_entries(self.value.iter().map(|&(b, c)| (b, Rational::from_integer(c))));
        entries.push((u, self.n, w, value));
        ModuleStructure::new(self.name, base.over().clone(), base.wbasis().to_vec(), entries)
    }
}

pub const MODULE_MUTANTS: [ModuleMutant; 5] = [
    ModuleMutant { name: "m-jacobi-break", base: "borcherds-k3-regular", u: "t", n: -1, w: "t", value: &[("t", 1)] },
    ModuleMutant { name: "m-pole-insert", base: "borcherds-k3-regular", u: "t", n: 0, w: "t", value: &[("1", 1)] },
    ModuleMutant { name: "m-vacuum-break", base: "borcherds-k2-quotient", u: "1", n: -1, w: "1", value: &[("1", 2)] },
    ModuleMutant { name: "m-derivative-break", base: "borcherds-k4-regular", u: "t", n: -2, w: "1", value: &[("t2", 2)] },
    ModuleMutant { name: "m-ideal-break", base: "borcherds-k4-ideal-module", u: "t", n: -1, w: "t", value: &[] },
];

/// Every module mutant next to the module it produces.
pub fn module_mutants() -> Vec<(ModuleMutant, ModuleStructure)> {
    let family = module_family();
    MODULE_MUTANTS
        .iter()
        .map(|m| {
            let base = family.iter().find(|s| s.name == m.base).expect("mutant base is in the module family");
            (m.clone(), m.apply(base).expect("curated module mutants are well formed"))
        })
        .collect()
}
