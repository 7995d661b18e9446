//! Replacement theorems as premise/conclusion rows, replayed on a corpus.
//!
//! A row is only evidence when some member satisfies all its premises. Rows that no
//! member reaches are reported as untested rather than passed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::axioms::{check_axiom, CheckParams, PropertyReport, Verdict};
use super::{Axiom, Result, VertexStructure};

use Axiom::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Implication {
    pub id: &'static str,
    pub anchor: &'static str,
    pub premises: &'static [Axiom],
    pub conclusion: Axiom,
}

const fn row(id: &'static str, anchor: &'static str, premises: &'static [Axiom], conclusion: Axiom) -> Implication {
    Implication { id, anchor, premises, conclusion }
}

pub const IMPLICATIONS: [Implication; 36] = [
    row("jacobi-gives-weak-comm", "Jacobi => weak commutativity", &[Jacobi], WeakComm),
    row("jacobi-gives-weak-assoc", "Jacobi => weak associativity", &[Jacobi], WeakAssoc),
    row("jacobi-gives-weak-skew-assoc", "Jacobi => weak skew-associativity", &[Jacobi], WeakSkewAssoc),
    row("jacobi-gives-vf-skew", "Jacobi => Y(Y(u,x0)v,x2) = Y(Y(v,-x0)u,x2+x0)", &[Jacobi], VfSkewSymmetry),
    row("weak-comm-and-assoc-give-jacobi", "weak comm + weak assoc => Jacobi", &[WeakComm, WeakAssoc], Jacobi),
    row("weak-comm-and-skew-assoc-give-jacobi", "weak comm + weak skew-assoc => Jacobi", &[WeakComm, WeakSkewAssoc], Jacobi),
    row("weak-assoc-and-skew-assoc-give-jacobi", "weak assoc + weak skew-assoc => Jacobi", &[WeakAssoc, WeakSkewAssoc], Jacobi),
    row("weak-assoc-and-vf-skew-give-jacobi", "weak assoc + vacuum-free skew-symmetry => Jacobi", &[WeakAssoc, VfSkewSymmetry], Jacobi),
    row(
        "weak-skew-assoc-and-vf-skew-give-jacobi",
        "weak skew-assoc + vacuum-free skew-symmetry => Jacobi",
        &[WeakSkewAssoc, VfSkewSymmetry],
        Jacobi,
    ),
    row(
        "weak-comm-and-vf-skew-give-jacobi",
        "weak comm + vacuum-free skew-symmetry + injectivity => Jacobi",
        &[WeakComm, VfSkewSymmetry, Injectivity],
        Jacobi,
    ),
    row("vacuum-gives-creation", "Y(1,x) = 1 => Y(u,x)1 in V[[x]], Y(u,0)1 = u", &[VfSkewSymmetry, Injectivity, VacuumProp], CreationProp),
    row("creation-gives-vacuum", "Y(u,x)1 in V[[x]], Y(u,0)1 = u => Y(1,x) = 1", &[VfSkewSymmetry, Injectivity, CreationProp], VacuumProp),
    row("vf-skew-gives-strong-creation", "vacuum-free skew-symmetry => Y(u,x)1 = e^{xD}u", &[Injectivity, VacuumProp, VfSkewSymmetry], StrongCreation),
    row("vf-skew-gives-skew", "vacuum-free skew-symmetry => Y(u,x)v = e^{xD}Y(v,-x)u", &[Injectivity, VacuumProp, VfSkewSymmetry], SkewSymmetry),
    row("vf-skew-gives-d-derivative", "vacuum-free skew-symmetry => Y(Du,x) = d/dx Y(u,x)", &[Injectivity, VacuumProp, VfSkewSymmetry], DDerivative),
    row("vf-skew-gives-d-bracket", "vacuum-free skew-symmetry => [D,Y(u,x)] = d/dx Y(u,x)", &[Injectivity, VacuumProp, VfSkewSymmetry], DBracket),
    row(
        "skew-and-d-derivative-give-vf-skew",
        "skew-symmetry + D-derivative => vacuum-free skew-symmetry",
        &[Injectivity, VacuumProp, CreationProp, SkewSymmetry, DDerivative],
        VfSkewSymmetry,
    ),
    row(
        "skew-and-d-bracket-give-vf-skew",
        "skew-symmetry + D-bracket => vacuum-free skew-symmetry",
        &[Injectivity, VacuumProp, CreationProp, SkewSymmetry, DBracket],
        VfSkewSymmetry,
    ),
    row(
        "skew-and-d-derivative-give-d-bracket",
        "skew-symmetry + D-derivative => D-bracket",
        &[Injectivity, VacuumProp, CreationProp, SkewSymmetry, DDerivative],
        DBracket,
    ),
    row(
        "skew-and-d-bracket-give-d-derivative",
        "skew-symmetry + D-bracket => D-derivative",
        &[Injectivity, VacuumProp, CreationProp, SkewSymmetry, DBracket],
        DDerivative,
    ),
    row("skew-gives-strong-creation", "skew-symmetry => Y(u,x)1 = e^{xD}u", &[Injectivity, VacuumProp, CreationProp, SkewSymmetry], StrongCreation),
    row("d-bracket-gives-strong-creation", "D-bracket => Y(u,x)1 = e^{xD}u", &[Injectivity, VacuumProp, CreationProp, DBracket], StrongCreation),
    row("d-derivative-gives-strong-creation", "D-derivative => Y(u,x)1 = e^{xD}u", &[Injectivity, VacuumProp, CreationProp, DDerivative], StrongCreation),
    row(
        "weak-comm-and-d-bracket-give-skew",
        "weak comm + D-bracket => skew-symmetry",
        &[Injectivity, VacuumProp, CreationProp, WeakComm, DBracket],
        SkewSymmetry,
    ),
    row(
        "weak-comm-and-d-bracket-give-jacobi",
        "weak comm + D-bracket => Jacobi",
        &[Injectivity, VacuumProp, CreationProp, WeakComm, DBracket],
        Jacobi,
    ),
    row("jacobi-gives-d-bracket", "Jacobi => [D,Y(u,x)] = d/dx Y(u,x)", &[Injectivity, VacuumProp, CreationProp, Jacobi], DBracket),
    row("jacobi-gives-d-derivative", "Jacobi => Y(Du,x) = d/dx Y(u,x)", &[Injectivity, VacuumProp, CreationProp, Jacobi], DDerivative),
    row("jacobi-gives-skew", "Jacobi => Y(u,x)v = e^{xD}Y(v,-x)u", &[Injectivity, VacuumProp, CreationProp, Jacobi], SkewSymmetry),
    row("weak-assoc-gives-d-derivative", "weak assoc => Y(Du,x) = d/dx Y(u,x)", &[Injectivity, VacuumProp, CreationProp, WeakAssoc], DDerivative),
    row(
        "weak-assoc-and-strong-creation-give-d-bracket",
        "weak assoc + Y(u,x)1 = e^{xD}u => D-bracket",
        &[Injectivity, VacuumProp, CreationProp, WeakAssoc, StrongCreation],
        DBracket,
    ),
    row(
        "weak-assoc-and-skew-give-jacobi",
        "weak assoc + skew-symmetry => Jacobi",
        &[Injectivity, VacuumProp, CreationProp, WeakAssoc, SkewSymmetry],
        Jacobi,
    ),
    row(
        "weak-skew-assoc-gives-d-derivative",
        "weak skew-assoc => Y(Du,x) = d/dx Y(u,x)",
        &[Injectivity, VacuumProp, CreationProp, WeakSkewAssoc],
        DDerivative,
    ),
    row(
        "weak-skew-assoc-and-skew-give-d-bracket",
        "weak skew-assoc + skew-symmetry => D-bracket",
        &[Injectivity, VacuumProp, CreationProp, WeakSkewAssoc, SkewSymmetry],
        DBracket,
    ),
    row(
        "weak-skew-assoc-and-d-bracket-give-skew",
        "weak skew-assoc + D-bracket => skew-symmetry",
        &[Injectivity, VacuumProp, CreationProp, WeakSkewAssoc, DBracket],
        SkewSymmetry,
    ),
    row(
        "weak-skew-assoc-and-skew-give-jacobi",
        "weak skew-assoc + skew-symmetry => Jacobi",
        &[Injectivity, VacuumProp, CreationProp, WeakSkewAssoc, SkewSymmetry],
        Jacobi,
    ),
    row(
        "weak-skew-assoc-and-d-bracket-give-jacobi",
        "weak skew-assoc + D-bracket => Jacobi",
        &[Injectivity, VacuumProp, CreationProp, WeakSkewAssoc, DBracket],
        Jacobi,
    ),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RowStatus {
    Tested,
    Untested,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowReport {
    pub id: String,
    pub anchor: String,
    pub status: RowStatus,
    /// Members whose premises all passed.
    pub exercised_by: Vec<String>,
    /// Members whose premises passed and whose conclusion failed.
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub member: String,
    pub premises: Vec<PropertyReport>,
    pub conclusion: PropertyReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub verdicts: BTreeMap<String, BTreeMap<Axiom, Verdict>>,
    pub rows: Vec<RowReport>,
}

impl MatrixReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().map(|r| r.violations.len()).sum()
    }
}

/// Every axiom's report on one structure; vacuum axioms are `N/A` without a vacuum.
pub fn all_reports(s: &VertexStructure, params: &CheckParams) -> Result<BTreeMap<Axiom, PropertyReport>> {
    let mut out = BTreeMap::new();
    for a in Axiom::ALL {
        let r = if a.needs_vacuum() && s.vacuum().is_none() {
            PropertyReport {
                axiom: a,
                anchor: a.anchor().to_string(),
                verdict: Verdict::NotApplicable,
                witness: None,
                window: None,
                m_max: None,
            }
        } else {
            check_axiom(s, a, params)?
        };
        out.insert(a, r);
    }
    Ok(out)
}

pub fn implication_matrix(corpus: &[VertexStructure], params: &CheckParams) -> Result<MatrixReport> {
    let mut reports = Vec::new();
    for s in corpus {
        reports.push((s.name.clone(), all_reports(s, params)?));
    }
    Ok(evaluate(&reports, &IMPLICATIONS))
}

/// The matrix over reports already computed by [`all_reports`], one entry per member.
pub fn matrix_from_reports(reports: &[(String, BTreeMap<Axiom, PropertyReport>)]) -> MatrixReport {
    evaluate(reports, &IMPLICATIONS)
}

pub(crate) fn evaluate(reports: &[(String, BTreeMap<Axiom, PropertyReport>)], rows: &[Implication]) -> MatrixReport {
    let verdicts = reports
        .iter()
        .map(|(name, r)| (name.clone(), r.iter().map(|(&a, p)| (a, p.verdict)).collect()))
        .collect();
    let rows = rows
        .iter()
        .map(|imp| {
            let mut exercised_by = Vec::new();
            let mut violations = Vec::new();
            for (name, r) in reports {
                if !imp.premises.iter().all(|p| r[p].verdict == Verdict::Pass) {
                    continue;
                }
                let conclusion = &r[&imp.conclusion];
                if conclusion.verdict == Verdict::NotApplicable {
                    continue;
                }
                exercised_by.push(name.clone());
                if conclusion.verdict == Verdict::Fail {
                    violations.push(Violation {
                        member: name.clone(),
                        premises: imp.premises.iter().map(|p| r[p].clone()).collect(),
                        conclusion: conclusion.clone(),
                    });
                }
            }
            let status = if !violations.is_empty() {
                RowStatus::Violated
            } else if exercised_by.is_empty() {
                RowStatus::Untested
            } else {
                RowStatus::Tested
            };
            RowReport { id: imp.id.to_string(), anchor: imp.anchor.to_string(), status, exercised_by, violations }
        })
        .collect();
    MatrixReport { verdicts, rows }
}
