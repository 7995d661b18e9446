//! Module replacement theorems replayed on a corpus of modules.
//!
//! Every row assumes the acting structure satisfies the Jacobi identity; the vacuum rows
//! also need `Y_W(1,x) = 1`. Members outside a row's hypotheses are `N/A` for it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{all_module_reports, ModuleAxiom, ModuleStructure};
use crate::valg::{check_axiom, Axiom, CheckParams, PropertyReport, Result, RowStatus, Verdict};

use ModuleAxiom::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowClaim {
    /// All of `left` pass exactly when `right` passes.
    Equivalent,
    /// All premises passing forces the conclusion.
    Implies,
    /// Recorded for comparison only; sufficiency is not claimed.
    Unclaimed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EquivalenceRow {
    pub id: &'static str,
    pub anchor: &'static str,
    pub needs_vacuum: bool,
    pub claim: RowClaim,
    pub premises: &'static [ModuleAxiom],
    pub conclusion: ModuleAxiom,
}

const fn row(
    id: &'static str,
    anchor: &'static str,
    needs_vacuum: bool,
    claim: RowClaim,
    premises: &'static [ModuleAxiom],
    conclusion: ModuleAxiom,
) -> EquivalenceRow {
    EquivalenceRow { id, anchor, needs_vacuum, claim, premises, conclusion }
}

use RowClaim::*;

pub const HARNESS_ROWS: [EquivalenceRow; 14] = [
    row("weak-assoc-equals-jacobi", "Y_W(1,x) = 1: m weak assoc <=> m Jacobi", true, Equivalent, &[MWeakAssoc], MJacobi),
    row(
        "weak-skew-assoc-equals-jacobi",
        "Y_W(1,x) = 1: m weak skew-assoc <=> m Jacobi",
        true,
        Equivalent,
        &[MWeakSkewAssoc],
        MJacobi,
    ),
    row("weak-assoc-gives-d-derivative", "Y_W(1,x) = 1 + m weak assoc => Y_W(Dv,x) = d/dx Y_W(v,x)", true, Implies, &[MWeakAssoc], MDDerivative),
    row(
        "weak-skew-assoc-gives-d-derivative",
        "Y_W(1,x) = 1 + m weak skew-assoc => Y_W(Dv,x) = d/dx Y_W(v,x)",
        true,
        Implies,
        &[MWeakSkewAssoc],
        MDDerivative,
    ),
    row("jacobi-gives-weak-comm", "m Jacobi => m weak comm", false, Implies, &[MJacobi], MWeakComm),
    row("jacobi-gives-weak-assoc", "m Jacobi => m weak assoc", false, Implies, &[MJacobi], MWeakAssoc),
    row("jacobi-gives-weak-skew-assoc", "m Jacobi => m weak skew-assoc", false, Implies, &[MJacobi], MWeakSkewAssoc),
    row("jacobi-gives-vf-skew", "m Jacobi => Y_W(Y(u,x0)v,x2) = Y_W(Y(v,-x0)u,x2+x0)", false, Implies, &[MJacobi], MVfSkewSymmetry),
    row("weak-comm-and-assoc-give-jacobi", "m weak comm + m weak assoc => m Jacobi", false, Implies, &[MWeakComm, MWeakAssoc], MJacobi),
    row(
        "weak-comm-and-skew-assoc-give-jacobi",
        "m weak comm + m weak skew-assoc => m Jacobi",
        false,
        Implies,
        &[MWeakComm, MWeakSkewAssoc],
        MJacobi,
    ),
    row(
        "weak-assoc-and-skew-assoc-give-jacobi",
        "m weak assoc + m weak skew-assoc => m Jacobi",
        false,
        Implies,
        &[MWeakAssoc, MWeakSkewAssoc],
        MJacobi,
    ),
    row(
        "weak-assoc-and-vf-skew-give-jacobi",
        "m weak assoc + module vacuum-free skew-symmetry => m Jacobi",
        false,
        Implies,
        &[MWeakAssoc, MVfSkewSymmetry],
        MJacobi,
    ),
    row(
        "weak-skew-assoc-and-vf-skew-give-jacobi",
        "m weak skew-assoc + module vacuum-free skew-symmetry => m Jacobi",
        false,
        Implies,
        &[MWeakSkewAssoc, MVfSkewSymmetry],
        MJacobi,
    ),
    row("weak-comm-alone-gives-jacobi", "m weak comm => m Jacobi (not claimed)", false, Unclaimed, &[MWeakComm], MJacobi),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RowOutcome {
    Consistent,
    Violated,
    /// Hypotheses or premises not met.
    NotApplicable,
    /// The row makes no claim; its premises held.
    Observed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberRow {
    pub member: String,
    pub over: String,
    pub over_jacobi: Verdict,
    pub reports: BTreeMap<ModuleAxiom, PropertyReport<ModuleAxiom>>,
    pub rows: BTreeMap<String, RowOutcome>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarnessRowReport {
    pub id: String,
    pub anchor: String,
    pub status: RowStatus,
    pub exercised_by: Vec<String>,
    pub violations: Vec<String>,
    /// For the unclaimed row: members whose premises passed and whose conclusion failed.
    pub counterexamples: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarnessReport {
    pub members: Vec<MemberRow>,
    pub rows: Vec<HarnessRowReport>,
}

impl HarnessReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().map(|r| r.violations.len()).sum()
    }
}

fn outcome(r: &EquivalenceRow, over_jacobi: Verdict, has_vacuum: bool, v: &BTreeMap<ModuleAxiom, Verdict>) -> RowOutcome {
    if over_jacobi != Verdict::Pass {
        return RowOutcome::NotApplicable;
    }
    if r.needs_vacuum && !(has_vacuum && v[&MVacuumProp] == Verdict::Pass) {
        return RowOutcome::NotApplicable;
    }
    let premises = r.premises.iter().all(|p| v[p] == Verdict::Pass);
    let conclusion = v[&r.conclusion];
    if conclusion == Verdict::NotApplicable {
        return RowOutcome::NotApplicable;
    }
    match r.claim {
        Equivalent if premises == (conclusion == Verdict::Pass) => RowOutcome::Consistent,
        Equivalent => RowOutcome::Violated,
        Implies if !premises => RowOutcome::NotApplicable,
        Implies if conclusion == Verdict::Pass => RowOutcome::Consistent,
        Implies => RowOutcome::Violated,
        Unclaimed if premises => RowOutcome::Observed,
        Unclaimed => RowOutcome::NotApplicable,
    }
}

pub fn main_theorem_harness(corpus: &[ModuleStructure], params: &CheckParams) -> Result<HarnessReport> {
    let mut over_cache: BTreeMap<String, Verdict> = BTreeMap::new();
    let mut members = Vec::new();
    for m in corpus {
        let over = m.over();
        let over_jacobi = match over_cache.get(&over.name) {
            Some(v) => *v,
            None => {
                let v = check_axiom(over, Axiom::Jacobi, params)?.verdict;
                over_cache.insert(over.name.clone(), v);
                v
            }
        };
        let reports = all_module_reports(m, params)?;
        let verdicts: BTreeMap<ModuleAxiom, Verdict> = reports.iter().map(|(&a, r)| (a, r.verdict)).collect();
        let rows = HARNESS_ROWS
            .iter()
            .map(|r| (r.id.to_string(), outcome(r, over_jacobi, over.vacuum().is_some(), &verdicts)))
            .collect();
        members.push(MemberRow { member: m.name.clone(), over: over.name.clone(), over_jacobi, reports, rows });
    }
    let rows = HARNESS_ROWS
        .iter()
        .map(|r| {
            let with = |o: RowOutcome| -> Vec<String> {
                members.iter().filter(|m| m.rows[r.id] == o).map(|m| m.member.clone()).collect()
            };
            let violations = with(RowOutcome::Violated);
            let mut exercised_by = with(RowOutcome::Consistent);
            exercised_by.extend(violations.iter().cloned());
            let counterexamples: Vec<String> = members
                .iter()
                .filter(|m| m.rows[r.id] == RowOutcome::Observed && m.reports[&r.conclusion].verdict == Verdict::Fail)
                .map(|m| m.member.clone())
                .collect();
            let status = if r.claim == Unclaimed || exercised_by.is_empty() {
                RowStatus::Untested
            } else if violations.is_empty() {
                RowStatus::Tested
            } else {
                RowStatus::Violated
            };
            HarnessRowReport {
                id: r.id.to_string(),
                anchor: r.anchor.to_string(),
                status,
                exercised_by,
                violations,
                counterexamples,
            }
        })
        .collect();
    Ok(HarnessReport { members, rows })
}
