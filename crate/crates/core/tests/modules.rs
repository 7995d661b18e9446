mod common;

use std::collections::BTreeMap;

use common::{binom, Q};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use vxcheck::scalars::{BasisId, Coefficient, Rational, VectorCoeff};
use vxcheck::valg::{borcherds_family, check_axiom, mutants, Axiom, CheckParams, RowStatus, Verdict, VertexStructure, Witness};
use vxcheck::vmod::{
    all_module_reports, check_module_axiom, main_theorem_harness, module_family, module_mutants, ModuleAxiom,
    ModuleConfig, ModuleStructure, RowOutcome, HARNESS_ROWS,
};

fn qr(r: &Rational) -> Q {
    BigRational::new(r.numer().clone(), r.denom().clone())
}

/// `(power of the first variable, power of the second, basis) -> coefficient`.
type Table = BTreeMap<(i64, i64, String), Q>;

/// `x-power -> vector`, read straight from a mode list `(u, n, v, u_n v)`.
type Modes = Vec<(BasisId, i64, BasisId, VectorCoeff)>;

fn act(modes: &Modes, u: &str, v: &BTreeMap<String, Q>) -> BTreeMap<i64, BTreeMap<String, Q>> {
    let mut out: BTreeMap<i64, BTreeMap<String, Q>> = BTreeMap::new();
    for (a, n, b, c) in modes {
        if a.to_string() != u {
            continue;
        }
        let Some(cv) = v.get(&b.to_string()) else { continue };
        for (id, r) in c.entries() {
            *out.entry(-n - 1).or_default().entry(id.to_string()).or_insert_with(Q::zero) += cv * qr(r);
        }
    }
    out
}

fn insert(t: &mut Table, key: (i64, i64, String), c: Q) {
    let e = t.entry(key.clone()).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        t.remove(&key);
    }
}

fn unit(name: &str) -> BTreeMap<String, Q> {
    BTreeMap::from([(name.to_string(), common::q(1))])
}

/// `Y_W(u,x1)Y_W(v,x2)w`
fn product(m: &ModuleStructure, u: &str, v: &str, w: &str) -> Table {
    let modes = m.entries();
    let mut out = Table::new();
    for (p2, inner) in act(&modes, v, &unit(w)) {
        for (p1, outer) in act(&modes, u, &inner) {
            for (id, c) in outer {
                insert(&mut out, (p1, p2, id), c);
            }
        }
    }
    out
}

/// `Y_W(Y(u,x0)v,x2)w`
fn iterate(m: &ModuleStructure, u: &str, v: &str, w: &str) -> Table {
    let vmodes = m.over().entries();
    let wmodes = m.entries();
    let mut out = Table::new();
    for (p0, inner) in act(&vmodes, u, &unit(v)) {
        for (b, c) in inner {
            for (p2, image) in act(&wmodes, &b, &unit(w)) {
                for (id, d) in image {
                    insert(&mut out, (p0, p2, id), &c * d);
                }
            }
        }
    }
    out
}

/// The Jacobi identity for finite tables: the two products agree after the swap, have no
/// `x1` poles, and `x1 = x2 + x0` turns them into the iterate.
fn module_jacobi_oracle(m: &ModuleStructure, u: &str, v: &str, w: &str) -> bool {
    let f = product(m, u, v, w);
    let g: Table = product(m, v, u, w).into_iter().map(|((a, b, id), c)| ((b, a, id), c)).collect();
    if f != g || f.keys().any(|(a, _, _)| *a < 0) {
        return false;
    }
    let mut shifted = Table::new();
    for ((a, b, id), c) in &f {
        for t in 0..=*a {
            insert(&mut shifted, (t, b + a - t, id.clone()), binom(*a, t) * c);
        }
    }
    shifted == iterate(m, u, v, w)
}

fn oracle_verdict(m: &ModuleStructure) -> Verdict {
    let vb: Vec<String> = m.over().basis().iter().map(|b| b.to_string()).collect();
    for u in &vb {
        for v in &vb {
            for w in m.wbasis() {
                if !module_jacobi_oracle(m, u, v, &w.to_string()) {
                    return Verdict::Fail;
                }
            }
        }
    }
    Verdict::Pass
}

fn verdict(m: &ModuleStructure, a: ModuleAxiom) -> Verdict {
    check_module_axiom(m, a, &CheckParams::default()).unwrap().verdict
}

fn algebra_corpus() -> Vec<VertexStructure> {
    let mut c = borcherds_family();
    c.extend(mutants().into_iter().map(|(_, s)| s));
    c
}

fn module_corpus() -> Vec<ModuleStructure> {
    let mut c = module_family();
    c.extend(module_mutants().into_iter().map(|(_, m)| m));
    c
}

#[test]
fn family_has_regular_ideal_and_quotient_members() {
    let names: Vec<String> = module_family().iter().map(|m| m.name.clone()).collect();
    assert_eq!(names.len(), 23);
    for n in ["borcherds-k2-regular", "borcherds-k3-ideal-module", "borcherds-k5-quotient", "borcherds-k4-ideal-ideal-module"] {
        assert!(names.iter().any(|x| x == n), "{n}");
    }
    // t^2 A is zero when k = 2
    assert!(!names.iter().any(|x| x == "borcherds-k2-ideal-ideal-module"));
}

#[test]
fn quotient_module_acts_through_the_projection() {
    let q = module_family().into_iter().find(|m| m.name == "borcherds-k4-quotient").unwrap();
    // Y_W(t,x)t = t2 + x t3, and t3 = 0 in A/t3A
    let y = product(&q, "t", "1", "t");
    assert_eq!(y, Table::from([((0, 0, "t2".to_string()), common::q(1))]));
}

#[test]
fn regular_module_verdicts_match_the_algebra_verdicts() {
    let pairs = [
        (Axiom::Jacobi, ModuleAxiom::MJacobi),
        (Axiom::WeakComm, ModuleAxiom::MWeakComm),
        (Axiom::WeakAssoc, ModuleAxiom::MWeakAssoc),
        (Axiom::WeakSkewAssoc, ModuleAxiom::MWeakSkewAssoc),
        (Axiom::VacuumProp, ModuleAxiom::MVacuumProp),
        (Axiom::DDerivative, ModuleAxiom::MDDerivative),
    ];
    let p = CheckParams::default();
    for s in algebra_corpus() {
        let m = ModuleStructure::regular(&s);
        for (a, ma) in pairs {
            if a.needs_vacuum() && s.vacuum().is_none() {
                continue;
            }
            let want = check_axiom(&s, a, &p).unwrap().verdict;
            assert_eq!(verdict(&m, ma), want, "{} {}", s.name, ma.id());
        }
    }
}

#[test]
fn every_module_axiom_passes_on_the_family() {
    let p = CheckParams::default();
    for m in module_family() {
        for (a, r) in all_module_reports(&m, &p).unwrap() {
            let expected = if m.over().vacuum().is_none() && a.needs_vacuum() { Verdict::NotApplicable } else { Verdict::Pass };
            assert_eq!(r.verdict, expected, "{} {}", m.name, a.id());
        }
    }
}

#[test]
fn module_mutants_break_jacobi_and_both_weak_identities() {
    let p = CheckParams::default();
    let frozen = [
        ("m-jacobi-break", [Verdict::Pass, Verdict::Pass, Verdict::Pass, Verdict::Pass]),
        ("m-pole-insert", [Verdict::Fail, Verdict::Fail, Verdict::Pass, Verdict::Fail]),
        ("m-vacuum-break", [Verdict::Pass, Verdict::Pass, Verdict::Fail, Verdict::Pass]),
        ("m-derivative-break", [Verdict::Fail, Verdict::Fail, Verdict::Pass, Verdict::Fail]),
        ("m-ideal-break", [Verdict::Pass, Verdict::Pass, Verdict::Pass, Verdict::Pass]),
    ];
    for ((mutant, m), (name, rest)) in module_mutants().into_iter().zip(frozen) {
        assert_eq!(mutant.name, name);
        for a in [ModuleAxiom::MJacobi, ModuleAxiom::MWeakAssoc, ModuleAxiom::MWeakSkewAssoc] {
            let r = check_module_axiom(&m, a, &p).unwrap();
            assert_eq!(r.verdict, Verdict::Fail, "{name} {}", a.id());
            match r.witness {
                Some(Witness::Counterexample { at, .. }) => assert_eq!(at.len(), 3, "{name} {}", a.id()),
                other => panic!("{name} {}: {other:?}", a.id()),
            }
        }
        let others = [ModuleAxiom::MWeakComm, ModuleAxiom::MVfSkewSymmetry, ModuleAxiom::MVacuumProp, ModuleAxiom::MDDerivative];
        for (a, want) in others.into_iter().zip(rest) {
            assert_eq!(verdict(&m, a), want, "{name} {}", a.id());
        }
    }
}

#[test]
fn jacobi_verdicts_match_the_exact_oracle() {
    for m in module_corpus() {
        assert_eq!(verdict(&m, ModuleAxiom::MJacobi), oracle_verdict(&m), "{}", m.name);
    }
}

#[test]
fn harness_rows_hold_on_the_corpus() {
    let h = main_theorem_harness(&module_corpus(), &CheckParams::default()).unwrap();
    assert_eq!(h.violations(), 0);
    assert_eq!(h.rows.len(), HARNESS_ROWS.len());
    for r in &h.rows {
        let want = if r.id == "weak-comm-alone-gives-jacobi" { RowStatus::Untested } else { RowStatus::Tested };
        assert_eq!(r.status, want, "{}", r.id);
    }
    let alone = h.rows.iter().find(|r| r.id == "weak-comm-alone-gives-jacobi").unwrap();
    assert_eq!(alone.counterexamples, ["m-jacobi-break", "m-vacuum-break", "m-ideal-break"]);
    // both equivalences see a failing member, so they are not vacuous
    for id in ["weak-assoc-equals-jacobi", "weak-skew-assoc-equals-jacobi"] {
        let failing = h
            .members
            .iter()
            .filter(|m| m.rows[id] == RowOutcome::Consistent && m.reports[&ModuleAxiom::MJacobi].verdict == Verdict::Fail)
            .count();
        assert!(failing >= 3, "{id}: {failing}");
    }
}

#[test]
fn vacuum_free_members_skip_the_vacuum_rows() {
    let h = main_theorem_harness(&module_family(), &CheckParams::default()).unwrap();
    for m in h.members.iter().filter(|m| m.over.contains("ideal")) {
        assert_eq!(m.rows["weak-assoc-equals-jacobi"], RowOutcome::NotApplicable, "{}", m.member);
        assert_eq!(m.rows["weak-comm-and-assoc-give-jacobi"], RowOutcome::Consistent, "{}", m.member);
    }
}

#[test]
fn minors_and_weak_assoc_decide_jacobi_on_every_member() {
    for m in module_corpus() {
        let minors = m.over().vacuum().is_none() || verdict(&m, ModuleAxiom::MVacuumProp) == Verdict::Pass;
        let lhs = minors && verdict(&m, ModuleAxiom::MWeakAssoc) == Verdict::Pass;
        assert_eq!(lhs, verdict(&m, ModuleAxiom::MJacobi) == Verdict::Pass, "{}", m.name);
    }
}

#[test]
fn module_config_round_trips() {
    for m in module_corpus() {
        let text = ModuleConfig::of(&m).to_json();
        assert_eq!(ModuleConfig::parse(&text).unwrap().build("x").unwrap(), m);
    }
    let err = ModuleConfig::parse(r#"{"basis":["a"],"modes":[],"wbasis":["w"],"wmodes":[{"u":"b","n":-1,"w":"w","coeff":{"w":"1"}}]}"#)
        .unwrap()
        .build("x");
    assert!(err.is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn random_edits_keep_the_oracle_and_harness_in_step(
        pick in 0usize..23,
        ui in 0usize..8,
        n in -3i64..2,
        wi in 0usize..8,
        ti in 0usize..8,
        c in -2i64..3,
    ) {
        let base = module_family().swap_remove(pick);
        let ub = base.over().basis()[ui % base.over().dim()].clone();
        let wb = base.wbasis()[wi % base.wbasis().len()].clone();
        let tb = base.wbasis()[ti % base.wbasis().len()].clone();
        let mut entries: Vec<_> = base.entries().into_iter().filter(|(a, k, b, _)| !(a == &ub && *k == n && b == &wb)).collect();
        entries.push((ub, n, wb, VectorCoeff::basis(tb).scaled(&Rational::from_integer(c))));
        let m = ModuleStructure::new("edit", base.over().clone(), base.wbasis().to_vec(), entries).unwrap();
        prop_assert_eq!(verdict(&m, ModuleAxiom::MJacobi), oracle_verdict(&m));
        let h = main_theorem_harness(std::slice::from_ref(&m), &CheckParams::default()).unwrap();
        prop_assert_eq!(h.violations(), 0);
    }
}
