mod common;

use std::collections::BTreeMap;

use common::{binom, q, Q};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use vxcheck::expansion::Var;
use vxcheck::scalars::{BasisId, Coefficient, Matrix, Rational, VectorCoeff};
use vxcheck::valg::{
    borcherds_construct, borcherds_family, check_axiom, compose_y, holds_at, implication_matrix, iterate_y,
    jacobi_coefficients, jacobi_via_three_term, minimal_pole_order, mutants, truncated_polynomial, y_series, Axiom,
    CheckParams, RowStatus, StructureConfig, ValgError, Verdict, VertexStructure, WeakKind, Witness,
};

fn b(name: &str) -> VectorCoeff {
    VectorCoeff::basis(BasisId::new(name))
}

fn vec_of(pairs: &[(&str, i64)]) -> VectorCoeff {
    VectorCoeff::from_entries(pairs.iter().map(|&(n, c)| (n, Rational::from_integer(c))))
}

fn family(name: &str) -> VertexStructure {
    borcherds_family().into_iter().find(|s| s.name == name).unwrap()
}

fn corpus() -> Vec<VertexStructure> {
    let mut all = borcherds_family();
    all.extend(mutants().into_iter().map(|(_, s)| s));
    all
}

fn qr(r: &Rational) -> Q {
    BigRational::new(r.numer().clone(), r.denom().clone())
}

/// `(exponents, basis) -> coefficient` with exact oracle rationals.
type Table = BTreeMap<(Vec<i64>, String), Q>;

fn table(s: vxcheck::series::WindowedSeries<VectorCoeff>, vars: &[&str]) -> Table {
    let mut out = Table::new();
    for (m, c) in s.terms() {
        let e: Vec<i64> = vars.iter().map(|v| m.exp(Var::named(v))).collect();
        for (id, r) in c.entries() {
            out.insert((e.clone(), id.to_string()), qr(r));
        }
    }
    out
}

fn add(t: &mut Table, key: (Vec<i64>, String), c: Q) {
    if c.is_zero() {
        return;
    }
    let e = t.entry(key.clone()).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        t.remove(&key);
    }
}

fn sign(k: i64) -> Q {
    if k.rem_euclid(2) == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// Jacobi coefficients straight from the three delta series, one monomial at a time.
fn jacobi_oracle(s: &VertexStructure, u: &VectorCoeff, v: &VectorCoeff, w: &VectorCoeff, n: i64) -> Table {
    let f = table(compose_y(s, u, Var::named("a"), v, Var::named("b"), w), &["a", "b"]);
    // Y(v,x2)Y(u,x1)w keyed (x2, x1)
    let g = table(compose_y(s, v, Var::named("a"), u, Var::named("b"), w), &["a", "b"]);
    let h = table(iterate_y(s, u, Var::named("a"), v, Var::named("b"), w), &["a", "b"]);
    let mut out = Table::new();
    for a in -n..=n {
        for bb in -n..=n {
            for c in -n..=n {
                let at = vec![a, bb, c];
                // x0^-1 delta((x1-x2)/x0) F(x1,x2)
                for ((e, id), coef) in &f {
                    let (k, t) = (-a - 1, c - e[1]);
                    if t >= 0 && bb - e[0] == k - t {
                        add(&mut out, (at.clone(), id.clone()), binom(k, t) * sign(t) * coef);
                    }
                }
                // x0^-1 delta((x2-x1)/(-x0)) G(x1,x2)
                for ((e, id), coef) in &g {
                    let (k, t) = (-a - 1, bb - e[1]);
                    if t >= 0 && c - e[0] == k - t {
                        add(&mut out, (at.clone(), id.clone()), -(sign(a + 1) * binom(k, t) * sign(t) * coef));
                    }
                }
                // x2^-1 delta((x1-x0)/x2) H(x0,x2)
                for ((e, id), coef) in &h {
                    let k = e[1] - c - 1;
                    let t = a - e[0];
                    if t >= 0 && bb == k - t {
                        add(&mut out, (at.clone(), id.clone()), -(binom(k, t) * sign(t) * coef));
                    }
                }
            }
        }
    }
    out
}

fn flatten(m: &BTreeMap<[i64; 3], VectorCoeff>) -> Table {
    let mut out = Table::new();
    for (e, c) in m {
        for (id, r) in c.entries() {
            out.insert((e.to_vec(), id.to_string()), qr(r));
        }
    }
    out
}

/// Jacobi on a polynomial table holds exactly when the two products agree and the
/// product re-expanded at `x1 = x2 + x0` is the iterate.
fn jacobi_exact_oracle(s: &VertexStructure, u: &VectorCoeff, v: &VectorCoeff, w: &VectorCoeff) -> bool {
    let f = table(compose_y(s, u, Var::named("a"), v, Var::named("b"), w), &["a", "b"]);
    let g: Table = table(compose_y(s, v, Var::named("a"), u, Var::named("b"), w), &["a", "b"])
        .into_iter()
        .map(|((e, id), c)| ((vec![e[1], e[0]], id), c))
        .collect();
    if f != g || f.keys().any(|(e, _)| e[0] < 0) {
        return false;
    }
    let h = table(iterate_y(s, u, Var::named("a"), v, Var::named("b"), w), &["a", "b"]);
    let mut shifted = Table::new();
    for ((e, id), c) in &f {
        for t in 0..=e[0] {
            add(&mut shifted, (vec![t, e[1] + e[0] - t], id.clone()), binom(e[0], t) * c);
        }
    }
    shifted == h
}

fn triples(s: &VertexStructure) -> Vec<(VectorCoeff, VectorCoeff, VectorCoeff)> {
    let basis = s.basis();
    let mut out = Vec::new();
    for i in basis {
        for j in basis {
            for k in basis {
                out.push((VectorCoeff::basis(i.clone()), VectorCoeff::basis(j.clone()), VectorCoeff::basis(k.clone())));
            }
        }
    }
    out
}

fn poly1(s: &VertexStructure, u: &VectorCoeff, v: &VectorCoeff) -> BTreeMap<i64, VectorCoeff> {
    y_series(s, u, v).terms().map(|(m, c)| (m.exp(Var::named("x")), c.clone())).collect()
}

fn dop(s: &VertexStructure, v: &VectorCoeff) -> VectorCoeff {
    let vac = s.vacuum().unwrap();
    let col: Vec<Rational> = s.basis().iter().map(|x| v.get(x)).collect();
    let img = vac.dop.apply(&col).unwrap();
    VectorCoeff::from_entries(s.basis().iter().cloned().zip(img))
}

fn mode(s: &VertexStructure, u: &VectorCoeff, n: i64, v: &VectorCoeff) -> VectorCoeff {
    poly1(s, u, v).get(&(-n - 1)).cloned().unwrap_or_default()
}

fn lin(parts: &[(&VectorCoeff, Rational)]) -> VectorCoeff {
    let mut out = VectorCoeff::new();
    for (v, c) in parts {
        out.add_scaled(v, c);
    }
    out
}

#[test]
fn product_of_t_with_itself_in_k4() {
    let s = family("borcherds-k4");
    let y = poly1(&s, &b("t"), &b("t"));
    assert_eq!(y, BTreeMap::from([(0, b("t2")), (1, b("t3"))]));
    // t^3 = 0 in k = 3 kills the linear term
    assert_eq!(poly1(&family("borcherds-k3"), &b("t"), &b("t")), BTreeMap::from([(0, b("t2"))]));
}

#[test]
fn vacuum_acts_as_identity() {
    for s in borcherds_family().into_iter().filter(|s| s.vacuum().is_some()) {
        for v in s.basis() {
            let v = VectorCoeff::basis(v.clone());
            assert_eq!(poly1(&s, &b("1"), &v), BTreeMap::from([(0, v.clone())]), "{}", s.name);
        }
    }
}

#[test]
fn generated_operator_is_t_squared_derivative() {
    let s = family("borcherds-k5");
    assert_eq!(dop(&s, &b("t")), b("t2"));
    assert_eq!(dop(&s, &b("t2")), vec_of(&[("t3", 2)]));
    assert_eq!(dop(&s, &b("t3")), vec_of(&[("t4", 3)]));
    assert!(dop(&s, &b("t4")).is_zero());
    assert!(dop(&s, &b("1")).is_zero());
}

#[test]
fn plain_derivative_is_refused_on_truncated_polynomials() {
    let mut alg = truncated_polynomial(3);
    let mut d = Matrix::zeros(3, 3);
    d.set(0, 1, Rational::one());
    d.set(1, 2, Rational::from_integer(2));
    alg.derivation = d;
    match borcherds_construct(&alg, true, None, "ddt") {
        Err(ValgError::Refused(msg)) => assert!(msg.contains("Leibniz"), "{msg}"),
        other => panic!("expected a refusal, got {other:?}"),
    }
}

#[test]
fn noncommutative_and_nonassociative_products_are_refused() {
    let mut alg = truncated_polynomial(3);
    alg.product[1][2] = b("t2");
    alg.derivation = Matrix::zeros(3, 3);
    let err = borcherds_construct(&alg, true, None, "bad").unwrap_err();
    assert!(matches!(err, ValgError::Refused(ref m) if m.contains("commutative")), "{err}");

    // (t t) t2 = t3 but t (t t2) = t t3 = 0
    let mut alg = truncated_polynomial(4);
    alg.product[1][1] = b("t");
    alg.derivation = Matrix::zeros(4, 4);
    let err = borcherds_construct(&alg, true, None, "bad").unwrap_err();
    assert!(matches!(err, ValgError::Refused(ref m) if m.contains("associative")), "{err}");
}

#[test]
fn ideal_spans_close_and_others_do_not() {
    let alg = truncated_polynomial(3);
    let ideal = borcherds_construct(&alg, false, Some(&alg.basis[1..]), "ideal").unwrap();
    assert!(ideal.vacuum().is_none());
    assert_eq!(ideal.basis(), &[BasisId::new("t"), BasisId::new("t2")]);
    let err = borcherds_construct(&alg, false, Some(&alg.basis[1..2]), "t-only").unwrap_err();
    assert!(matches!(err, ValgError::Refused(ref m) if m.contains("not closed")), "{err}");
    let err = borcherds_construct(&alg, true, Some(&alg.basis[1..]), "no-unit").unwrap_err();
    assert!(matches!(err, ValgError::Refused(_)), "{err}");
}

#[test]
fn product_with_vacuum_first_ignores_x1() {
    let s = family("borcherds-k4");
    for (_, v, w) in triples(&s) {
        let c = compose_y(&s, &b("1"), Var::named("x1"), &v, Var::named("x2"), &w);
        let y = poly1(&s, &v, &w);
        let got: BTreeMap<(i64, i64), VectorCoeff> =
            c.terms().map(|(m, c)| ((m.exp(Var::named("x1")), m.exp(Var::named("x2"))), c.clone())).collect();
        let want: BTreeMap<(i64, i64), VectorCoeff> = y.into_iter().map(|(k, c)| ((0, k), c)).collect();
        assert_eq!(got, want);
    }
}

#[test]
fn iterate_with_vacuum_in_the_middle_is_a_taylor_shift() {
    for s in borcherds_family().into_iter().filter(|s| s.vacuum().is_some()) {
        for (u, _, w) in triples(&s) {
            let it = table(iterate_y(&s, &u, Var::named("a"), &b("1"), Var::named("b"), &w), &["a", "b"]);
            let mut want = Table::new();
            for (k, c) in poly1(&s, &u, &w) {
                for j in 0..=k {
                    for (id, r) in c.entries() {
                        add(&mut want, (vec![j, k - j], id.to_string()), binom(k, j) * qr(r));
                    }
                }
            }
            assert_eq!(it, want, "{}", s.name);
        }
    }
}

#[test]
fn derivative_of_t_acts_like_d_dx() {
    let s = family("borcherds-k3");
    let dt = dop(&s, &b("t"));
    assert_eq!(dt, b("t2"));
    for w in ["1", "t", "t2"] {
        let lhs = poly1(&s, &dt, &b(w));
        let mut rhs = BTreeMap::new();
        for (k, c) in poly1(&s, &b("t"), &b(w)) {
            if k != 0 {
                rhs.insert(k - 1, c.scaled(&Rational::from_integer(k)));
            }
        }
        assert_eq!(lhs, rhs, "w = {w}");
    }
}

#[test]
fn pole_orders_read_off_the_lowest_mode() {
    let s = family("borcherds-k5");
    for (u, v, _) in triples(&s) {
        assert_eq!(minimal_pole_order(&s, &u, &v), 0);
    }
    let (_, m) = mutants().into_iter().find(|(m, _)| m.name == "pole-insert").unwrap();
    assert_eq!(minimal_pole_order(&m, &b("t"), &b("t")), 1);
    assert_eq!(minimal_pole_order(&m, &b("t"), &b("1")), 0);
}

#[test]
fn every_axiom_passes_on_the_family() {
    let p = CheckParams::default();
    for s in borcherds_family() {
        for a in Axiom::ALL {
            if a.needs_vacuum() && s.vacuum().is_none() {
                assert!(matches!(check_axiom(&s, a, &p), Err(ValgError::NoVacuum(_))));
                continue;
            }
            let r = check_axiom(&s, a, &p).unwrap();
            let ideal_injectivity = s.vacuum().is_none() && a == Axiom::Injectivity;
            assert_eq!(r.passed(), !ideal_injectivity, "{} {a}: {r:?}", s.name);
        }
    }
}

#[test]
fn ideal_variants_are_not_injective() {
    for s in borcherds_family().into_iter().filter(|s| s.vacuum().is_none()) {
        let r = check_axiom(&s, Axiom::Injectivity, &CheckParams::default()).unwrap();
        let d = s.dim();
        assert_eq!(r.witness, Some(Witness::Rank { rank: d - 1, dim: d }), "{}", s.name);
    }
}

#[test]
fn weak_commutativity_needs_no_pole_clearing_on_the_family() {
    for s in borcherds_family() {
        let r = check_axiom(&s, Axiom::WeakComm, &CheckParams::default()).unwrap();
        let Some(Witness::PoleOrders { orders }) = r.witness else { panic!("{r:?}") };
        assert_eq!(orders.len(), s.dim().pow(3));
        assert!(orders.iter().all(|o| o.3 == 0));
    }
}

#[test]
fn remark_pole_orders_clear_every_weak_identity() {
    let p = CheckParams::default();
    for s in borcherds_family() {
        let searched: Vec<_> = [Axiom::WeakComm, Axiom::WeakAssoc, Axiom::WeakSkewAssoc]
            .into_iter()
            .map(|a| match check_axiom(&s, a, &p).unwrap().witness {
                Some(Witness::PoleOrders { orders }) => orders,
                other => panic!("{other:?}"),
            })
            .collect();
        for (idx, (u, v, w)) in triples(&s).into_iter().enumerate() {
            let formula = [minimal_pole_order(&s, &u, &v), minimal_pole_order(&s, &u, &w), minimal_pole_order(&s, &v, &w)];
            for (k, kind) in [WeakKind::Comm, WeakKind::Assoc, WeakKind::SkewAssoc].into_iter().enumerate() {
                assert!(holds_at(&s, kind, &u, &v, &w, formula[k]));
                assert!(searched[k][idx].3 <= formula[k]);
            }
        }
    }
}

#[test]
fn weak_identities_on_a_table_with_a_pole() {
    // Y(t,x)t = t2 + x^-1
    let (_, s) = mutants().into_iter().find(|(m, _)| m.name == "pole-insert").unwrap();
    assert!(holds_at(&s, WeakKind::Comm, &b("t"), &b("1"), &b("t"), 0));
    // (x0+x2)^m (t2 + (x0+x2)^-1) never matches (x0+x2)^m (t2 + x0^-1)
    for m in 0..=3 {
        assert!(!holds_at(&s, WeakKind::Assoc, &b("t"), &b("t"), &b("1"), m));
    }
    let r = check_axiom(&s, Axiom::WeakAssoc, &CheckParams::default()).unwrap();
    assert!(matches!(r.witness, Some(Witness::Counterexample { .. })));
}

#[test]
fn jacobi_routes_match_the_delta_oracle() {
    for s in corpus() {
        let n = CheckParams::default().window_for(&s);
        for (u, v, w) in triples(&s) {
            let lib = jacobi_coefficients(&s, (&u, &v, &w), n).unwrap();
            let other = jacobi_via_three_term(&s, (&u, &v, &w), n).unwrap();
            assert_eq!(lib, other, "{}", s.name);
            assert_eq!(flatten(&lib), jacobi_oracle(&s, &u, &v, &w, n), "{}", s.name);
        }
    }
}

#[test]
fn jacobi_verdicts_match_the_exact_characterization() {
    for s in corpus() {
        let exact = triples(&s).iter().all(|(u, v, w)| jacobi_exact_oracle(&s, u, v, w));
        let r = check_axiom(&s, Axiom::Jacobi, &CheckParams::default()).unwrap();
        assert_eq!(r.passed(), exact, "{}", s.name);
    }
}

#[test]
fn each_mutant_breaks_its_target_with_a_witness() {
    let p = CheckParams::default();
    let frozen = [
        ("jacobi-break-1", Axiom::Jacobi),
        ("jacobi-break-2", Axiom::Jacobi),
        ("pole-insert", Axiom::WeakComm),
        ("vacuum-break", Axiom::VacuumProp),
        ("vacuum-shift", Axiom::VacuumProp),
        ("creation-break", Axiom::CreationProp),
        ("derivative-scale", Axiom::StrongCreation),
        ("skew-break", Axiom::SkewSymmetry),
        ("bracket-break", Axiom::DBracket),
        ("injectivity-break", Axiom::Injectivity),
    ];
    let all = mutants();
    assert_eq!(all.len(), frozen.len());
    for ((m, s), (name, target)) in all.iter().zip(frozen) {
        assert_eq!((m.name, m.target), (name, target));
        let base = family(m.base);
        assert!(check_axiom(&base, target, &p).unwrap().passed());
        let r = check_axiom(s, target, &p).unwrap();
        assert_eq!(r.verdict, Verdict::Fail, "{name}");
        assert!(
            matches!(r.witness, Some(Witness::Counterexample { .. }) | Some(Witness::Rank { .. })),
            "{name}: {r:?}"
        );
    }
}

#[test]
fn jacobi_mutant_witness_is_a_nonzero_coefficient() {
    let (_, s) = mutants().into_iter().find(|(m, _)| m.name == "jacobi-break-1").unwrap();
    let r = check_axiom(&s, Axiom::Jacobi, &CheckParams::default()).unwrap();
    let Some(Witness::Counterexample { at, monomial, value }) = r.witness else { panic!("{r:?}") };
    let (u, v, w) = (b(&at[0]), b(&at[1]), b(&at[2]));
    let n = CheckParams::default().window_for(&s);
    let coeffs = jacobi_coefficients(&s, (&u, &v, &w), n).unwrap();
    let hit = coeffs.iter().find(|(e, _)| {
        vxcheck::expansion::Monomial::from_pairs([
            (Var::named("x0"), e[0]),
            (Var::named("x1"), e[1]),
            (Var::named("x2"), e[2]),
        ])
        .to_string()
            == monomial
    });
    let (_, c) = hit.expect("witness monomial is among the nonzero coefficients");
    assert_eq!(c.to_string(), value);
    assert!(!c.is_zero());
}

#[test]
fn implication_matrix_has_no_violations() {
    let report = implication_matrix(&corpus(), &CheckParams::default()).unwrap();
    assert_eq!(report.violations(), 0);
    assert!(report.rows.iter().all(|r| r.status == RowStatus::Tested), "{:?}", report.rows);
    for (m, _) in mutants() {
        let v = &report.verdicts[m.name];
        assert!(v.values().any(|x| *x == Verdict::Fail), "{}", m.name);
    }
}

#[test]
fn rows_without_a_qualifying_member_are_untested() {
    let ideals: Vec<_> = borcherds_family().into_iter().filter(|s| s.vacuum().is_none()).collect();
    let report = implication_matrix(&ideals, &CheckParams::default()).unwrap();
    assert_eq!(report.violations(), 0);
    let row = |id: &str| report.rows.iter().find(|r| r.id == id).unwrap();
    assert_eq!(row("vf-skew-gives-skew").status, RowStatus::Untested);
    assert!(row("vf-skew-gives-skew").exercised_by.is_empty());
    assert_eq!(row("weak-comm-and-vf-skew-give-jacobi").status, RowStatus::Untested);
    assert_eq!(row("weak-comm-and-assoc-give-jacobi").status, RowStatus::Tested);
}

#[test]
fn d_of_a_mode_splits_over_both_factors() {
    for s in borcherds_family().into_iter().filter(|s| s.vacuum().is_some()) {
        for (u, v, _) in triples(&s) {
            for n in -6..=3 {
                let lhs = dop(&s, &mode(&s, &u, n, &v));
                let rhs = lin(&[(&mode(&s, &dop(&s, &u), n, &v), Rational::one()), (&mode(&s, &u, n, &dop(&s, &v)), Rational::one())]);
                assert_eq!(lhs, rhs, "{} n = {n}", s.name);
            }
        }
    }
}

#[test]
fn modes_of_du_are_shifted_modes_of_u() {
    // (Du)_n = -n u_{n-1}
    for s in corpus().into_iter().filter(|s| s.vacuum().is_some()) {
        let holds = triples(&s).iter().all(|(u, v, _)| {
            (-6..=3).all(|n| mode(&s, &dop(&s, u), n, v) == mode(&s, u, n - 1, v).scaled(&Rational::from_integer(-n)))
        });
        let dd = check_axiom(&s, Axiom::DDerivative, &CheckParams::default()).unwrap().passed();
        assert_eq!(holds, dd, "{}", s.name);
    }
}

#[test]
fn skew_symmetry_in_components() {
    for s in borcherds_family().into_iter().filter(|s| s.vacuum().is_some()) {
        for (u, v, _) in triples(&s) {
            for n in -6..=3 {
                let mut rhs = VectorCoeff::new();
                for j in 0..=8i64 {
                    let mut term = mode(&s, &v, n + j, &u);
                    for _ in 0..j {
                        term = dop(&s, &term);
                    }
                    let c = Rational::sign_power(n + j + 1) * vxcheck::scalars::factorial(j as u64).recip().unwrap();
                    rhs.add_scaled(&term, &c);
                }
                assert_eq!(mode(&s, &u, n, &v), rhs, "{} n = {n}", s.name);
            }
        }
    }
}

/// `e^{zD} Y(u,x)v` and `Y(u,x+z) e^{zD} v`, keyed by `(x, z)` powers.
fn exponentiated_sides(s: &VertexStructure, u: &VectorCoeff, v: &VectorCoeff) -> (Table, Table) {
    let exp = |w: &VectorCoeff| {
        let mut out = Vec::new();
        let mut cur = w.clone();
        let mut j = 0u64;
        while !cur.is_zero() {
            out.push(cur.scaled(&vxcheck::scalars::factorial(j).recip().unwrap()));
            cur = dop(s, &cur);
            j += 1;
        }
        out
    };
    let mut lhs = Table::new();
    for (k, c) in poly1(s, u, v) {
        for (j, term) in exp(&c).into_iter().enumerate() {
            for (id, r) in term.entries() {
                add(&mut lhs, (vec![k, j as i64], id.to_string()), qr(r));
            }
        }
    }
    let mut rhs = Table::new();
    for (j, ev) in exp(v).into_iter().enumerate() {
        for (k, c) in poly1(s, u, &ev) {
            assert!(k >= 0, "polynomial tables only");
            for t in 0..=k {
                for (id, r) in c.entries() {
                    add(&mut rhs, (vec![k - t, j as i64 + t], id.to_string()), binom(k, t) * qr(r));
                }
            }
        }
    }
    (lhs, rhs)
}

#[test]
fn exponentiated_bracket_identity() {
    for s in borcherds_family().into_iter().filter(|s| s.vacuum().is_some()) {
        for (u, v, _) in triples(&s) {
            let (lhs, rhs) = exponentiated_sides(&s, &u, &v);
            assert_eq!(lhs, rhs, "{}", s.name);
        }
    }
}

#[test]
fn vacuum_free_skew_matches_skew_plus_d_derivative() {
    let p = CheckParams::default();
    for s in corpus().into_iter().filter(|s| s.vacuum().is_some()) {
        let vf = check_axiom(&s, Axiom::VfSkewSymmetry, &p).unwrap().passed();
        let skew = check_axiom(&s, Axiom::SkewSymmetry, &p).unwrap().passed();
        let dd = check_axiom(&s, Axiom::DDerivative, &p).unwrap().passed();
        assert_eq!(vf, skew && dd, "{}", s.name);
    }
}

#[test]
fn configs_round_trip() {
    for s in corpus() {
        let cfg = StructureConfig::of(&s);
        let back = StructureConfig::parse(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        let rebuilt = back.build("unused").unwrap();
        assert_eq!(rebuilt, s);
    }
}

#[test]
fn configs_reject_unknown_fields_and_bad_references() {
    let err = StructureConfig::parse(r#"{"basis":["a"],"modes":[],"extra":1}"#).unwrap_err();
    assert!(matches!(err, ValgError::Invalid(_)));
    let cfg = StructureConfig::parse(r#"{"basis":["a"],"modes":[{"u":"a","n":-1,"v":"b","coeff":{"a":1}}]}"#).unwrap();
    assert!(matches!(cfg.build("x"), Err(ValgError::Invalid(_))));
    let cfg = StructureConfig::parse(r#"{"basis":["a"],"modes":[{"u":"a","n":-2,"v":"a","coeff":{"a":1}}],"vacuum":"a"}"#)
        .unwrap();
    assert!(matches!(cfg.build("x"), Err(ValgError::Invalid(ref m)) if m.contains("nilpotent")));
}

#[test]
fn vacuum_axioms_need_a_vacuum() {
    let s = family("borcherds-k3-ideal");
    for a in Axiom::ALL.into_iter().filter(|a| a.needs_vacuum()) {
        assert!(matches!(check_axiom(&s, a, &CheckParams::default()), Err(ValgError::NoVacuum(_))));
    }
}

/// `Q[t]/(t^k)` with `D = (c0 t^2 + c1 t^3) d/dt`.
fn scaled_algebra(k: usize, c0: i64, c1: i64) -> vxcheck::valg::Algebra {
    let mut alg = truncated_polynomial(k);
    let mut d = Matrix::zeros(k, k);
    for i in 1..k {
        for (shift, c) in [(1, c0), (2, c1)] {
            if i + shift < k {
                d.set(i + shift, i, Rational::from_integer(c * i as i64));
            }
        }
    }
    alg.derivation = d;
    alg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn commutative_constructions_satisfy_every_axiom(k in 2usize..=4, c0 in -3i64..=3, c1 in -3i64..=3) {
        let s = borcherds_construct(&scaled_algebra(k, c0, c1), true, None, "scaled").unwrap();
        let p = CheckParams::default();
        for a in Axiom::ALL {
            let r = check_axiom(&s, a, &p).unwrap();
            prop_assert!(r.passed(), "{a}: {r:?}");
        }
    }

    #[test]
    fn exponentiated_bracket_identity_on_scaled_algebras(k in 2usize..=5, c0 in -3i64..=3, c1 in -3i64..=3) {
        let s = borcherds_construct(&scaled_algebra(k, c0, c1), true, None, "scaled").unwrap();
        for (u, v, _) in triples(&s) {
            let (lhs, rhs) = exponentiated_sides(&s, &u, &v);
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn single_entry_edits_keep_checkers_consistent(k in 2usize..=3, u in 0usize..3, v in 0usize..3, n in -3i64..=1, c in -2i64..=2, target in 0usize..3) {
        let base = family(&format!("borcherds-k{k}"));
        let basis = base.basis().to_vec();
        let (u, v, target) = (basis[u % k].clone(), basis[v % k].clone(), basis[target % k].clone());
        let mut entries: Vec<_> = base.entries().into_iter().filter(|(a, m, b2, _)| !(a == &u && *m == n && b2 == &v)).collect();
        entries.push((u, n, v, VectorCoeff::from_entries([(target, Rational::from_integer(c))])));
        let Ok(s) = VertexStructure::new("edit", basis, entries, Some(BasisId::new("1"))) else { return Ok(()) };
        let p = CheckParams::default();
        let exact = triples(&s).iter().all(|(a, b2, w)| jacobi_exact_oracle(&s, a, b2, w));
        prop_assert_eq!(check_axiom(&s, Axiom::Jacobi, &p).unwrap().passed(), exact);
        let vf = check_axiom(&s, Axiom::VfSkewSymmetry, &p).unwrap().passed();
        let skew = check_axiom(&s, Axiom::SkewSymmetry, &p).unwrap().passed();
        let dd = check_axiom(&s, Axiom::DDerivative, &p).unwrap().passed();
        let minors = [Axiom::Injectivity, Axiom::VacuumProp, Axiom::CreationProp]
            .into_iter()
            .all(|a| check_axiom(&s, a, &p).unwrap().passed());
        if minors {
            prop_assert_eq!(vf, skew && dd);
        }
        let report = implication_matrix(std::slice::from_ref(&s), &p).unwrap();
        prop_assert_eq!(report.violations(), 0);
    }
}

#[test]
fn oracle_binomials_match_the_library() {
    for n in -4..=4 {
        for k in 0..=5u64 {
            assert_eq!(binom(n, k as i64), qr(&Rational::from_bigint(vxcheck::scalars::binom_int(n, k))));
        }
    }
    assert_eq!(q(3), qr(&Rational::from_integer(3)));
}
