use proptest::prelude::*;

use super::*;
use crate::scalars::{Rational, VectorCoeff};

fn v(name: &str) -> Var {
    Var::named(name)
}

fn sv(s: &str) -> SignedVar {
    s.parse().unwrap()
}

fn q(n: i64) -> Rational {
    Rational::from(n)
}

fn atom(head: &str, tail: &[&str], exp: i64) -> ExpansionAtom {
    ExpansionAtom::new(sv(head), tail.iter().map(|s| sv(s)).collect(), exp)
}

fn mono(pairs: &[(&str, i64)]) -> Monomial {
    Monomial::from_pairs(pairs.iter().map(|(n, e)| (v(n), *e)))
}

fn expr(vars: &[&str], terms: Vec<Term<Rational>>) -> DeltaExpr<Rational> {
    let mut e = DeltaExpr::new(vars.iter().map(|n| v(n)));
    for t in terms {
        e.push(t).unwrap();
    }
    e
}

fn atom_term(c: i64, a: ExpansionAtom) -> Term<Rational> {
    Term::new(q(c), Monomial::one()).with_atom(a)
}

fn delta(num: &[&str], denom: &str) -> DeltaAtom {
    DeltaAtom::new(num.iter().map(|s| sv(s)).collect(), v(denom)).unwrap()
}

#[test]
fn delta_to_atoms_three_variable() {
    let d = delta(&["+x2", "+x0"], "x1");
    let e = delta_to_atoms(&d);
    assert_eq!(e.terms()[0].atoms, vec![atom("+x2", &["+x0", "-x1"], -1)]);
    assert_eq!(e.terms()[1].atoms, vec![atom("+x1", &["-x2", "-x0"], -1)]);
}

#[test]
fn delta_to_atoms_two_variable() {
    let d = delta(&["+x"], "y");
    let e = delta_to_atoms(&d);
    assert_eq!(e.terms()[0].atoms, vec![atom("+x", &["-y"], -1)]);
    assert_eq!(e.terms()[1].atoms, vec![atom("+y", &["-x"], -1)]);
    // the y^-1 prefactor puts the constant coefficient of delta at x^0 y^-1
    assert_eq!(coeff_of(&e, &mono(&[("y", -1)])).unwrap(), q(1));
    assert_eq!(coeff_of(&e, &mono(&[])).unwrap(), q(0));
    let direct = expr(&["x", "y"], vec![Term::new(q(1), Monomial::one()).with_delta(d)]);
    for (a, b) in [(0, -1), (3, -4), (-5, 4), (2, 2)] {
        let m = mono(&[("x", a), ("y", b)]);
        assert_eq!(coeff_of(&e, &m).unwrap(), coeff_of(&direct, &m).unwrap(), "{m}");
    }
}

#[test]
fn delta_function_has_unit_coefficients() {
    // y * y^-1 delta(x/y) = delta(x/y); coefficient of x^n y^-n is 1
    let e = expr(&["x", "y"], vec![Term::new(q(1), mono(&[("y", 1)])).with_delta(delta(&["+x"], "y"))]);
    for n in [-2, 0, 5] {
        assert_eq!(coeff_of(&e, &mono(&[("x", n), ("y", -n)])).unwrap(), q(1));
    }
    assert_eq!(coeff_of(&e, &mono(&[("x", 1), ("y", 0)])).unwrap(), q(0));
}

#[test]
fn taylor_shift_examples() {
    let x = v("x");
    for n in [-3, 0, 2] {
        let e = expr(&["x", "y"], vec![Term::new(q(1), mono(&[("x", n)]))]);
        let shifted = taylor_shift(&e, x, sv("+y")).unwrap();
        if n == 0 {
            assert_eq!(shifted, e.normalize());
        } else {
            assert_eq!(shifted.terms()[0].atoms, vec![atom("+x", &["+y"], n)]);
        }
    }
    let e = expr(&["x", "y", "z"], vec![atom_term(1, atom("+x", &["-y"], -1))]);
    let shifted = taylor_shift(&e, x, sv("+z")).unwrap();
    assert_eq!(shifted.terms()[0].atoms, vec![atom("+x", &["+z", "-y"], -1)]);

    for n in -4..=4 {
        let e = expr(&["x", "y"], vec![atom_term(1, atom("+x", &["+y"], n))]);
        let back = taylor_shift(&e, x, sv("-y")).unwrap();
        let plain = expr(&["x", "y"], vec![Term::new(q(1), mono(&[("x", n)]))]).normalize();
        assert_eq!(back, plain, "n={n}");
    }
}

#[test]
fn taylor_shift_refuses_delta_denominator() {
    let e = expr(&["x", "y", "z"], vec![Term::new(q(1), Monomial::one()).with_delta(delta(&["+x"], "y"))]);
    assert!(matches!(taylor_shift(&e, v("y"), sv("+z")), Err(ExprError::Unsupported(_))));
    assert!(matches!(taylor_shift(&e, v("x"), sv("+x")), Err(ExprError::Unsupported(_))));
    assert!(matches!(taylor_shift(&e, v("x"), sv("+w")), Err(ExprError::UnknownVariable(_))));
}

#[test]
fn normalize_examples() {
    let pair = expr(
        &["x0", "x1", "x2"],
        vec![
            atom_term(1, atom("+x2", &["+x0", "-x1"], -1)),
            atom_term(-1, atom("+x2", &["-x1", "+x0"], -1)),
        ],
    );
    assert!(pair.normalize().is_empty());

    let cube = expr(&["x", "y"], vec![atom_term(1, atom("+x", &["+y", "-y"], 3))]);
    assert_eq!(cube.normalize(), expr(&["x", "y"], vec![Term::new(q(1), mono(&[("x", 3)]))]));

    let consts = expr(&["x"], vec![Term::new(q(2), Monomial::one()), Term::new(q(-2), Monomial::one())]);
    assert!(consts.normalize().is_empty());
}

#[test]
fn normalize_leaves_head_cancellation_alone() {
    let e = expr(&["x", "y"], vec![atom_term(1, atom("+x", &["+y", "-x"], -1))]);
    let n = e.normalize();
    assert_eq!(n.terms()[0].atoms, vec![atom("+x", &["+y", "-x"], -1)]);
    assert!(matches!(coeff_of(&n, &mono(&[("y", -1)])), Err(ExprError::NotSummable(_))));
}

#[test]
fn coeff_of_examples() {
    let e = expr(&["x", "y"], vec![atom_term(1, atom("+x", &["-y"], -1))]);
    assert_eq!(coeff_of(&e, &mono(&[("x", -1)])).unwrap(), q(1));
    // the only contribution is the k = 2 term binom(-1,2)(-1)^2 = 1
    assert_eq!(coeff_of(&e, &mono(&[("x", -3), ("y", 2)])).unwrap(), q(1));
    assert_eq!(coeff_of(&e, &mono(&[("x", -3), ("y", 1)])).unwrap(), q(0));
    let cubed = expr(&["x", "y"], vec![atom_term(1, atom("+x", &["-y"], -3))]);
    // binom(-3,2)(-1)^2 = 6
    assert_eq!(coeff_of(&cubed, &mono(&[("x", -5), ("y", 2)])).unwrap(), q(6));
}

#[test]
fn cyclic_products_are_refused() {
    let e = expr(
        &["x", "y"],
        vec![Term::new(q(1), Monomial::one())
            .with_atom(atom("+x", &["-y"], -1))
            .with_atom(atom("+y", &["-x"], -1))],
    );
    assert!(matches!(certify(&e), Err(ExprError::NotSummable(_))));
    let two_deltas = expr(&["x", "y"], vec![Term::new(q(1), Monomial::one()).with_delta(delta(&["+x"], "y"))]);
    assert!(two_deltas.mul(&two_deltas).is_err());
}

#[test]
fn vector_coefficients_expand() {
    let mut e: DeltaExpr<VectorCoeff> = DeltaExpr::new([v("x"), v("y")]);
    e.push(Term::new(VectorCoeff::basis("e1"), Monomial::one()).with_atom(atom("+x", &["-y"], -2))).unwrap();
    let c = coeff_of(&e, &mono(&[("x", -3), ("y", 1)])).unwrap();
    assert_eq!(c, VectorCoeff::from_entries([("e1", q(2))]));
}

#[test]
fn delta_substitution_collapses_numerator_powers() {
    let d = delta(&["+x1", "-x2"], "x0");
    for n in [-2, 3] {
        let e = expr(
            &["x0", "x1", "x2"],
            vec![Term::new(q(1), mono(&[("x2", 1)])).with_delta(d.clone()).with_atom(atom("+x1", &["-x2"], n))],
        );
        let out = delta_substitute(&e, SubstitutionDirection::NumeratorToDenominator).unwrap();
        assert!(out.terms()[0].atoms.is_empty());
        assert_eq!(out.terms()[0].monomial, mono(&[("x0", n), ("x2", 1)]));
        let w = Window::cube([v("x0"), v("x1"), v("x2")], 4);
        assert_eq!(expand_on_window(&e, &w).unwrap(), expand_on_window(&out, &w).unwrap());
    }
}

#[test]
fn delta_substitution_fixes_constants() {
    let e = expr(&["x", "y", "z"], vec![Term::new(q(1), Monomial::one()).with_delta(delta(&["+y", "+z"], "x"))]);
    for dir in [
        SubstitutionDirection::DenominatorToNumerator,
        SubstitutionDirection::NumeratorHeadToDenominator,
        SubstitutionDirection::NumeratorToDenominator,
    ] {
        assert_eq!(delta_substitute(&e, dir).unwrap(), e.normalize());
    }
}

#[test]
fn delta_substitution_refuses_untruncated_factor() {
    // z heads a negative power: the factor is not truncated in z
    let e = expr(
        &["x", "y", "z"],
        vec![Term::new(q(1), Monomial::one())
            .with_delta(delta(&["+y", "+z"], "x"))
            .with_atom(atom("+z", &["+y"], -1))],
    );
    assert!(matches!(
        delta_substitute(&e, SubstitutionDirection::DenominatorToNumerator),
        Err(ExprError::SubstitutionRefused(_))
    ));
}

#[test]
fn residue_examples() {
    // Res_x1 x1^-1 delta((x2+x0)/x1) F(x2,x0) = F(x2,x0)
    let f = |t: Term<Rational>| t.with_atom(atom("+x2", &["+x0"], -2));
    let e = expr(
        &["x0", "x1", "x2"],
        vec![f(Term::new(q(3), mono(&[("x0", 2)])).with_delta(delta(&["+x2", "+x0"], "x1")))],
    );
    let expected = expr(&["x0", "x1", "x2"], vec![f(Term::new(q(3), mono(&[("x0", 2)])))]).normalize();
    assert_eq!(residue(&e, v("x1")).unwrap(), expected);

    let cube = expr(&["x"], vec![Term::new(q(1), mono(&[("x", 3)]))]);
    assert!(residue(&cube, v("x")).unwrap().is_empty());

    let pole = expr(&["x", "y"], vec![atom_term(1, atom("+x", &["-y"], -1))]);
    let r = residue(&pole, v("x")).unwrap();
    assert_eq!(r, expr(&["x", "y"], vec![Term::new(q(1), Monomial::one())]));
}

#[test]
fn residue_in_tail_variable() {
    // Res_y of y^-3 (x - y)^-1 = coefficient of y^2 in (x-y)^-1 = x^-3
    let e = expr(&["x", "y"], vec![Term::new(q(1), mono(&[("y", -3)])).with_atom(atom("+x", &["-y"], -1))]);
    let r = residue(&e, v("y")).unwrap();
    assert_eq!(r, expr(&["x", "y"], vec![Term::new(q(1), mono(&[("x", -3)]))]));
}

#[test]
fn prove_identities_with_expected_pairings() {
    let two = prove_identity(Identity::TwoTerm).unwrap();
    assert_eq!(two.expanded.len(), 4);
    assert_eq!(two.pairs, vec![(1, 4), (2, 3)]);
    let three = prove_identity(Identity::ThreeTerm).unwrap();
    assert_eq!(three.expanded.len(), 6);
    let mut pairs = three.pairs.clone();
    pairs.sort();
    assert_eq!(pairs, vec![(1, 6), (2, 4), (3, 5)]);
    assert_eq!(three.residual, "0");
    let last = three.steps.last().unwrap();
    assert_eq!(last.after, hash_text(&DeltaExpr::<Rational>::over_default().canonical_text()));
}

#[test]
fn reassociation_is_normal_form_equality() {
    let x = v("x");
    for n in -4..=4 {
        // shift by y then z, versus the combined tail
        let base = expr(&["x", "y", "z"], vec![Term::new(q(1), mono(&[("x", n)]))]);
        let twice = taylor_shift(&taylor_shift(&base, x, sv("+y")).unwrap(), x, sv("+z")).unwrap();
        let once = expr(&["x", "y", "z"], vec![atom_term(1, atom("+x", &["+y", "+z"], n))]).normalize();
        assert_eq!(twice, once, "n={n}");
    }
}

#[test]
fn serialized_form() {
    let e = expr(&["x0", "x1", "x2"], vec![atom_term(-1, atom("+x1", &["-x2", "+x0"], -1))]);
    let text = e.canonical_text();
    assert!(text.contains(r#""atoms":[{"head":"+x1","tail":["+x0","-x2"],"exp":-1}]"#), "{text}");
    let back: DeltaExpr<Rational> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, e);
}

fn arb_signed(vars: &'static [&'static str]) -> impl Strategy<Value = SignedVar> {
    (0..vars.len(), any::<bool>()).prop_map(move |(i, neg)| SignedVar { var: v(vars[i]), negative: neg })
}

const VARS: &[&str] = &["x0", "x1", "x2"];

/// Single atoms over x0 < x1 < x2 whose tail only uses later variables: always summable.
fn arb_atom() -> impl Strategy<Value = ExpansionAtom> {
    (0usize..2, any::<bool>(), prop::collection::vec((1usize..3, any::<bool>()), 0..3), -3i64..4).prop_map(
        |(h, hneg, tail, exp)| {
            let tail = tail
                .into_iter()
                .map(|(i, neg)| SignedVar { var: v(VARS[(h + i).min(2)]), negative: neg })
                .filter(|s| s.var != v(VARS[h]))
                .collect();
            ExpansionAtom::new(SignedVar { var: v(VARS[h]), negative: hneg }, tail, exp)
        },
    )
}

fn arb_term() -> impl Strategy<Value = Term<Rational>> {
    (-5i64..6, prop::collection::vec(-2i64..3, 3), prop::option::of(arb_atom())).prop_map(|(c, es, a)| {
        let mut t = Term::new(q(c), Monomial::from_pairs(VARS.iter().map(|n| v(n)).zip(es)));
        if let Some(a) = a {
            t = t.with_atom(a);
        }
        t
    })
}

fn arb_expr() -> impl Strategy<Value = DeltaExpr<Rational>> {
    prop::collection::vec(arb_term(), 0..5).prop_map(|ts| expr(VARS, ts))
}

fn small_window() -> Window {
    Window::cube(VARS.iter().map(|n| v(n)), 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_is_idempotent(e in arb_expr()) {
        let once = e.normalize();
        prop_assert_eq!(once.normalize(), once);
    }

    #[test]
    fn normalize_preserves_coefficients(e in arb_expr()) {
        let w = small_window();
        prop_assert_eq!(expand_on_window(&e, &w).unwrap(), expand_on_window(&e.normalize(), &w).unwrap());
    }

    #[test]
    fn coeff_of_is_additive(a in arb_expr(), b in arb_expr(), es in prop::collection::vec(-3i64..4, 3)) {
        let m = Monomial::from_pairs(VARS.iter().map(|n| v(n)).zip(es));
        let sum = coeff_of(&a.add(&b), &m).unwrap();
        prop_assert_eq!(sum, coeff_of(&a, &m).unwrap() + coeff_of(&b, &m).unwrap());
    }

    #[test]
    fn window_matches_pointwise(e in arb_expr()) {
        let w = Window::cube(VARS.iter().map(|n| v(n)), 2);
        let full = expand_on_window(&e, &w).unwrap();
        for m in w.points() {
            let c = coeff_of(&e, &m).unwrap();
            prop_assert_eq!(full.get(&m).cloned().unwrap_or_else(Rational::zero), c);
        }
    }

    #[test]
    fn delta_to_atoms_preserves_coefficients(
        head in arb_signed(&["x1", "x2"]),
        tail in prop::collection::vec(arb_signed(&["x1", "x2"]), 0..2),
        mono_exp in -2i64..3,
    ) {
        prop_assume!(tail.iter().all(|t| t.var != head.var));
        let mut num = vec![head];
        num.extend(tail);
        let d = DeltaAtom::new(num, v("x0")).unwrap();
        let e = expr(VARS, vec![Term::new(q(1), mono(&[("x0", mono_exp)])).with_delta(d)]);
        let w = small_window();
        prop_assert_eq!(expand_on_window(&e, &w).unwrap(), expand_on_window(&expand_deltas(&e), &w).unwrap());
    }

    #[test]
    fn taylor_shift_matches_window_of_shifted_sum(n in -3i64..4, k in -2i64..3) {
        // x1^k * (x1 - x2)^n shifted x1 -> x1 + x0 equals (x1+x0)^k (x1 + x0 - x2)^n
        let e = expr(VARS, vec![Term::new(q(1), mono(&[("x1", k)])).with_atom(atom("+x1", &["-x2"], n))]);
        let shifted = taylor_shift(&e, v("x1"), sv("+x0")).unwrap();
        let direct = expr(VARS, vec![Term::new(q(1), Monomial::one())
            .with_atom(atom("+x1", &["+x0"], k))
            .with_atom(atom("+x1", &["+x0", "-x2"], n))]);
        let w = small_window();
        prop_assert_eq!(expand_on_window(&shifted, &w).unwrap(), expand_on_window(&direct, &w).unwrap());
    }

    #[test]
    fn delta_substitution_preserves_window(
        a in -2i64..3, b in -2i64..3, c in 0i64..3, n in -2i64..3,
        dir in 0usize..3,
    ) {
        // x0^-1 delta((x1 - x2)/x0) * x0^a x1^b x2^c (x1 - x2)^n
        let d = delta(&["+x1", "-x2"], "x0");
        let e = expr(VARS, vec![Term::new(q(1), mono(&[("x0", a), ("x1", b), ("x2", c)]))
            .with_delta(d)
            .with_atom(atom("+x1", &["-x2"], n))]);
        let direction = [
            SubstitutionDirection::DenominatorToNumerator,
            SubstitutionDirection::NumeratorHeadToDenominator,
            SubstitutionDirection::NumeratorToDenominator,
        ][dir];
        if let Ok(out) = delta_substitute(&e, direction) {
            let w = Window::cube(VARS.iter().map(|n| v(n)), 4);
            prop_assert_eq!(expand_on_window(&e, &w).unwrap(), expand_on_window(&out, &w).unwrap());
        }
    }
}
