use super::axioms::default_window;
use super::laurent::{substitute, times_binomial, Poly2, Shift};
use super::*;

fn v(name: &str) -> VectorCoeff {
    VectorCoeff::basis(BasisId::new(name))
}

fn poly(terms: &[((i64, i64), i64)]) -> Poly2 {
    terms.iter().map(|&(k, c)| (k, v("a").scaled(&Rational::from_integer(c)))).collect()
}

#[test]
fn binomial_factor_expands_with_signs() {
    // (X - Y)^2 * 1
    let p = times_binomial(&poly(&[((0, 0), 1)]), (1, -1), 2);
    assert_eq!(p, poly(&[((2, 0), 1), ((1, 1), -2), ((0, 2), 1)]));
}

#[test]
fn substitution_of_a_polynomial_terminates() {
    // z^2 w at z = x + y, keeping w in slot 1 and the tail y in slot 1 too
    let p = poly(&[((2, 1), 1)]);
    let s = substitute(&p, Shift { z: 0, keep: 1, head: (0, 1), tail: (1, 1) }, 0);
    assert!(s.finite);
    assert_eq!(s.poly, poly(&[((2, 1), 1), ((1, 2), 2), ((0, 3), 1)]));
}

#[test]
fn substitution_of_a_pole_is_truncated() {
    // z^-1 at z = x - y: x^-1 + x^-2 y + x^-3 y^2 + ...
    let p = poly(&[((-1, 0), 1)]);
    let s = substitute(&p, Shift { z: 0, keep: 1, head: (0, 1), tail: (1, -1) }, 3);
    assert!(!s.finite);
    assert_eq!(s.exact_to, 3);
    assert_eq!(s.poly, poly(&[((-1, 0), 1), ((-2, 1), 1), ((-3, 2), 1), ((-4, 3), 1)]));
}

#[test]
fn window_default_covers_poles_and_degrees() {
    assert_eq!(default_window(0, 0), 2);
    assert_eq!(default_window(1, 0), 4);
    assert_eq!(default_window(0, 3), 7);
    assert_eq!(default_window(2, 1), 7);
}

#[test]
fn axiom_ids_parse_back() {
    for a in Axiom::ALL {
        assert_eq!(a.id().parse::<Axiom>().unwrap(), a);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, format!("\"{}\"", a.id()));
    }
    assert!("jacobi_identity".parse::<Axiom>().is_err());
}

#[test]
fn repeated_entries_add_up() {
    let e = |c: i64| (BasisId::new("a"), -1, BasisId::new("a"), v("a").scaled(&Rational::from_integer(c)));
    let s = VertexStructure::new("sum", vec![BasisId::new("a")], [e(2), e(3)], None).unwrap();
    assert_eq!(s.mode(0, -1, 0), Some(&v("a").scaled(&Rational::from_integer(5))));
    let s = VertexStructure::new("cancel", vec![BasisId::new("a")], [e(2), e(-2)], None).unwrap();
    assert!(s.entries().is_empty());
}

#[test]
fn duplicate_basis_is_rejected() {
    let err = VertexStructure::new("dup", vec![BasisId::new("a"), BasisId::new("a")], [], None).unwrap_err();
    assert!(matches!(err, ValgError::Invalid(_)));
}
