use super::*;
use crate::valg::{borcherds_family, truncated_polynomial};

fn k(n: usize) -> VertexStructure {
    borcherds_family().into_iter().find(|s| s.name == format!("borcherds-k{n}")).unwrap()
}

#[test]
fn module_axiom_ids_parse_back() {
    for a in ModuleAxiom::ALL {
        assert_eq!(a.id().parse::<ModuleAxiom>().unwrap(), a);
        assert_eq!(serde_json::to_string(&a).unwrap(), format!("\"{}\"", a.id()));
    }
    assert!("jacobi".parse::<ModuleAxiom>().is_err());
}

#[test]
fn regular_module_copies_the_table() {
    let s = k(3);
    let m = ModuleStructure::regular(&s);
    assert_eq!(m.name, "borcherds-k3-regular");
    assert_eq!(m.entries(), s.entries());
}

#[test]
fn construction_over_the_regular_action_is_the_regular_module() {
    let s = k(4);
    let alg = truncated_polynomial(4);
    let m = module_construct(&s, &alg, &regular_module(&alg), "r").unwrap();
    assert_eq!(m.entries(), ModuleStructure::regular(&s).entries());
}

#[test]
fn unknown_module_vector_is_rejected() {
    let s = k(2);
    let e = (BasisId::new("t"), -1, BasisId::new("1"), VectorCoeff::basis(BasisId::new("zz")));
    let err = ModuleStructure::new("bad", s, vec![BasisId::new("1")], [e]).unwrap_err();
    assert!(matches!(err, ValgError::Invalid(_)));
}

#[test]
fn quotient_drops_the_killed_span() {
    let alg = truncated_polynomial(3);
    let q = quotient_module(&alg, &alg.basis[2..]).unwrap();
    assert_eq!(q.basis.len(), 2);
    // t · t = t2 = 0 in A/t2A
    assert!(q.act(&alg, &VectorCoeff::basis(BasisId::new("t")), &VectorCoeff::basis(BasisId::new("t"))).is_zero());
    assert!(ideal_module(&alg, &alg.basis[..1]).is_err());
}

#[test]
fn config_round_trips() {
    for m in module_family().iter().take(4) {
        let back = ModuleConfig::parse(&ModuleConfig::of(m).to_json()).unwrap().build("x").unwrap();
        assert_eq!(&back, m);
    }
    assert!(ModuleConfig::parse(r#"{"basis":[],"modes":[],"wbasis":[],"wmodes":[],"extra":1}"#).is_err());
}
