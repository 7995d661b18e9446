//! Checkers for the individual axioms.
//!
//! Laurent-polynomial tables make every weak property decidable: an expansion like
//! `(x0+x2)^k` with `k < 0` never terminates, and a Laurent polynomial expanded at
//! `x1 = x0 + x2` is finite only when it has no negative powers of `x1`. So each
//! weak identity either reduces to a finite comparison or fails outright.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::laurent::{
    add1, derivative1, diff1, diff2, exp_apply, pole1, reflect_axis, shifted, substitute, swap, times_binomial,
    Poly1, Poly2, Shift, Substituted,
};
use super::{Axiom, Result, ValgError, VertexStructure};
use crate::elemprop::{three_term_combination, TripleInstance};
use crate::expansion::{expand_on_window, DeltaAtom, DeltaExpr, Monomial, Term, Var, Window};
use crate::scalars::{Coefficient, Matrix, Rational, VectorCoeff};
use crate::series::WindowedSeries;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckParams {
    /// Half-width of the Jacobi window.
    pub window: Option<i64>,
    /// Largest pole-clearing exponent tried by the weak properties.
    pub m_max: Option<u32>,
}

impl CheckParams {
    /// `max(2P + 2, 2E + P + 1)` with `P` the largest pole and `E = max(P, H)`, `H` the
    /// largest power of `x` in the table.
    pub fn window_for(&self, s: &impl TripleProducts) -> i64 {
        self.window.unwrap_or_else(|| default_window(s.max_pole(), s.max_degree()))
    }

    /// Every weak identity that holds at all holds once `m` reaches the largest pole.
    pub fn m_max_for(&self, s: &impl TripleProducts) -> u32 {
        self.m_max.unwrap_or_else(|| s.max_pole())
    }
}

pub(crate) fn default_window(p: u32, h: u32) -> i64 {
    let (p, h) = (p as i64, h as i64);
    (2 * p + 2).max(2 * p.max(h) + p + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "N/A")]
    NotApplicable,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::NotApplicable => "N/A",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Minimal clearing exponent per basis triple `(u, v, w, m)`.
    PoleOrders { orders: Vec<(String, String, String, u32)> },
    /// A coefficient that should vanish and does not.
    Counterexample { at: Vec<String>, monomial: String, value: String },
    Rank { rank: usize, dim: usize },
}

/// An identifier with a formula anchor, for report rows.
pub trait Checkable: Copy {
    fn id(self) -> &'static str;
    fn anchor(self) -> &'static str;
}

impl Checkable for Axiom {
    fn id(self) -> &'static str {
        Axiom::id(self)
    }

    fn anchor(self) -> &'static str {
        Axiom::anchor(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport<A = Axiom> {
    pub axiom: A,
    pub anchor: String,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub window: Option<i64>,
    pub m_max: Option<u32>,
}

impl<A: Checkable> PropertyReport<A> {
    pub(crate) fn new(axiom: A, verdict: Verdict, witness: Option<Witness>) -> Self {
        PropertyReport { axiom, anchor: axiom.anchor().to_string(), verdict, witness, window: None, m_max: None }
    }

    pub(crate) fn from_outcome(axiom: A, (verdict, witness): Outcome) -> Self {
        Self::new(axiom, verdict, witness)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn var(name: &str) -> Var {
    Var::named(name)
}

fn mono2(a: &str, b: &str, e: (i64, i64)) -> String {
    Monomial::from_pairs([(var(a), e.0), (var(b), e.1)]).to_string()
}

fn mono1(e: i64) -> String {
    Monomial::var(var("x"), e).to_string()
}

fn names(s: &VertexStructure, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| s.basis()[i].to_string()).collect()
}

fn triples(d: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..d).flat_map(move |i| (0..d).flat_map(move |j| (0..d).map(move |k| (i, j, k))))
}

pub(crate) type Outcome = (Verdict, Option<Witness>);

/// A basis triple `(u, v, w)` and the names of its entries.
pub type BasisTriple = ([VectorCoeff; 3], Vec<String>);

/// The products compared by the Jacobi identity and the weak properties:
/// `Y(u,x1)Y(v,x2)w` and `Y(Y(u,x0)v,x2)w`, for a structure acting on itself or on a
/// module.
pub trait TripleProducts {
    fn name(&self) -> &str;
    fn basis_triples(&self) -> Vec<BasisTriple>;
    /// `Y(u,x1)Y(v,x2)w` keyed by `(x1, x2)` powers.
    fn product(&self, u: &VectorCoeff, v: &VectorCoeff, w: &VectorCoeff) -> Poly2;
    /// `Y(Y(u,x0)v,x2)w` keyed by `(x0, x2)` powers.
    fn iterate(&self, u: &VectorCoeff, v: &VectorCoeff, w: &VectorCoeff) -> Poly2;
    fn max_pole(&self) -> u32;
    fn max_degree(&self) -> u32;
}

impl TripleProducts for VertexStructure {
    fn name(&self) -> &str {
        &self.name
    }

    fn basis_triples(&self) -> Vec<BasisTriple> {
        triples(self.dim()).map(|(i, j, k)| ([self.e(i), self.e(j), self.e(k)], names(self, &[i, j, k]))).collect()
    }

    fn product(&self, u: &VectorCoeff, v: &VectorCoeff, w: &VectorCoeff) -> Poly2 {
        self.compose(u, v, w)
    }

    fn iterate(&self, u: &VectorCoeff, v: &VectorCoeff, w: &VectorCoeff) -> Poly2 {
        VertexStructure::iterate(self, u, v, w)
    }

    fn max_pole(&self) -> u32 {
        VertexStructure::max_pole(self)
    }

    fn max_degree(&self) -> u32 {
        VertexStructure::max_degree(self)
    }
}

pub fn check_axiom(s: &VertexStructure, axiom: Axiom, params: &CheckParams) -> Result<PropertyReport> {
    if axiom.needs_vacuum() {
        s.vac(axiom.id())?;
    }
    let mut report = match axiom {
        Axiom::Jacobi => PropertyReport::from_outcome(axiom, check_jacobi(s, params.window_for(s))?),
        Axiom::WeakComm => PropertyReport::from_outcome(axiom, check_weak(s, WeakKind::Comm, params.m_max_for(s))),
        Axiom::WeakAssoc => PropertyReport::from_outcome(axiom, check_weak(s, WeakKind::Assoc, params.m_max_for(s))),
        Axiom::WeakSkewAssoc => {
            PropertyReport::from_outcome(axiom, check_weak(s, WeakKind::SkewAssoc, params.m_max_for(s)))
        }
        Axiom::VfSkewSymmetry => PropertyReport::from_outcome(axiom, check_vf_skew(s)),
        Axiom::SkewSymmetry => check_pairs(s, axiom, skew_difference)?,
        Axiom::DDerivative => check_pairs(s, axiom, d_derivative_difference)?,
        Axiom::DBracket => check_pairs(s, axiom, d_bracket_difference)?,
        Axiom::VacuumProp => check_singles(s, axiom, vacuum_difference)?,
        Axiom::CreationProp => check_singles(s, axiom, creation_difference)?,
        Axiom::StrongCreation => check_singles(s, axiom, strong_creation_difference)?,
        Axiom::Injectivity => check_injectivity(s),
    };
    match axiom {
        Axiom::Jacobi => report.window = Some(params.window_for(s)),
        Axiom::WeakComm | Axiom::WeakAssoc | Axiom::WeakSkewAssoc => report.m_max = Some(params.m_max_for(s)),
        _ => {}
    }
    Ok(report)
}

/// Pole order read off the table: minus the least power of `x` in `Y(u,x)v` when negative.
pub fn minimal_pole_order(s: &VertexStructure, u: &VectorCoeff, v: &VectorCoeff) -> u32 {
    pole1(&s.y(u, v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeakKind {
    Comm,
    Assoc,
    SkewAssoc,
}

impl WeakKind {
    fn vars(self) -> (&'static str, &'static str) {
        match self {
            WeakKind::Comm => ("x1", "x2"),
            WeakKind::Assoc => ("x0", "x2"),
            WeakKind::SkewAssoc => ("x0", "x1"),
        }
    }
}

/// The weak identity's left side minus right side at exponent `m`. Coefficients are
/// exact wherever `exact` says so; `vanishes` is the exact verdict.
struct WeakDiff {
    diff: Poly2,
    vanishes: bool,
    exact: [i64; 2],
}

impl WeakDiff {
    fn first_nonzero(&self) -> Option<((i64, i64), &VectorCoeff)> {
        self.diff.iter().find(|(&(a, b), _)| a <= self.exact[0] && b <= self.exact[1]).map(|(&k, c)| (k, c))
    }
}

fn bound(sub: &Substituted, slot: usize, exact: &mut [i64; 2]) {
    if !sub.finite {
        exact[slot] = exact[slot].min(sub.exact_to);
    }
}

fn weak_diff(
    s: &impl TripleProducts,
    kind: WeakKind,
    (u, v, w): (&VectorCoeff, &VectorCoeff, &VectorCoeff),
    m: u32,
    cap: i64,
) -> WeakDiff {
    let mut exact = [i64::MAX; 2];
    match kind {
        WeakKind::Comm => {
            let d = diff2(&s.product(u, v, w), &swap(&s.product(v, u, w)));
            let diff = times_binomial(&d, (1, -1), m);
            WeakDiff { vanishes: diff.is_empty(), diff, exact }
        }
        WeakKind::Assoc => {
            // (x0+x2)^m Y(u,x0+x2)Y(v,x2)w: x1^m A(x1,x2) at x1 = x0 + x2
            let a = shifted(&s.product(u, v, w), (m as i64, 0));
            let t1 = substitute(&a, Shift { z: 0, keep: 1, head: (0, 1), tail: (1, 1) }, cap);
            bound(&t1, 1, &mut exact);
            let t2 = times_binomial(&s.iterate(u, v, w), (1, 1), m);
            let diff = diff2(&t1.poly, &t2);
            WeakDiff { vanishes: t1.finite && diff.is_empty(), diff, exact }
        }
        WeakKind::SkewAssoc => {
            // Y(v,y)Y(u,x1)w at y = -x0 + x1, and Y(Y(u,x0)v,z)w at z = x1 - x0
            let b = shifted(&s.product(v, u, w), (m as i64, 0));
            let t1 = substitute(&b, Shift { z: 0, keep: 1, head: (0, -1), tail: (1, 1) }, cap);
            bound(&t1, 1, &mut exact);
            let k = shifted(&s.iterate(u, v, w), (0, m as i64));
            let t2 = substitute(&k, Shift { z: 1, keep: 0, head: (1, 1), tail: (0, -1) }, cap);
            bound(&t2, 0, &mut exact);
            let diff = diff2(&t1.poly, &t2.poly);
            WeakDiff { vanishes: t1.finite && t2.finite && diff.is_empty(), diff, exact }
        }
    }
}

/// Whether the weak identity of `kind` holds on `(u, v, w)` with exponent `m`.
pub fn holds_at(s: &impl TripleProducts, kind: WeakKind, u: &VectorCoeff, v: &VectorCoeff, w: &VectorCoeff, m: u32) -> bool {
    weak_diff(s, kind, (u, v, w), m, 0).vanishes
}

/// A nonzero coefficient inside the exact region, widening the truncation until one
/// appears. One always does: a nonterminating expansion has nonzero terms past any
/// finite polynomial it is compared with.
fn weak_counterexample(
    s: &impl TripleProducts,
    kind: WeakKind,
    t: (&VectorCoeff, &VectorCoeff, &VectorCoeff),
    m: u32,
) -> ((i64, i64), VectorCoeff) {
    let mut cap = 8;
    loop {
        let d = weak_diff(s, kind, t, m, cap);
        if let Some((k, c)) = d.first_nonzero() {
            return (k, c.clone());
        }
        assert!(cap < 1 << 12, "a failing weak identity always has a visible coefficient");
        cap *= 2;
    }
}

pub(crate) fn check_weak(s: &impl TripleProducts, kind: WeakKind, m_max: u32) -> Outcome {
    let mut orders = Vec::new();
    for ([u, v, w], n) in s.basis_triples() {
        match (0..=m_max).find(|&m| holds_at(s, kind, &u, &v, &w, m)) {
            Some(m) => orders.push((n[0].clone(), n[1].clone(), n[2].clone(), m)),
            None => {
                let (e, c) = weak_counterexample(s, kind, (&u, &v, &w), m_max);
                let (a, b) = kind.vars();
                let witness = Witness::Counterexample { at: n, monomial: mono2(a, b, e), value: c.to_string() };
                return (Verdict::Fail, Some(witness));
            }
        }
    }
    (Verdict::Pass, Some(Witness::PoleOrders { orders }))
}

fn vf_skew_diff(s: &impl TripleProducts, (u, v, w): (&VectorCoeff, &VectorCoeff, &VectorCoeff), cap: i64) -> WeakDiff {
    let lhs = s.iterate(u, v, w);
    let k = reflect_axis(&s.iterate(v, u, w), 0);
    let rhs = substitute(&k, Shift { z: 1, keep: 0, head: (1, 1), tail: (0, 1) }, cap);
    let mut exact = [i64::MAX; 2];
    bound(&rhs, 0, &mut exact);
    let diff = diff2(&lhs, &rhs.poly);
    WeakDiff { vanishes: rhs.finite && diff.is_empty(), diff, exact }
}

pub(crate) fn check_vf_skew(s: &impl TripleProducts) -> Outcome {
    for ([u, v, w], n) in s.basis_triples() {
        let t = (&u, &v, &w);
        if vf_skew_diff(s, t, 0).vanishes {
            continue;
        }
        let mut cap = 8;
        let (e, c) = loop {
            let d = vf_skew_diff(s, t, cap);
            if let Some((e, c)) = d.first_nonzero() {
                break (e, c.clone());
            }
            assert!(cap < 1 << 12, "a failing identity always has a visible coefficient");
            cap *= 2;
        };
        let witness = Witness::Counterexample { at: n, monomial: mono2("x0", "x2", e), value: c.to_string() };
        return (Verdict::Fail, Some(witness));
    }
    (Verdict::Pass, None)
}

fn first_nonzero1(p: &Poly1) -> Option<(i64, VectorCoeff)> {
    p.iter().next().map(|(&k, c)| (k, c.clone()))
}

fn check_pairs(
    s: &VertexStructure,
    axiom: Axiom,
    difference: fn(&VertexStructure, &VectorCoeff, &VectorCoeff) -> Result<Poly1>,
) -> Result<PropertyReport> {
    for i in 0..s.dim() {
        for j in 0..s.dim() {
            if let Some((e, c)) = first_nonzero1(&difference(s, &s.e(i), &s.e(j))?) {
                let witness = Witness::Counterexample { at: names(s, &[i, j]), monomial: mono1(e), value: c.to_string() };
                return Ok(PropertyReport::new(axiom, Verdict::Fail, Some(witness)));
            }
        }
    }
    Ok(PropertyReport::new(axiom, Verdict::Pass, None))
}

fn check_singles(
    s: &VertexStructure,
    axiom: Axiom,
    difference: fn(&VertexStructure, &VectorCoeff) -> Result<Poly1>,
) -> Result<PropertyReport> {
    for i in 0..s.dim() {
        if let Some((e, c)) = first_nonzero1(&difference(s, &s.e(i))?) {
            let witness = Witness::Counterexample { at: names(s, &[i]), monomial: mono1(e), value: c.to_string() };
            return Ok(PropertyReport::new(axiom, Verdict::Fail, Some(witness)));
        }
    }
    Ok(PropertyReport::new(axiom, Verdict::Pass, None))
}

fn exp_d(s: &VertexStructure, v: &VectorCoeff) -> Result<Poly1> {
    let vac = s.vac("e^{xD}")?;
    Ok(exp_apply(&vac.dop, s.basis(), v))
}

/// `Y(u,x)v - e^{xD}Y(v,-x)u`
fn skew_difference(s: &VertexStructure, u: &VectorCoeff, v: &VectorCoeff) -> Result<Poly1> {
    let mut rhs = Poly1::new();
    for (e, c) in s.y(v, u) {
        let c = if e % 2 != 0 { c.negated() } else { c };
        for (k, d) in exp_d(s, &c)? {
            add1(&mut rhs, e + k, &d, &Rational::one());
        }
    }
    Ok(diff1(&s.y(u, v), &rhs))
}

/// `Y(Du,x)w - d/dx Y(u,x)w`
fn d_derivative_difference(s: &VertexStructure, u: &VectorCoeff, w: &VectorCoeff) -> Result<Poly1> {
    Ok(diff1(&s.y(&s.dop(u)?, w), &derivative1(&s.y(u, w))))
}

/// `D Y(u,x)v - Y(u,x)Dv - d/dx Y(u,x)v`
fn d_bracket_difference(s: &VertexStructure, u: &VectorCoeff, v: &VectorCoeff) -> Result<Poly1> {
    let mut lhs = Poly1::new();
    for (e, c) in s.y(u, v) {
        add1(&mut lhs, e, &s.dop(&c)?, &Rational::one());
    }
    let lhs = diff1(&lhs, &s.y(u, &s.dop(v)?));
    Ok(diff1(&lhs, &derivative1(&s.y(u, v))))
}

fn constant(v: &VectorCoeff) -> Poly1 {
    let mut p = Poly1::new();
    add1(&mut p, 0, v, &Rational::one());
    p
}

/// `Y(1,x)v - v`
fn vacuum_difference(s: &VertexStructure, v: &VectorCoeff) -> Result<Poly1> {
    let one = s.vac("vacuum property")?.one.clone();
    Ok(diff1(&s.y(&one, v), &constant(v)))
}

/// The negative powers of `Y(u,x)1`, and `Y(u,0)1 - u`.
fn creation_difference(s: &VertexStructure, u: &VectorCoeff) -> Result<Poly1> {
    let one = s.vac("creation property")?.one.clone();
    let y = s.y(u, &one);
    let mut out: Poly1 = y.range(..0).map(|(&k, c)| (k, c.clone())).collect();
    let at_zero = y.get(&0).cloned().unwrap_or_default();
    add1(&mut out, 0, &at_zero, &Rational::one());
    add1(&mut out, 0, u, &Rational::from_integer(-1));
    Ok(out)
}

/// `Y(u,x)1 - e^{xD}u`
fn strong_creation_difference(s: &VertexStructure, u: &VectorCoeff) -> Result<Poly1> {
    let one = s.vac("strong creation")?.one.clone();
    Ok(diff1(&s.y(u, &one), &exp_d(s, u)?))
}

fn check_injectivity(s: &VertexStructure) -> PropertyReport {
    let d = s.dim();
    let mut cols = std::collections::BTreeSet::new();
    for i in 0..d {
        for j in 0..d {
            for (n, c) in s.ytable_row(i, j) {
                for (b, _) in c.entries() {
                    cols.insert((j, *n, b.clone()));
                }
            }
        }
    }
    let cols: Vec<_> = cols.into_iter().collect();
    let mut m = Matrix::zeros(d, cols.len());
    for (ci, (j, n, b)) in cols.iter().enumerate() {
        for i in 0..d {
            if let Some(c) = s.mode(i, *n, *j) {
                m.set(i, ci, c.get(b));
            }
        }
    }
    let rank = m.rank();
    let verdict = if rank == d { Verdict::Pass } else { Verdict::Fail };
    PropertyReport::new(Axiom::Injectivity, verdict, Some(Witness::Rank { rank, dim: d }))
}

type Coeffs3 = HashMap<[i64; 3], VectorCoeff>;

/// The three delta functions of the Jacobi identity tabulated by the expansion engine,
/// indexed by `(x0, x1, x2)` exponents.
pub(crate) struct DeltaTables {
    n: i64,
    tables: [HashMap<[i64; 3], Rational>; 3],
}

impl DeltaTables {
    pub(crate) fn new(n: i64, lo: i64, hi: i64) -> Result<Self> {
        let (x0, x1, x2) = (var("x0"), var("x1"), var("x2"));
        // numerator, denominator, and the variable that the factor does not touch
        let specs = [
            (vec![x1.pos(), x2.neg()], x0),
            (vec![x2.neg(), x1.pos()], x0),
            (vec![x2.pos(), x0.pos()], x1),
        ];
        let mut tables: [HashMap<[i64; 3], Rational>; 3] = Default::default();
        for (slot, (num, den)) in specs.into_iter().enumerate() {
            let term = Term::new(Rational::one(), Monomial::one()).with_delta(DeltaAtom::new(num, den)?);
            let expr = DeltaExpr::new([x0, x1, x2]).with_term(term)?;
            let window = Window::new([x0, x1, x2].map(|v| if v == den { (v, -n, n) } else { (v, -n - hi, n - lo) }));
            for (m, c) in expand_on_window(&expr, &window)? {
                tables[slot].insert([m.exp(x0), m.exp(x1), m.exp(x2)], c);
            }
        }
        Ok(DeltaTables { n, tables })
    }

    /// `Σ δ[M - e] p_e` over the cube, where `p` sits in coordinates `slots`.
    fn convolve(&self, which: usize, p: &Poly2, slots: [usize; 2], sign: &Rational, out: &mut Coeffs3) {
        let n = self.n;
        let table = &self.tables[which];
        let free = 3 - slots[0] - slots[1];
        for (&(a, b), c) in p {
            let mut e = [0i64; 3];
            e[slots[0]] = a;
            e[slots[1]] = b;
            // the delta factor has total degree -1, so two coordinates fix the third
            for o0 in -n..=n {
                for o1 in -n..=n {
                    let mut o = [0i64; 3];
                    o[slots[0]] = o0;
                    o[slots[1]] = o1;
                    let d0 = o0 - e[slots[0]];
                    let d1 = o1 - e[slots[1]];
                    let df = -1 - d0 - d1;
                    let of = df + e[free];
                    if of < -n || of > n {
                        continue;
                    }
                    o[free] = of;
                    let mut d = [0i64; 3];
                    d[slots[0]] = d0;
                    d[slots[1]] = d1;
                    d[free] = df;
                    if let Some(k) = table.get(&d) {
                        let slot = out.entry(o).or_default();
                        slot.add_scaled(c, &(k * sign));
                    }
                }
            }
        }
    }
}

fn jacobi_bounds(s: &impl TripleProducts) -> (i64, i64) {
    (-(s.max_pole() as i64), s.max_degree().max(s.max_pole()) as i64)
}

/// All nonzero coefficients of the Jacobi combination on `[-n, n]^3`, from the
/// expansion engine's delta tables.
pub fn jacobi_coefficients(
    s: &impl TripleProducts,
    (u, v, w): (&VectorCoeff, &VectorCoeff, &VectorCoeff),
    n: i64,
) -> Result<std::collections::BTreeMap<[i64; 3], VectorCoeff>> {
    let (lo, hi) = jacobi_bounds(s);
    let tables = DeltaTables::new(n, lo, hi)?;
    Ok(jacobi_with(&tables, s, (u, v, w)))
}

fn jacobi_with(
    tables: &DeltaTables,
    s: &impl TripleProducts,
    (u, v, w): (&VectorCoeff, &VectorCoeff, &VectorCoeff),
) -> std::collections::BTreeMap<[i64; 3], VectorCoeff> {
    let mut out = Coeffs3::new();
    let one = Rational::one();
    let m1 = Rational::from_integer(-1);
    tables.convolve(0, &s.product(u, v, w), [1, 2], &one, &mut out);
    tables.convolve(1, &swap(&s.product(v, u, w)), [1, 2], &m1, &mut out);
    tables.convolve(2, &s.iterate(u, v, w), [0, 2], &m1, &mut out);
    out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn series_y(p: &Poly2) -> WindowedSeries<VectorCoeff> {
    let (y1, y2) = (var("y1"), var("y2"));
    WindowedSeries::polynomial(
        [y1, y2],
        p.iter().map(|(&(a, b), c)| (Monomial::from_pairs([(y1, a), (y2, b)]), c.clone())),
    )
    .expect("two variable polynomial")
}

/// The same combination through the three-term checker, with `f`, `g`, `h` the
/// product, the transposed product and the iterate.
pub fn jacobi_via_three_term(
    s: &impl TripleProducts,
    (u, v, w): (&VectorCoeff, &VectorCoeff, &VectorCoeff),
    n: i64,
) -> Result<std::collections::BTreeMap<[i64; 3], VectorCoeff>> {
    let t = TripleInstance {
        f: series_y(&s.product(u, v, w)),
        g: series_y(&s.product(v, u, w)),
        // h(y1, y2) = Y(Y(u,y2)v,y1)w
        h: series_y(&swap(&s.iterate(u, v, w))),
        origin: None,
    };
    let combo = three_term_combination(&t.f, &t.g, &t.h, n)?;
    let (x0, x1, x2) = (var("x0"), var("x1"), var("x2"));
    Ok(combo.terms().map(|(m, c)| ([m.exp(x0), m.exp(x1), m.exp(x2)], c.clone())).collect())
}

pub(crate) fn check_jacobi(s: &impl TripleProducts, n: i64) -> Result<Outcome> {
    let (lo, hi) = jacobi_bounds(s);
    let tables = DeltaTables::new(n, lo, hi)?;
    let mut failure = None;
    for ([u, v, w], names) in s.basis_triples() {
        let t = (&u, &v, &w);
        let direct = jacobi_with(&tables, s, t);
        let checked = jacobi_via_three_term(s, t, n)?;
        if direct != checked {
            return Err(ValgError::Inconsistent(format!(
                "Jacobi routes disagree on ({}) in {}",
                names.join(", "),
                s.name()
            )));
        }
        if failure.is_none() {
            if let Some((e, c)) = direct.into_iter().next() {
                let monomial = Monomial::from_pairs([(var("x0"), e[0]), (var("x1"), e[1]), (var("x2"), e[2])]);
                failure = Some(Witness::Counterexample {
                    at: names,
                    monomial: monomial.to_string(),
                    value: c.to_string(),
                });
            }
        }
    }
    Ok(match failure {
        Some(w) => (Verdict::Fail, Some(w)),
        None => (Verdict::Pass, None),
    })
}
