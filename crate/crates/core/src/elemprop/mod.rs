//! Triples `(f, g, h)` of two-variable series, the statements (A)-(G) about them, and
//! replays of the implications between those statements.
//!
//! Instances store `f`, `g`, `h` in the variables `y1`, `y2`. Every statement is
//! checked after relabelling into `x0`, `x1`, `x2`, on a cube of exponents.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expansion::{Monomial, SignedVar, Var, Window};
use crate::scalars::{Coefficient, Rational, VectorCoeff};
use crate::series::{
    multiply_on, product_requirements, reflect, rename, taylor_substitute, SeriesError, WindowedSeries,
};

pub const DEFAULT_WINDOW: i64 = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElemError {
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

pub type Result<T> = std::result::Result<T, ElemError>;

fn v(name: &str) -> Var {
    Var::named(name)
}

fn y1() -> Var {
    v("y1")
}
fn y2() -> Var {
    v("y2")
}
fn x0() -> Var {
    v("x0")
}
fn x1() -> Var {
    v("x1")
}
fn x2() -> Var {
    v("x2")
}

/// The three rational-form statements. Each names a pair of series that should be two
/// expansions of one rational function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Statement {
    /// `f(x1,x2)` and `g(x2,x1)` over `(x1-x2)^a x1^b x2^c`.
    E,
    /// `f(x0+x2,x2)` and `h(x2,x0)` over `x0^a (x0+x2)^b x2^c`.
    F,
    /// `g(-x0+x1,x1)` and `h(x1-x0,x0)` over `x0^a x1^b (-x0+x1)^c`.
    G,
}

impl Statement {
    pub fn vars(self) -> [Var; 2] {
        match self {
            Statement::E => [x1(), x2()],
            Statement::F => [x0(), x2()],
            Statement::G => [x0(), x1()],
        }
    }

    /// Binomial factor `(head + tail)` for each mode, written left to right.
    fn binomial(self, mode: Mode) -> (SignedVar, SignedVar) {
        let (l, r) = match self {
            Statement::E => (x1().pos(), x2().neg()),
            Statement::F => (x0().pos(), x2().pos()),
            Statement::G => (x0().neg(), x1().pos()),
        };
        match mode {
            Mode::Left => (l, r),
            Mode::Right => (r, l),
        }
    }

    /// Pole witness kind that clears the binomial factor.
    pub fn witness_kind(self) -> WitnessKind {
        match self {
            Statement::E => WitnessKind::M1,
            Statement::F => WitnessKind::M2,
            Statement::G => WitnessKind::M3,
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Which member of a statement's pair an expansion produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// `(x1-x2)`, `(x0+x2)`, `(-x0+x1)`: expanded in nonnegative powers of the right term.
    Left,
    /// `(-x2+x1)`, `(x2+x0)`, `(x1-x0)`.
    Right,
}

/// `numerator / (factors)` for one statement. Exponents follow the statement's
/// denominator: for (E) `a` is on the binomial, for (F) `b`, for (G) `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalForm {
    pub statement: Statement,
    pub numerator: WindowedSeries<VectorCoeff>,
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl RationalForm {
    /// Binomial exponent and the two monomial pole exponents, each with its variable.
    fn poles(&self) -> (u32, [(Var, u32); 2]) {
        match self.statement {
            Statement::E => (self.a, [(x1(), self.b), (x2(), self.c)]),
            Statement::F => (self.b, [(x0(), self.a), (x2(), self.c)]),
            Statement::G => (self.c, [(x0(), self.a), (x1(), self.b)]),
        }
    }
}

impl fmt::Display for RationalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (h, t) = self.statement.binomial(Mode::Left);
        let (e, mono) = self.poles();
        write!(f, "({}) / (({h} + {t})^{e}", self.numerator)?;
        for (v, k) in mono {
            write!(f, " {v}^{k}")?;
        }
        write!(f, ")")
    }
}

/// `numerator * monomial * (head + tail)^exp` on `window`, reading as much of the
/// binomial series as the product needs.
fn rational_series(
    numerator: &WindowedSeries<VectorCoeff>,
    monomial: &Monomial,
    head: SignedVar,
    tail: SignedVar,
    exp: i64,
    window: &Window,
) -> std::result::Result<WindowedSeries<VectorCoeff>, SeriesError> {
    let vars: Vec<Var> = window.vars().to_vec();
    let num = numerator.times_monomial(monomial)?.with_vars(vars.iter().copied());
    let hi = vars.iter().position(|&w| w == head.var).expect("head in window");
    let ti = vars.iter().position(|&w| w == tail.var).expect("tail in window");
    let psup = WindowedSeries::<Rational>::power_support(vars.len(), hi, &[ti], exp);
    let (need, _) = product_requirements(&vars, &psup, num.support(), window)?;
    let power = WindowedSeries::binomial_power(vars.iter().copied(), head, &[tail], exp, &need)?;
    multiply_on(&power, &num, window)
}

/// Exact expansion of a rational form on the square `[-n, n]^2`.
pub fn expand_rational_form(r: &RationalForm, mode: Mode, n: i64) -> Result<WindowedSeries<VectorCoeff>> {
    let window = Window::cube(r.statement.vars(), n);
    let (head, tail) = r.statement.binomial(mode);
    let (e, mono) = r.poles();
    let monomial = Monomial::from_pairs(mono.iter().map(|&(v, k)| (v, -(k as i64))));
    Ok(rational_series(&r.numerator, &monomial, head, tail, -(e as i64), &window)?)
}

type Poly = BTreeMap<Monomial, Rational>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (m, c) in a {
        for (n, d) in b {
            let e = out.entry(m.mul(n)).or_insert_with(Rational::zero);
            *e += &(c * d);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn linear_power(form: &[(Var, i64)], k: i64) -> Poly {
    let lin: Poly = form.iter().map(|&(v, s)| (Monomial::var(v, 1), Rational::from_integer(s))).collect();
    let mut out: Poly = [(Monomial::one(), Rational::one())].into_iter().collect();
    for _ in 0..k {
        out = poly_mul(&out, &lin);
    }
    out
}

/// Substitute linear forms with coefficients into a polynomial.
fn compose(
    p: &WindowedSeries<VectorCoeff>,
    subs: &[(Var, Vec<(Var, i64)>)],
    vars: [Var; 2],
) -> WindowedSeries<VectorCoeff> {
    let mut terms = Vec::new();
    for (m, c) in p.terms() {
        assert!(m.iter().all(|(_, e)| e >= 0), "compose expects a polynomial");
        let mut acc: Poly = [(Monomial::one(), Rational::one())].into_iter().collect();
        for (var, lin) in subs {
            acc = poly_mul(&acc, &linear_power(lin, m.exp(*var)));
        }
        for (mono, r) in acc {
            terms.push((mono, c.scaled(&r)));
        }
    }
    WindowedSeries::polynomial(vars, terms).expect("variables listed")
}

/// The generator's data: `p(y1, y2)` and pole orders.
#[derive(Clone, Debug, PartialEq)]
pub struct Origin {
    pub p: WindowedSeries<VectorCoeff>,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub seed: Option<u64>,
}

impl Origin {
    /// The rational form this origin satisfies for `s`.
    pub fn form(&self, s: Statement) -> RationalForm {
        let numerator = match s {
            Statement::E => compose(&self.p, &[(y1(), vec![(x1(), 1)]), (y2(), vec![(x2(), 1)])], s.vars()),
            Statement::F => {
                compose(&self.p, &[(y1(), vec![(x0(), 1), (x2(), 1)]), (y2(), vec![(x2(), 1)])], s.vars())
            }
            Statement::G => {
                compose(&self.p, &[(y1(), vec![(x1(), 1)]), (y2(), vec![(x1(), 1), (x0(), -1)])], s.vars())
            }
        };
        RationalForm { statement: s, numerator, a: self.a, b: self.b, c: self.c }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TripleInstance {
    pub f: WindowedSeries<VectorCoeff>,
    pub g: WindowedSeries<VectorCoeff>,
    pub h: WindowedSeries<VectorCoeff>,
    pub origin: Option<Origin>,
}

/// Generator settings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub max_degree: u32,
    pub max_pole: u32,
    pub max_terms: usize,
    pub basis: Vec<String>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_degree: 4, max_pole: 3, max_terms: 5, basis: vec!["e1".into(), "e2".into()] }
    }
}

/// Window and witness bound for checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElemConfig {
    pub window: i64,
    pub m_max: u32,
}

impl Default for ElemConfig {
    fn default() -> Self {
        ElemConfig { window: DEFAULT_WINDOW, m_max: GenConfig::default().max_pole + 2 }
    }
}

impl ElemConfig {
    /// Square on which instance series are stored so every check at this config reads
    /// inside known data.
    pub fn reach(&self) -> i64 {
        (3 * self.window).max(self.window + 2 * self.m_max as i64 + 6)
    }
}

impl TripleInstance {
    pub fn zero() -> Self {
        let z = WindowedSeries::zero([y1(), y2()]);
        TripleInstance { f: z.clone(), g: z.clone(), h: z, origin: None }
    }

    /// `f = p(y1,y2)/((y1-y2)^a y1^b y2^c)`, `g = p(y2,y1)/((-y1+y2)^a y2^b y1^c)`,
    /// `h = p(y2+y1,y1)/(y2^a (y1+y2)^b y1^c)`, all on `[-reach, reach]^2`.
    pub fn from_polynomial(p: WindowedSeries<VectorCoeff>, a: u32, b: u32, c: u32, reach: i64) -> Result<Self> {
        let (u, w) = (y1(), y2());
        let window = Window::cube([u, w], reach);
        let inv = |k: u32| -(k as i64);
        let f = rational_series(
            &p,
            &Monomial::from_pairs([(u, inv(b)), (w, inv(c))]),
            u.pos(),
            w.neg(),
            inv(a),
            &window,
        )?;
        let swapped = compose(&p, &[(u, vec![(w, 1)]), (w, vec![(u, 1)])], [u, w]);
        let g = rational_series(
            &swapped,
            &Monomial::from_pairs([(w, inv(b)), (u, inv(c))]),
            u.neg(),
            w.pos(),
            inv(a),
            &window,
        )?;
        let sheared = compose(&p, &[(u, vec![(u, 1), (w, 1)]), (w, vec![(u, 1)])], [u, w]);
        let h = rational_series(
            &sheared,
            &Monomial::from_pairs([(w, inv(a)), (u, inv(c))]),
            u.pos(),
            w.pos(),
            inv(b),
            &window,
        )?;
        Ok(TripleInstance { f, g, h, origin: Some(Origin { p, a, b, c, seed: None }) })
    }

    /// A random instance; the same seed always gives the same instance.
    pub fn generate(seed: u64, gen: &GenConfig, cfg: &ElemConfig) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_numerator(&mut rng, gen);
        let mut pole = || rng.gen_range(0..=gen.max_pole);
        let (a, b, c) = (pole(), pole(), pole());
        let mut t = TripleInstance::from_polynomial(p, a, b, c, cfg.reach())?;
        if let Some(o) = t.origin.as_mut() {
            o.seed = Some(seed);
        }
        Ok(t)
    }

    pub fn seed(&self) -> Option<u64> {
        self.origin.as_ref().and_then(|o| o.seed)
    }
}

/// Nonzero polynomial in `y1, y2` of total degree at most `max_degree`.
pub fn random_numerator(rng: &mut ChaCha8Rng, gen: &GenConfig) -> WindowedSeries<VectorCoeff> {
    loop {
        let nterms = rng.gen_range(1..=gen.max_terms.max(1));
        let mut terms = Vec::new();
        for _ in 0..nterms {
            let i = rng.gen_range(0..=gen.max_degree as i64);
            let j = rng.gen_range(0..=gen.max_degree as i64 - i);
            let coeff = VectorCoeff::from_entries(
                gen.basis.iter().map(|b| (b.as_str(), Rational::from_integer(rng.gen_range(-3..=3)))),
            );
            terms.push((Monomial::from_pairs([(y1(), i), (y2(), j)]), coeff));
        }
        let p = WindowedSeries::polynomial([y1(), y2()], terms).expect("variables listed");
        if !p.is_zero() {
            return p;
        }
    }
}

/// Rename `y1 -> to1`, `y2 -> to2`.
fn relabel(s: &WindowedSeries<VectorCoeff>, to1: Var, to2: Var) -> Result<WindowedSeries<VectorCoeff>> {
    let s = rename(s, y1(), to1)?;
    Ok(rename(&s, y2(), to2)?)
}

/// The two series a statement compares, on the square `[-n, n]^2` in its variables.
pub fn statement_pair(
    t: &TripleInstance,
    s: Statement,
    n: i64,
) -> Result<(WindowedSeries<VectorCoeff>, WindowedSeries<VectorCoeff>)> {
    let w = Window::cube(s.vars(), n);
    let pair = match s {
        Statement::E => {
            let f = relabel(&t.f, x1(), x2())?.restrict(&w)?;
            let g = relabel(&t.g, x2(), x1())?.restrict(&w)?;
            (f, g)
        }
        Statement::F => {
            let f = taylor_substitute(&relabel(&t.f, x0(), x2())?, x0(), x2().pos(), Some(&w))?;
            let h = relabel(&t.h, x2(), x0())?.restrict(&w)?;
            (f, h)
        }
        Statement::G => {
            // g(z + x1, x1) at z = -x0
            let shifted = taylor_substitute(&relabel(&t.g, x0(), x1())?, x0(), x1().pos(), Some(&w))?;
            let g = reflect(&shifted, x0());
            let h = taylor_substitute(&relabel(&t.h, x1(), x0())?, x1(), x0().neg(), Some(&w))?;
            (g, h)
        }
    };
    Ok(pair)
}

/// Whether a rational form re-expands to the statement's pair on `[-n, n]^2`.
pub fn form_matches(t: &TripleInstance, r: &RationalForm, n: i64) -> Result<bool> {
    let (first, second) = statement_pair(t, r.statement, n)?;
    let left = expand_rational_form(r, Mode::Left, n)?;
    let right = expand_rational_form(r, Mode::Right, n)?;
    Ok(left.agrees_with(&first)? && right.agrees_with(&second)?)
}

/// Outcome of a coefficient-wise check on a window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub window: i64,
    /// First nonvanishing coefficient, when the check fails.
    pub counterexample: Option<(Monomial, VectorCoeff)>,
}

impl Verdict {
    fn of(s: &WindowedSeries<VectorCoeff>, window: i64) -> Self {
        let counterexample = s.terms().next().map(|(m, c)| (m, c.clone()));
        Verdict { holds: counterexample.is_none(), window, counterexample }
    }
}

fn delta_times(
    head: SignedVar,
    tail: SignedVar,
    denom: Var,
    s: &WindowedSeries<VectorCoeff>,
    out: &Window,
) -> Result<WindowedSeries<VectorCoeff>> {
    let vars = out.vars().to_vec();
    let s = s.with_vars(vars.iter().copied());
    let idx = |w: Var| vars.iter().position(|&u| u == w).expect("variable in window");
    let dsup = WindowedSeries::<Rational>::delta_support(vars.len(), &[idx(tail.var)], idx(denom), idx(head.var));
    let (need, _) = product_requirements(&vars, &dsup, s.support(), out)?;
    let delta = WindowedSeries::delta(vars.iter().copied(), head, &[tail], denom, &need)?;
    Ok(multiply_on(&delta, &s, out)?)
}

/// The three-term identity
/// `x0^-1 d((x1-x2)/x0) f(x1,x2) - x0^-1 d((-x2+x1)/x0) g(x2,x1) = x1^-1 d((x2+x0)/x1) h(x2,x0)`
/// on `[-n, n]^3`.
pub fn check_a(t: &TripleInstance, n: i64) -> Result<Verdict> {
    Ok(Verdict::of(&three_term_combination(&t.f, &t.g, &t.h, n)?, n))
}

/// Left side minus right side of the three-term identity for `f(x1,x2)`, `g(x2,x1)`,
/// `h(x2,x0)` given in `y1, y2`.
pub fn three_term_combination(
    f: &WindowedSeries<VectorCoeff>,
    g: &WindowedSeries<VectorCoeff>,
    h: &WindowedSeries<VectorCoeff>,
    n: i64,
) -> Result<WindowedSeries<VectorCoeff>> {
    let out = Window::cube([x0(), x1(), x2()], n);
    let t1 = delta_times(x1().pos(), x2().neg(), x0(), &relabel(f, x1(), x2())?, &out)?;
    let t2 = delta_times(x2().neg(), x1().pos(), x0(), &relabel(g, x2(), x1())?, &out)?;
    let t3 = delta_times(x2().pos(), x0().pos(), x1(), &relabel(h, x2(), x0())?, &out)?;
    Ok(t1.sub(&t2)?.sub(&t3)?)
}

/// Which pole-clearing statement a witness is for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WitnessKind {
    /// `(x1-x2)^m (f(x1,x2) - g(x2,x1)) = 0`
    M1,
    /// `(x0+x2)^m (f(x0+x2,x2) - h(x2,x0)) = 0`
    M2,
    /// `(x1-x0)^m (g(-x0+x1,x1) - h(x1-x0,x0)) = 0`
    M3,
}

impl WitnessKind {
    pub fn statement(self) -> Statement {
        match self {
            WitnessKind::M1 => Statement::E,
            WitnessKind::M2 => Statement::F,
            WitnessKind::M3 => Statement::G,
        }
    }

    fn factor(self) -> (SignedVar, SignedVar) {
        match self {
            WitnessKind::M1 => (x1().pos(), x2().neg()),
            WitnessKind::M2 => (x0().pos(), x2().pos()),
            WitnessKind::M3 => (x1().pos(), x0().neg()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleWitness {
    pub kind: WitnessKind,
    pub m: u32,
}

/// `factor^m * s` on `[-n, n]^2`.
fn clear_pole(kind: WitnessKind, m: u32, s: &WindowedSeries<VectorCoeff>, n: i64) -> Result<WindowedSeries<VectorCoeff>> {
    let vars = kind.statement().vars();
    let (head, tail) = kind.factor();
    let power = WindowedSeries::binomial_power(vars, head, &[tail], m as i64, &Window::cube(vars, m as i64))?;
    Ok(multiply_on(&power, s, &Window::cube(vars, n))?)
}

/// Smallest `m <= m_max` for which the pole-cleared difference vanishes on `[-n, n]^2`.
pub fn find_pole_witness(t: &TripleInstance, kind: WitnessKind, m_max: u32, n: i64) -> Result<Option<PoleWitness>> {
    let (first, second) = statement_pair(t, kind.statement(), n + m_max as i64)?;
    let diff = first.sub(&second)?;
    for m in 0..=m_max {
        if clear_pole(kind, m, &diff, n)?.is_empty() {
            return Ok(Some(PoleWitness { kind, m }));
        }
    }
    Ok(None)
}

/// Build the rational form of `witness.kind.statement()` from a pole witness: clear the
/// binomial pole of the first series, then the monomial poles. When `normalize` is given
/// the exponents are raised to those values where possible.
pub fn reconstruct(
    t: &TripleInstance,
    witness: PoleWitness,
    cfg: &ElemConfig,
    normalize: Option<(u32, u32, u32)>,
) -> Result<RationalForm> {
    let s = witness.kind.statement();
    let span = cfg.window + cfg.m_max as i64;
    let (first, _) = statement_pair(t, s, span + cfg.m_max as i64)?;
    let cleared = clear_pole(witness.kind, witness.m, &first, span)?;
    let [u, w] = s.vars();
    let low = |var: Var| cleared.terms().map(|(m, _)| -m.exp(var)).max().unwrap_or(0).max(0) as u32;
    let (mut bin, mut pu, mut pw) = (witness.m, low(u), low(w));
    let mut extra_bin = 0;
    if let Some((a, b, c)) = normalize {
        let (tb, tu, tw) = match s {
            Statement::E => (a, b, c),
            Statement::F => (b, a, c),
            Statement::G => (c, a, b),
        };
        extra_bin = tb.saturating_sub(bin);
        bin = bin.max(tb);
        pu = pu.max(tu);
        pw = pw.max(tw);
    }
    let mut numerator = WindowedSeries::polynomial(
        [u, w],
        cleared.terms().map(|(m, c)| (m.mul(&Monomial::from_pairs([(u, pu as i64), (w, pw as i64)])), c.clone())),
    )?;
    if extra_bin > 0 {
        let (head, tail) = witness.kind.factor();
        let power = WindowedSeries::binomial_power([u, w], head, &[tail], extra_bin as i64, &Window::cube([u, w], extra_bin as i64))?;
        numerator = crate::series::multiply(&power, &numerator)?;
    }
    if numerator.terms().any(|(m, _)| m.iter().any(|(_, e)| e < 0)) {
        return Err(ElemError::Series(SeriesError::Malformed(format!(
            "cleared series for ({s}) is not a polynomial after removing monomial poles"
        ))));
    }
    let (a, b, c) = match s {
        Statement::E => (bin, pu, pw),
        Statement::F => (pu, bin, pw),
        Statement::G => (pu, pw, bin),
    };
    Ok(RationalForm { statement: s, numerator, a, b, c })
}

/// The implications between the statements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Implication {
    Ia,
    Ib,
    Ic,
    IIa,
    IIb,
    IIc,
    IIIa,
    IIIb,
    IIIc,
}

impl Implication {
    pub const ALL: [Implication; 9] = [
        Implication::Ia,
        Implication::Ib,
        Implication::Ic,
        Implication::IIa,
        Implication::IIb,
        Implication::IIc,
        Implication::IIIa,
        Implication::IIIb,
        Implication::IIIc,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Implication::Ia => "ia",
            Implication::Ib => "ib",
            Implication::Ic => "ic",
            Implication::IIa => "iia",
            Implication::IIb => "iib",
            Implication::IIc => "iic",
            Implication::IIIa => "iiia",
            Implication::IIIb => "iiib",
            Implication::IIIc => "iiic",
        }
    }

    /// Short statement of the implication.
    pub fn anchor(self) -> &'static str {
        match self {
            Implication::Ia => "(A) => (B): (x1-x2)^m1 (f(x1,x2) - g(x2,x1)) = 0",
            Implication::Ib => "(A) => (C): (x0+x2)^m2 (f(x0+x2,x2) - h(x2,x0)) = 0",
            Implication::Ic => "(A) => (D): (x1-x0)^m3 (g(-x0+x1,x1) - h(x1-x0,x0)) = 0",
            Implication::IIa => "(B) => (E): f = p1/((x1-x2)^a1 x1^b1 x2^c1)",
            Implication::IIb => "(C) => (F): f(x0+x2,x2) = p2/(x0^a2 (x0+x2)^b2 x2^c2)",
            Implication::IIc => "(D) => (G): g(-x0+x1,x1) = p3/(x0^a3 x1^b3 (-x0+x1)^c3)",
            Implication::IIIa => "(E) and (F) => (A)",
            Implication::IIIb => "(E) and (G) => (A)",
            Implication::IIIc => "(F) and (G) => (A)",
        }
    }

    fn witness_kind(self) -> Option<WitnessKind> {
        match self {
            Implication::Ia | Implication::IIa => Some(WitnessKind::M1),
            Implication::Ib | Implication::IIb => Some(WitnessKind::M2),
            Implication::Ic | Implication::IIc => Some(WitnessKind::M3),
            _ => None,
        }
    }

    fn premises(self) -> Option<[Statement; 2]> {
        match self {
            Implication::IIIa => Some([Statement::E, Statement::F]),
            Implication::IIIb => Some([Statement::E, Statement::G]),
            Implication::IIIc => Some([Statement::F, Statement::G]),
            _ => None,
        }
    }
}

impl std::str::FromStr for Implication {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Implication::ALL.into_iter().find(|i| i.id() == s).ok_or_else(|| format!("unknown implication {s}"))
    }
}

/// Result of replaying one implication whose hypothesis held.
#[derive(Clone, Debug, PartialEq)]
pub struct Replay {
    pub which: Implication,
    pub conclusion_holds: bool,
    pub witness: Option<PoleWitness>,
    pub form: Option<RationalForm>,
    pub verdict: Option<Verdict>,
}

fn origin_poles(t: &TripleInstance) -> Option<(u32, u32, u32)> {
    t.origin.as_ref().map(|o| (o.a, o.b, o.c))
}

/// Rational form for `s`: the generator's when the instance has one, otherwise rebuilt
/// from a pole witness.
fn premise_form(t: &TripleInstance, s: Statement, cfg: &ElemConfig) -> Result<RationalForm> {
    if let Some(o) = &t.origin {
        return Ok(o.form(s));
    }
    let w = find_pole_witness(t, s.witness_kind(), cfg.m_max, cfg.window)?
        .ok_or_else(|| ElemError::HypothesisNotMet(format!("no rational form for ({s})")))?;
    reconstruct(t, w, cfg, None)
}

/// Check the hypothesis of `which` on `t`, then its conclusion.
pub fn replay_implication(which: Implication, t: &TripleInstance, cfg: &ElemConfig) -> Result<Replay> {
    let n = cfg.window;
    let mut out = Replay { which, conclusion_holds: false, witness: None, form: None, verdict: None };
    match which {
        Implication::Ia | Implication::Ib | Implication::Ic => {
            let a = check_a(t, n)?;
            if !a.holds {
                return Err(ElemError::HypothesisNotMet(format!("(A) fails at {:?}", a.counterexample)));
            }
            let kind = which.witness_kind().expect("first group");
            out.witness = find_pole_witness(t, kind, cfg.m_max, n)?;
            out.conclusion_holds = out.witness.is_some();
            out.verdict = Some(a);
        }
        Implication::IIa | Implication::IIb | Implication::IIc => {
            let kind = which.witness_kind().expect("second group");
            let w = find_pole_witness(t, kind, cfg.m_max, n)?.ok_or_else(|| {
                ElemError::HypothesisNotMet(format!("no {kind:?} witness up to {}", cfg.m_max))
            })?;
            out.witness = Some(w);
            match reconstruct(t, w, cfg, origin_poles(t)) {
                Ok(form) => {
                    out.conclusion_holds = form_matches(t, &form, n)?;
                    out.form = Some(form);
                }
                Err(ElemError::Series(SeriesError::Malformed(_))) => out.conclusion_holds = false,
                Err(e) => return Err(e),
            }
        }
        Implication::IIIa | Implication::IIIb | Implication::IIIc => {
            for s in which.premises().expect("third group") {
                let form = premise_form(t, s, cfg)?;
                if !form_matches(t, &form, n)? {
                    return Err(ElemError::HypothesisNotMet(format!("({s}) does not re-expand to the instance")));
                }
            }
            let a = check_a(t, n)?;
            out.conclusion_holds = a.holds;
            out.verdict = Some(a);
        }
    }
    Ok(out)
}

/// Everything the chain `(E)&(F) => (A) => (B),(C),(D) => (E),(F),(G)` produces for one
/// generated instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainReport {
    pub seed: Option<u64>,
    pub poles: (u32, u32, u32),
    pub premises_hold: bool,
    pub a_holds: bool,
    pub witnesses: Vec<(WitnessKind, Option<u32>)>,
    /// Per statement: the rebuilt form re-expands to the instance, and its numerator
    /// equals the generator's.
    pub reconstructions: Vec<(Statement, bool, bool)>,
}

impl ChainReport {
    pub fn closes(&self, m_bound: u32) -> bool {
        self.premises_hold
            && self.a_holds
            && self.witnesses.iter().all(|(_, m)| m.map_or(false, |m| m <= m_bound))
            && self.reconstructions.iter().all(|&(_, ok, _)| ok)
    }
}

/// Run the whole chain on an instance carrying its generator data.
pub fn replay_chain(t: &TripleInstance, cfg: &ElemConfig) -> Result<ChainReport> {
    let o = t.origin.as_ref().ok_or_else(|| ElemError::HypothesisNotMet("instance has no generator data".into()))?;
    let n = cfg.window;
    let premises_hold = form_matches(t, &o.form(Statement::E), n)? && form_matches(t, &o.form(Statement::F), n)?;
    let a_holds = check_a(t, n)?.holds;
    let mut witnesses = Vec::new();
    let mut reconstructions = Vec::new();
    for kind in [WitnessKind::M1, WitnessKind::M2, WitnessKind::M3] {
        let w = find_pole_witness(t, kind, cfg.m_max, n)?;
        witnesses.push((kind, w.map(|w| w.m)));
        let s = kind.statement();
        let (ok, same) = match w {
            Some(w) => match reconstruct(t, w, cfg, Some((o.a, o.b, o.c))) {
                Ok(form) => (form_matches(t, &form, n)?, form.numerator.to_map() == o.form(s).numerator.to_map()),
                Err(ElemError::Series(SeriesError::Malformed(_))) => (false, false),
                Err(e) => return Err(e),
            },
            None => (false, false),
        };
        reconstructions.push((s, ok, same));
    }
    Ok(ChainReport { seed: o.seed, poles: (o.a, o.b, o.c), premises_hold, a_holds, witnesses, reconstructions })
}
