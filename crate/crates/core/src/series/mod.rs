//! Laurent series in several variables, stored exactly on a box of exponents.
//!
//! A series carries its stored coefficients, the box (`window`) on which those are the
//! true coefficients, and a certified `Support` bounding where any nonzero coefficient
//! can be. Operations never guess: a coefficient that depends on data outside a window
//! is an error, and a product whose convolutions cannot be shown finite is refused.

mod support;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use support::{tighten, Interval, Support, VarShape};

use crate::expansion::{Monomial, SignedVar, Var, Window};
use crate::scalars::{binom, BasisId, Coefficient, Rational, VectorCoeff};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("summability unknown: {0}")]
    SummabilityUnknown(String),
    #[error("window underflow: {0}")]
    WindowUnderflow(String),
    #[error("endomorphism is not nilpotent; exponential would be an infinite series")]
    NotNilpotent,
    #[error("malformed series operation: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, SeriesError>;

/// Exponent vector aligned with the series' variable list.
pub type Exps = Vec<i64>;

#[derive(Clone, PartialEq)]
pub struct WindowedSeries<C: Coefficient = VectorCoeff> {
    vars: Vec<Var>,
    coeffs: BTreeMap<Exps, C>,
    window: Vec<(i64, i64)>,
    support: Support,
}

fn sorted_vars(vars: impl IntoIterator<Item = Var>) -> Vec<Var> {
    let mut v: Vec<Var> = vars.into_iter().collect();
    v.sort();
    v.dedup();
    v
}

fn box_points(window: &[(i64, i64)]) -> Vec<Exps> {
    let mut out = Vec::new();
    if window.iter().any(|(l, h)| h < l) {
        return out;
    }
    let mut cur: Exps = window.iter().map(|w| w.0).collect();
    loop {
        out.push(cur.clone());
        let mut i = window.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < window[i].1 {
                cur[i] += 1;
                break;
            }
            cur[i] = window[i].0;
        }
    }
}

/// Coefficient of `head^(n-K) * prod tail_i^(k_i)` in `(head + tail...)^n` expanded in
/// nonnegative powers of every tail entry.
fn power_coeff(n: i64, head: SignedVar, head_exp: i64, tail: &[(SignedVar, i64)]) -> Rational {
    let mut c = Rational::one();
    let mut rest = n;
    for &(s, k) in tail {
        if k < 0 {
            return Rational::zero();
        }
        c = c * binom(rest, k).expect("nonnegative lower index");
        if s.negative {
            c = c * Rational::sign_power(k);
        }
        rest -= k;
    }
    debug_assert_eq!(rest, head_exp);
    if head.negative {
        c = c * Rational::sign_power(head_exp);
    }
    c
}

impl<C: Coefficient> WindowedSeries<C> {
    /// The zero series.
    pub fn zero(vars: impl IntoIterator<Item = Var>) -> Self {
        let vars = sorted_vars(vars);
        let n = vars.len();
        WindowedSeries { vars, coeffs: BTreeMap::new(), window: vec![(0, 0); n], support: Support::empty(n) }
    }

    /// A Laurent polynomial; window and support are the bounding box of its terms.
    pub fn polynomial(
        vars: impl IntoIterator<Item = Var>,
        terms: impl IntoIterator<Item = (Monomial, C)>,
    ) -> Result<Self> {
        let vars = sorted_vars(vars);
        let mut coeffs: BTreeMap<Exps, C> = BTreeMap::new();
        for (m, c) in terms {
            if let Some(v) = m.vars().find(|v| !vars.contains(v)) {
                return Err(SeriesError::Malformed(format!("monomial uses {v} outside {vars:?}")));
            }
            let e: Exps = vars.iter().map(|&v| m.exp(v)).collect();
            coeffs.entry(e).or_insert_with(C::zero).add_assign_ref(&c);
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(Self::finite_from(vars, coeffs))
    }

    fn finite_from(vars: Vec<Var>, coeffs: BTreeMap<Exps, C>) -> Self {
        let n = vars.len();
        if coeffs.is_empty() {
            return WindowedSeries { vars, coeffs, window: vec![(0, 0); n], support: Support::empty(n) };
        }
        let mut window = vec![(i64::MAX, i64::MIN); n];
        let mut deg = (i64::MAX, i64::MIN);
        for e in coeffs.keys() {
            for (w, &x) in window.iter_mut().zip(e) {
                w.0 = w.0.min(x);
                w.1 = w.1.max(x);
            }
            let d: i64 = e.iter().sum();
            deg = (deg.0.min(d), deg.1.max(d));
        }
        let support = Support {
            vars: window.iter().map(|&(l, h)| Interval::new(l, h)).collect(),
            degree: Interval::new(deg.0, deg.1),
        };
        WindowedSeries { vars, coeffs, window, support }
    }

    /// Tabulate `f` on every point of `window` inside `support`. The caller vouches
    /// that `f` is the series and `support` bounds it.
    pub fn from_fn(
        vars: impl IntoIterator<Item = Var>,
        window: &Window,
        support: Support,
        f: impl Fn(&[i64]) -> C,
    ) -> Result<Self> {
        let vars = sorted_vars(vars);
        if support.vars.len() != vars.len() {
            return Err(SeriesError::Malformed("support does not match variables".into()));
        }
        let window = Self::window_ranges(&vars, window)?;
        let support = support.tightened();
        let clipped: Vec<(i64, i64)> = window
            .iter()
            .zip(&support.vars)
            .map(|(&(l, h), iv)| (iv.lo.map_or(l, |x| x.max(l)), iv.hi.map_or(h, |x| x.min(h))))
            .collect();
        let mut coeffs = BTreeMap::new();
        if !support.is_empty() {
            for e in box_points(&clipped) {
                if support.contains(&e) {
                    let c = f(&e);
                    if !c.is_zero() {
                        coeffs.insert(e, c);
                    }
                }
            }
        }
        Ok(WindowedSeries { vars, coeffs, window, support })
    }

    fn window_ranges(vars: &[Var], window: &Window) -> Result<Vec<(i64, i64)>> {
        vars.iter()
            .map(|&v| {
                window
                    .range(v)
                    .ok_or_else(|| SeriesError::Malformed(format!("window has no range for {v}")))
            })
            .collect()
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn window(&self) -> Window {
        Window::new(self.vars.iter().zip(&self.window).map(|(&v, &(l, h))| (v, l, h)))
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn shape(&self) -> BTreeMap<Var, VarShape> {
        let t = self.support.tightened();
        self.vars.iter().zip(&t.vars).map(|(&v, iv)| (v, VarShape::of(iv))).collect()
    }

    /// Whether every nonzero coefficient lies inside the window in variable `v`.
    pub fn exact(&self, v: Var) -> bool {
        let t = self.support.tightened();
        match self.vars.iter().position(|&w| w == v) {
            Some(i) => t.vars[i].within(self.window[i].0, self.window[i].1),
            None => true,
        }
    }

    /// Whether the stored data is the whole series.
    pub fn is_exact(&self) -> bool {
        self.vars.iter().all(|&v| self.exact(v))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.is_exact()
    }

    /// Stored nonzero coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &C)> + '_ {
        self.coeffs.iter().map(move |(e, c)| (self.monomial(e), c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    /// Nothing stored on the window. Unlike `is_zero`, says nothing outside it.
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn monomial(&self, e: &[i64]) -> Monomial {
        Monomial::from_pairs(self.vars.iter().copied().zip(e.iter().copied()))
    }

    fn exps_of(&self, m: &Monomial) -> Result<Exps> {
        if let Some(v) = m.vars().find(|v| !self.vars.contains(v)) {
            return Err(SeriesError::Malformed(format!("{v} is not a variable of this series")));
        }
        Ok(self.vars.iter().map(|&v| m.exp(v)).collect())
    }

    fn in_window(&self, e: &[i64]) -> bool {
        e.iter().zip(&self.window).all(|(&x, &(l, h))| l <= x && x <= h)
    }

    fn lookup(&self, e: &[i64]) -> Result<Option<&C>> {
        if !self.support.contains(e) {
            return Ok(None);
        }
        if !self.in_window(e) {
            return Err(SeriesError::WindowUnderflow(format!(
                "exponent {} lies outside the window {}",
                self.monomial(e),
                self.window_text()
            )));
        }
        Ok(self.coeffs.get(e))
    }

    fn window_text(&self) -> String {
        let parts: Vec<String> =
            self.vars.iter().zip(&self.window).map(|(v, (l, h))| format!("{v}:[{l},{h}]")).collect();
        parts.join(" ")
    }

    /// Exact coefficient of `m`.
    pub fn coeff(&self, m: &Monomial) -> Result<C> {
        let e = self.exps_of(m)?;
        Ok(self.lookup(&e)?.cloned().unwrap_or_else(C::zero))
    }

    /// The same series over a larger variable set; new variables appear to the power 0.
    pub fn with_vars(&self, vars: impl IntoIterator<Item = Var>) -> Self {
        let all = sorted_vars(self.vars.iter().copied().chain(vars));
        if all == self.vars {
            return self.clone();
        }
        let idx: Vec<Option<usize>> = all.iter().map(|v| self.vars.iter().position(|w| w == v)).collect();
        let spread = |e: &[i64]| -> Exps { idx.iter().map(|i| i.map_or(0, |i| e[i])).collect() };
        WindowedSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (spread(e), c.clone())).collect(),
            window: idx.iter().map(|i| i.map_or((0, 0), |i| self.window[i])).collect(),
            support: Support {
                vars: idx
                    .iter()
                    .map(|i| i.map_or(Interval::point(0), |i| self.support.vars[i]))
                    .collect(),
                degree: self.support.degree,
            },
            vars: all,
        }
    }

    /// Restrict stored data to a smaller window.
    pub fn restrict(&self, window: &Window) -> Result<Self> {
        let w = Self::window_ranges(&self.vars, window)?;
        let t = self.support.tightened();
        for (i, (&(l, h), &(sl, sh))) in w.iter().zip(&self.window).enumerate() {
            if !t.vars[i].intersect(&Interval::new(l, h)).within(sl, sh) {
                return Err(SeriesError::WindowUnderflow(format!(
                    "requested {v}:[{l},{h}] but only {v}:[{sl},{sh}] is known",
                    v = self.vars[i]
                )));
            }
        }
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(e, _)| e.iter().zip(&w).all(|(&x, &(l, h))| l <= x && x <= h))
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        Ok(WindowedSeries { vars: self.vars.clone(), coeffs, window: w, support: self.support.clone() })
    }

    /// Difference of two series; the window is the intersection of the two windows.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, &Rational::from_integer(-1))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, &Rational::one())
    }

    fn add_scaled(&self, other: &Self, by: &Rational) -> Result<Self> {
        let a = self.with_vars(other.vars.iter().copied());
        let b = other.with_vars(self.vars.iter().copied());
        let support = Support {
            vars: a.support.vars.iter().zip(&b.support.vars).map(|(x, y)| x.hull(y)).collect(),
            degree: a.support.degree.hull(&b.support.degree),
        };
        // an edge may move outward past a series that is known to vanish beyond it
        let ta = a.support.tightened();
        let tb = b.support.tightened();
        let window: Vec<(i64, i64)> = (0..a.vars.len())
            .map(|i| {
                let ends = |s: &Self, t: &Support| {
                    let (l, h) = s.window[i];
                    let exact_lo = t.vars[i].is_empty() || t.vars[i].lo.map_or(false, |x| x >= l);
                    let exact_hi = t.vars[i].is_empty() || t.vars[i].hi.map_or(false, |x| x <= h);
                    (l, h, exact_lo, exact_hi)
                };
                let (al, ah, ael, aeh) = ends(&a, &ta);
                let (bl, bh, bel, beh) = ends(&b, &tb);
                let lo = match (ael, bel) {
                    (true, true) => al.min(bl),
                    (true, false) => bl,
                    (false, true) => al,
                    (false, false) => al.max(bl),
                };
                let hi = match (aeh, beh) {
                    (true, true) => ah.max(bh),
                    (true, false) => bh,
                    (false, true) => ah,
                    (false, false) => ah.min(bh),
                };
                (lo, hi)
            })
            .collect();
        let in_w = |e: &Exps| e.iter().zip(&window).all(|(&x, &(l, h))| l <= x && x <= h);
        let mut coeffs: BTreeMap<Exps, C> =
            a.coeffs.iter().filter(|(e, _)| in_w(e)).map(|(e, c)| (e.clone(), c.clone())).collect();
        for (e, c) in b.coeffs.iter().filter(|(e, _)| in_w(e)) {
            coeffs.entry(e.clone()).or_insert_with(C::zero).add_scaled(c, by);
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(WindowedSeries { vars: a.vars, coeffs, window, support })
    }

    pub fn scaled(&self, by: &Rational) -> Self {
        let mut out = self.clone();
        out.coeffs = self.coeffs.iter().map(|(e, c)| (e.clone(), c.scaled(by))).collect();
        out.coeffs.retain(|_, c| !c.is_zero());
        out
    }

    /// Multiply by a scalar Laurent polynomial on the right of the coefficient.
    pub fn times_monomial(&self, m: &Monomial) -> Result<Self> {
        let s = self.with_vars(m.vars());
        let d = s.exps_of(m)?;
        let total: i64 = d.iter().sum();
        Ok(WindowedSeries {
            coeffs: s
                .coeffs
                .iter()
                .map(|(e, c)| (e.iter().zip(&d).map(|(x, y)| x + y).collect(), c.clone()))
                .collect(),
            window: s.window.iter().zip(&d).map(|(&(l, h), y)| (l + y, h + y)).collect(),
            support: Support {
                vars: s.support.vars.iter().zip(&d).map(|(iv, y)| iv.shift(*y)).collect(),
                degree: s.support.degree.shift(total),
            },
            vars: s.vars,
        })
    }

    /// Whether two series agree on the intersection of their windows, that intersection
    /// being nonempty. Coefficients outside a series' support count as zero.
    pub fn agrees_with(&self, other: &Self) -> Result<bool> {
        let d = self.sub(other)?;
        if d.window.iter().any(|(l, h)| h < l) {
            return Err(SeriesError::WindowUnderflow("windows do not overlap".into()));
        }
        Ok(d.coeffs.is_empty())
    }

    /// Stored coefficient map keyed by monomial.
    pub fn to_map(&self) -> BTreeMap<Monomial, C> {
        self.coeffs.iter().map(|(e, c)| (self.monomial(e), c.clone())).collect()
    }
}

impl WindowedSeries<Rational> {
    /// `(head + tail...)^n` expanded in nonnegative powers of every tail entry, on `window`.
    pub fn binomial_power(
        vars: impl IntoIterator<Item = Var>,
        head: SignedVar,
        tail: &[SignedVar],
        n: i64,
        window: &Window,
    ) -> Result<Self> {
        let vars = sorted_vars(vars);
        let (hi, ti) = Self::atom_indices(&vars, head, tail, None)?;
        let support = Self::power_support(vars.len(), hi, &ti, n);
        Self::from_fn(vars, window, support, |e| {
            let t: Vec<(SignedVar, i64)> = tail.iter().zip(&ti).map(|(&s, &i)| (s, e[i])).collect();
            power_coeff(n, head, e[hi], &t)
        })
    }

    /// `denom^-1 delta((head + tail...)/denom)`, on `window`.
    pub fn delta(
        vars: impl IntoIterator<Item = Var>,
        head: SignedVar,
        tail: &[SignedVar],
        denom: Var,
        window: &Window,
    ) -> Result<Self> {
        let vars = sorted_vars(vars);
        let (hi, ti) = Self::atom_indices(&vars, head, tail, Some(denom))?;
        let di = vars.iter().position(|&v| v == denom).expect("checked");
        let support = Self::delta_support(vars.len(), &ti, di, hi);
        Self::from_fn(vars, window, support, |e| {
            let n = -e[di] - 1;
            let t: Vec<(SignedVar, i64)> = tail.iter().zip(&ti).map(|(&s, &i)| (s, e[i])).collect();
            power_coeff(n, head, e[hi], &t)
        })
    }

    fn atom_indices(
        vars: &[Var],
        head: SignedVar,
        tail: &[SignedVar],
        denom: Option<Var>,
    ) -> Result<(usize, Vec<usize>)> {
        let mut used: Vec<Var> = std::iter::once(head.var).chain(tail.iter().map(|s| s.var)).collect();
        used.extend(denom);
        let mut dedup = used.clone();
        dedup.sort();
        dedup.dedup();
        if dedup.len() != used.len() {
            return Err(SeriesError::Malformed("head, tail and denominator must be distinct variables".into()));
        }
        let pos = |v: Var| {
            vars.iter()
                .position(|&w| w == v)
                .ok_or_else(|| SeriesError::Malformed(format!("{v} is not among the series variables")))
        };
        let hi = pos(head.var)?;
        let ti = tail.iter().map(|s| pos(s.var)).collect::<Result<Vec<_>>>()?;
        if let Some(d) = denom {
            pos(d)?;
        }
        Ok((hi, ti))
    }

    /// Support of `(head + tail...)^n` over `nvars` variables.
    pub fn power_support(nvars: usize, head: usize, tail: &[usize], n: i64) -> Support {
        let mut vars = vec![Interval::point(0); nvars];
        vars[head] = if n >= 0 { Interval::new(0, n) } else { Interval::at_most(n) };
        for &t in tail {
            vars[t] = if n >= 0 { Interval::new(0, n) } else { Interval::at_least(0) };
        }
        Support { vars, degree: Interval::point(n) }
    }

    /// Support of `denom^-1 delta((head + tail...)/denom)` over `nvars` variables.
    pub fn delta_support(nvars: usize, tail: &[usize], denom: usize, head: usize) -> Support {
        let mut vars = vec![Interval::point(0); nvars];
        vars[head] = Interval::FULL;
        vars[denom] = Interval::FULL;
        for &t in tail {
            vars[t] = Interval::at_least(0);
        }
        Support { vars, degree: Interval::point(-1) }
    }

    /// Turn scalar coefficients into multiples of a fixed vector.
    pub fn times_vector(&self, v: &VectorCoeff) -> WindowedSeries<VectorCoeff> {
        let mut coeffs: BTreeMap<Exps, VectorCoeff> = BTreeMap::new();
        if !v.is_zero() {
            for (e, c) in &self.coeffs {
                coeffs.insert(e.clone(), v.scaled(c));
            }
        }
        WindowedSeries { vars: self.vars.clone(), coeffs, window: self.window.clone(), support: self.support.clone() }
    }
}

mod ops;
pub use ops::{
    derivative, exp_endo, multiply, multiply_on, product_requirements, reflect, rename, residue,
    taylor_substitute,
};

/// Scalar-times-coefficient products used by [`multiply`].
pub trait ScalarAction<C: Coefficient>: Coefficient {
    fn act(&self, c: &C) -> C;
}

impl<C: Coefficient> ScalarAction<C> for Rational {
    fn act(&self, c: &C) -> C {
        c.scaled(self)
    }
}

impl<C: Coefficient> fmt::Display for WindowedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            f.write_str("0")?;
        }
        for (i, (e, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})*{}", self.monomial(e))?;
        }
        if !self.is_exact() {
            write!(f, " on {}", self.window_text())?;
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for WindowedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord<C> {
    monomial: Monomial,
    coeff: C,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "C: Coefficient")]
struct SeriesRecord<C: Coefficient> {
    terms: Vec<TermRecord<C>>,
    window: BTreeMap<Var, (i64, i64)>,
    shape: BTreeMap<Var, VarShape>,
    support: BTreeMap<Var, Interval>,
    degree: Interval,
}

impl<C: Coefficient> Serialize for WindowedSeries<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRecord {
            terms: self.terms().map(|(monomial, c)| TermRecord { monomial, coeff: c.clone() }).collect(),
            window: self.vars.iter().copied().zip(self.window.iter().copied()).collect(),
            shape: self.shape(),
            support: self.vars.iter().copied().zip(self.support.vars.iter().copied()).collect(),
            degree: self.support.degree,
        }
        .serialize(s)
    }
}

impl<'de, C: Coefficient> Deserialize<'de> for WindowedSeries<C> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let r = SeriesRecord::<C>::deserialize(d)?;
        let vars: Vec<Var> = r.window.keys().copied().collect();
        if r.support.keys().copied().collect::<Vec<_>>() != vars {
            return Err(D::Error::custom("support and window name different variables"));
        }
        let window: Vec<(i64, i64)> = r.window.values().copied().collect();
        let support = Support { vars: r.support.values().copied().collect(), degree: r.degree };
        let mut coeffs = BTreeMap::new();
        for t in r.terms {
            if let Some(v) = t.monomial.vars().find(|v| !vars.contains(v)) {
                return Err(D::Error::custom(format!("term uses unknown variable {v}")));
            }
            let e: Exps = vars.iter().map(|&v| t.monomial.exp(v)).collect();
            let inside = e.iter().zip(&window).all(|(&x, &(l, h))| l <= x && x <= h);
            if !inside || !support.contains(&e) {
                return Err(D::Error::custom(format!("term {} lies outside window or support", t.monomial)));
            }
            if !t.coeff.is_zero() {
                coeffs.insert(e, t.coeff);
            }
        }
        Ok(WindowedSeries { vars, coeffs, window, support })
    }
}

/// Basis-indexed helper: `e^{xD} v` needs vectors as coordinate columns.
fn coords(basis: &[BasisId], v: &VectorCoeff) -> Result<Vec<Rational>> {
    if let Some((b, _)) = v.entries().find(|(b, _)| !basis.contains(b)) {
        return Err(SeriesError::Malformed(format!("{b} is not in the basis")));
    }
    Ok(basis.iter().map(|b| v.get(b)).collect())
}

fn from_coords(basis: &[BasisId], xs: &[Rational]) -> VectorCoeff {
    VectorCoeff::from_entries(basis.iter().cloned().zip(xs.iter().cloned()))
}
