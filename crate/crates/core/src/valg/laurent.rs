//! Finite Laurent polynomials in one or two variables with vector coefficients.

use std::collections::BTreeMap;

use crate::scalars::{binom_int, factorial, Coefficient, Matrix, Rational, VectorCoeff};

pub type Poly1 = BTreeMap<i64, VectorCoeff>;
pub type Poly2 = BTreeMap<(i64, i64), VectorCoeff>;

pub(crate) fn add1(p: &mut Poly1, k: i64, c: &VectorCoeff, by: &Rational) {
    if c.is_zero() || by.is_zero() {
        return;
    }
    let slot = p.entry(k).or_default();
    slot.add_scaled(c, by);
    if slot.is_zero() {
        p.remove(&k);
    }
}

pub(crate) fn add2(p: &mut Poly2, k: (i64, i64), c: &VectorCoeff, by: &Rational) {
    if c.is_zero() || by.is_zero() {
        return;
    }
    let slot = p.entry(k).or_default();
    slot.add_scaled(c, by);
    if slot.is_zero() {
        p.remove(&k);
    }
}

pub(crate) fn diff1(a: &Poly1, b: &Poly1) -> Poly1 {
    let mut out = a.clone();
    let m1 = Rational::from_integer(-1);
    for (&k, c) in b {
        add1(&mut out, k, c, &m1);
    }
    out
}

pub(crate) fn diff2(a: &Poly2, b: &Poly2) -> Poly2 {
    let mut out = a.clone();
    let m1 = Rational::from_integer(-1);
    for (&k, c) in b {
        add2(&mut out, k, c, &m1);
    }
    out
}

pub(crate) fn swap(p: &Poly2) -> Poly2 {
    p.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect()
}

pub(crate) fn pole1(p: &Poly1) -> u32 {
    let low = p.keys().next().copied().unwrap_or(0);
    (-low).max(0) as u32
}

/// Multiply every term by `X^(shift.0) Y^(shift.1)`.
pub(crate) fn shifted(p: &Poly2, shift: (i64, i64)) -> Poly2 {
    p.iter().map(|(&(i, j), c)| ((i + shift.0, j + shift.1), c.clone())).collect()
}

/// `(s0 X + s1 Y)^m p` for `m >= 0` and signs `s0, s1`.
pub(crate) fn times_binomial(p: &Poly2, signs: (i64, i64), m: u32) -> Poly2 {
    let mut out = Poly2::new();
    let m = m as i64;
    for j in 0..=m {
        let c = Rational::from_bigint(binom_int(m, j as u64))
            * Rational::sign_power(if signs.0 < 0 { m - j } else { 0 })
            * Rational::sign_power(if signs.1 < 0 { j } else { 0 });
        for (&(a, b), v) in p {
            add2(&mut out, (a + m - j, b + j), v, &c);
        }
    }
    out
}

/// `x -> sign * x` in one variable.
pub(crate) fn reflect_axis(p: &Poly2, axis: usize) -> Poly2 {
    p.iter()
        .map(|(&(i, j), c)| {
            let e = if axis == 0 { i } else { j };
            let c = if e % 2 != 0 { c.negated() } else { c.clone() };
            ((i, j), c)
        })
        .collect()
}

/// Substitution of one variable by a signed binomial.
///
/// The input has variables `(a, z)` with `z` at index `z`; `z^k` becomes
/// `(head + tail)^k` expanded in nonnegative powers of `tail`. `a` goes to output
/// slot `keep`. Output slots are indices 0 and 1.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Shift {
    pub z: usize,
    pub keep: usize,
    pub head: (usize, i64),
    pub tail: (usize, i64),
}

/// Result of a substitution: the terms, and whether the expansion terminated. When it
/// did not, the coefficients are exact for tail exponents up to `exact_to`.
pub(crate) struct Substituted {
    pub poly: Poly2,
    pub finite: bool,
    pub exact_to: i64,
}

pub(crate) fn substitute(p: &Poly2, s: Shift, tail_cap: i64) -> Substituted {
    let mut out = Poly2::new();
    let mut finite = true;
    let mut exact_to = i64::MAX;
    for (&(i, j), c) in p {
        let (a, k) = if s.z == 0 { (j, i) } else { (i, j) };
        let top = if k >= 0 { k } else { tail_cap };
        if k < 0 {
            finite = false;
        }
        let mut keep_off = [0i64; 2];
        keep_off[s.keep] += a;
        if k < 0 {
            // every tail exponent beyond this term's reach is missing from the sum
            exact_to = exact_to.min(keep_off[s.tail.0] + tail_cap);
        }
        for t in 0..=top {
            let mut e = keep_off;
            e[s.head.0] += k - t;
            e[s.tail.0] += t;
            let mut coeff = Rational::from_bigint(binom_int(k, t as u64));
            if s.head.1 < 0 && (k - t) % 2 != 0 {
                coeff = -coeff;
            }
            if s.tail.1 < 0 && t % 2 != 0 {
                coeff = -coeff;
            }
            add2(&mut out, (e[0], e[1]), c, &coeff);
        }
    }
    Substituted { poly: out, finite, exact_to }
}

/// Coefficients of `d/dx`.
pub(crate) fn derivative1(p: &Poly1) -> Poly1 {
    let mut out = Poly1::new();
    for (&k, c) in p {
        add1(&mut out, k - 1, c, &Rational::from_integer(k));
    }
    out
}

/// `e^{xD} v` as a polynomial in `x`; `D` must be nilpotent.
pub(crate) fn exp_apply(d: &Matrix, basis: &[crate::scalars::BasisId], v: &VectorCoeff) -> Poly1 {
    let mut out = Poly1::new();
    let mut cur = v.clone();
    let mut k = 0i64;
    while !cur.is_zero() {
        add1(&mut out, k, &cur, &factorial(k as u64).recip().expect("factorial is nonzero"));
        cur = apply(d, basis, &cur);
        k += 1;
        assert!(k as usize <= basis.len() + 1, "exp_apply needs a nilpotent operator");
    }
    out
}

pub(crate) fn apply(d: &Matrix, basis: &[crate::scalars::BasisId], v: &VectorCoeff) -> VectorCoeff {
    let col: Vec<Rational> = basis.iter().map(|b| v.get(b)).collect();
    let img = d.apply(&col).expect("operator matches the basis");
    VectorCoeff::from_entries(basis.iter().cloned().zip(img))
}
