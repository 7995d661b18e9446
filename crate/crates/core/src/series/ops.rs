use std::collections::BTreeMap;

use super::support::{Interval, Support};
use super::{
    box_points, coords, from_coords, sorted_vars, Exps, Result, ScalarAction, SeriesError, WindowedSeries,
};
use crate::expansion::{Monomial, SignedVar, Var, Window};
use crate::scalars::{binom, factorial, BasisId, Coefficient, Matrix, Rational, VectorCoeff};

fn ranges_of(vars: &[Var], w: &Window) -> Result<Vec<(i64, i64)>> {
    vars.iter()
        .map(|&v| match w.range(v) {
            Some(r) => Ok(r),
            None => Err(SeriesError::Malformed(format!("window has no range for {v}"))),
        })
        .collect()
}

fn describe_ranges(vars: &[Var], r: &[(i64, i64)]) -> String {
    vars.iter().zip(r).map(|(v, (l, h))| format!("{v}:[{l},{h}]")).collect::<Vec<_>>().join(" ")
}

fn describe(vars: &[Var], ivs: &[Interval]) -> String {
    vars.iter()
        .zip(ivs)
        .map(|(v, iv)| match (iv.lo, iv.hi) {
            (Some(l), Some(h)) => format!("{v}:[{l},{h}]"),
            _ => format!("{v}:unbounded"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn in_ranges(e: &[i64], r: &[(i64, i64)]) -> bool {
    e.iter().zip(r).all(|(&x, &(l, h))| l <= x && x <= h)
}

fn hull_into(acc: &mut Option<Vec<Interval>>, ivs: &[Interval]) {
    match acc {
        None => *acc = Some(ivs.to_vec()),
        Some(a) => a.iter_mut().zip(ivs).for_each(|(x, y)| *x = x.hull(y)),
    }
}

fn reflect_box(m: &[i64], b: &[Interval]) -> Vec<Interval> {
    b.iter().zip(m).map(|(iv, &x)| iv.reflect_from(x)).collect()
}

fn boxed_within(b: &[Interval], r: &[(i64, i64)]) -> bool {
    b.iter().zip(r).all(|(iv, &(l, h))| iv.within(l, h))
}

fn certify(vars: &[Var], a: &Support, b: &Support) -> Result<()> {
    a.certify_product(b).map_err(|i| {
        SeriesError::SummabilityUnknown(format!(
            "convolution is not certified finite in {}; every coefficient may be an infinite sum",
            vars[i]
        ))
    })
}

/// Input boxes that a product on `out` reads from, for series with the given supports
/// over the sorted variable list `vars`.
pub fn product_requirements(vars: &[Var], a: &Support, b: &Support, out: &Window) -> Result<(Window, Window)> {
    let vars = sorted_vars(vars.iter().copied());
    certify(&vars, a, b)?;
    let r = ranges_of(&vars, out)?;
    let (need_a, need_b) = requirements(a, b, &r);
    let to_window = |n: Option<Vec<Interval>>| match n {
        Some(ivs) => Window::new(
            vars.iter().zip(ivs).map(|(&v, iv)| (v, iv.lo.unwrap_or(0), iv.hi.unwrap_or(0))),
        ),
        None => Window::new(vars.iter().map(|&v| (v, 0, 0))),
    };
    Ok((to_window(need_a), to_window(need_b)))
}

fn requirements(a: &Support, b: &Support, r: &[(i64, i64)]) -> (Option<Vec<Interval>>, Option<Vec<Interval>>) {
    let mut need_a = None;
    let mut need_b = None;
    for m in box_points(r) {
        if let Ok(Some(bx)) = a.convolution_box(b, &m) {
            hull_into(&mut need_b, &reflect_box(&m, &bx));
            hull_into(&mut need_a, &bx);
        }
    }
    (need_a, need_b)
}

fn align<A: Coefficient, B: Coefficient>(
    a: &WindowedSeries<A>,
    b: &WindowedSeries<B>,
    extra: &[Var],
) -> (WindowedSeries<A>, WindowedSeries<B>) {
    let all: Vec<Var> = a.vars.iter().chain(&b.vars).chain(extra).copied().collect();
    (a.with_vars(all.clone()), b.with_vars(all))
}

/// Product on an explicit output window.
pub fn multiply_on<A, B>(a: &WindowedSeries<A>, b: &WindowedSeries<B>, out: &Window) -> Result<WindowedSeries<B>>
where
    A: ScalarAction<B>,
    B: Coefficient,
{
    let (a, b) = align(a, b, out.vars());
    certify(&a.vars, &a.support, &b.support)?;
    let r = ranges_of(&a.vars, out)?;
    let mut bad_a = None;
    let mut bad_b = None;
    for m in box_points(&r) {
        match a.support.convolution_box(&b.support, &m) {
            Ok(None) => {}
            Ok(Some(bx)) => {
                let rb = reflect_box(&m, &bx);
                if !boxed_within(&bx, &a.window) || !boxed_within(&rb, &b.window) {
                    hull_into(&mut bad_a, &bx);
                    hull_into(&mut bad_b, &rb);
                }
            }
            Err(i) => {
                return Err(SeriesError::SummabilityUnknown(format!("unbounded convolution in {}", a.vars[i])))
            }
        }
    }
    if bad_a.is_some() {
        let (need_a, need_b) = requirements(&a.support, &b.support, &r);
        return Err(SeriesError::WindowUnderflow(format!(
            "product on {} needs the left factor on {} (have {}) and the right factor on {} (have {})",
            describe_ranges(&a.vars, &r),
            describe(&a.vars, &need_a.unwrap_or_default()),
            a.window_text(),
            describe(&a.vars, &need_b.unwrap_or_default()),
            b.window_text()
        )));
    }
    Ok(convolve(&a, &b, r))
}

fn convolve<A, B>(a: &WindowedSeries<A>, b: &WindowedSeries<B>, r: Vec<(i64, i64)>) -> WindowedSeries<B>
where
    A: ScalarAction<B>,
    B: Coefficient,
{
    let mut acc: BTreeMap<Exps, B> = BTreeMap::new();
    let first = r.first().copied();
    for (p, ca) in &a.coeffs {
        let iter: Box<dyn Iterator<Item = (&Exps, &B)>> = match first {
            Some((l, h)) => {
                let lo: Exps = std::iter::once(l - p[0]).chain(std::iter::repeat(i64::MIN).take(p.len() - 1)).collect();
                let hi: Exps = std::iter::once(h - p[0]).chain(std::iter::repeat(i64::MAX).take(p.len() - 1)).collect();
                Box::new(b.coeffs.range(lo..=hi))
            }
            None => Box::new(b.coeffs.iter()),
        };
        for (q, cb) in iter {
            let m: Exps = p.iter().zip(q).map(|(x, y)| x + y).collect();
            if in_ranges(&m, &r) {
                let t = ca.act(cb);
                acc.entry(m).or_insert_with(B::zero).add_assign_ref(&t);
            }
        }
    }
    acc.retain(|_, c| !c.is_zero());
    WindowedSeries { vars: a.vars.clone(), coeffs: acc, window: r, support: a.support.product(&b.support) }
}

/// Product on the largest window the inputs determine. For two finite series this is
/// the whole product.
pub fn multiply<A, B>(a: &WindowedSeries<A>, b: &WindowedSeries<B>) -> Result<WindowedSeries<B>>
where
    A: ScalarAction<B>,
    B: Coefficient,
{
    let (a, b) = align(a, b, &[]);
    certify(&a.vars, &a.support, &b.support)?;
    let support = a.support.product(&b.support);
    if support.is_empty() {
        return Ok(WindowedSeries::zero(a.vars.clone()));
    }
    let mut r: Vec<(i64, i64)> = a
        .window
        .iter()
        .zip(&b.window)
        .zip(&support.vars)
        .map(|((x, y), iv)| {
            let (l, h) = (x.0 + y.0, x.1 + y.1);
            (iv.lo.map_or(l, |s| s.max(l)), iv.hi.map_or(h, |s| s.min(h)))
        })
        .collect();
    if a.is_exact() && b.is_exact() {
        return Ok(convolve(&a, &b, r));
    }
    loop {
        let bad = box_points(&r).into_iter().find(|m| match a.support.convolution_box(&b.support, m) {
            Ok(Some(bx)) => !boxed_within(&bx, &a.window) || !boxed_within(&reflect_box(m, &bx), &b.window),
            _ => false,
        });
        let Some(m) = bad else { break };
        // cut off the face on the side where the needed inputs overflow a window
        let bx = a.support.convolution_box(&b.support, &m).ok().flatten().expect("uncovered box exists");
        let rb = reflect_box(&m, &bx);
        let over = |iv: &Interval, w: (i64, i64)| (iv.lo.map_or(true, |l| l < w.0), iv.hi.map_or(true, |h| h > w.1));
        let (i, low) = (0..r.len())
            .find_map(|i| {
                let (a_lo, a_hi) = over(&bx[i], a.window[i]);
                let (b_lo, b_hi) = over(&rb[i], b.window[i]);
                // a high needed input of either factor means the output exponent is too high
                if a_hi || b_hi {
                    Some((i, false))
                } else if a_lo || b_lo {
                    Some((i, true))
                } else {
                    None
                }
            })
            .expect("some variable overflows");
        if low {
            r[i].0 = m[i] + 1;
        } else {
            r[i].1 = m[i] - 1;
        }
        if r[i].0 > r[i].1 {
            return Err(SeriesError::WindowUnderflow(format!(
                "windows {} and {} determine no product coefficient",
                a.window_text(),
                b.window_text()
            )));
        }
    }
    Ok(convolve(&a, &b, r))
}

/// Replace `x` by `x + by` (or `x - by`), expanding in nonnegative powers of `by`.
/// With `out = None` the result must be finite and is returned in full.
pub fn taylor_substitute<C: Coefficient>(
    s: &WindowedSeries<C>,
    x: Var,
    by: SignedVar,
    out: Option<&Window>,
) -> Result<WindowedSeries<C>> {
    if by.var == x {
        return Err(SeriesError::Malformed(format!("cannot shift {x} by itself")));
    }
    let s = s.with_vars([x, by.var]);
    let xi = s.vars.iter().position(|&v| v == x).expect("added");
    let yi = s.vars.iter().position(|&v| v == by.var).expect("added");
    let t = s.support.tightened();
    if t.is_empty() {
        let mut z = WindowedSeries::zero(s.vars.clone());
        if let Some(w) = out {
            z.window = ranges_of(&z.vars, w)?;
        }
        return Ok(z);
    }
    let (xiv, yiv) = (t.vars[xi], t.vars[yi]);
    if xiv.hi.is_none() && yiv.lo.is_none() {
        return Err(SeriesError::SummabilityUnknown(format!(
            "{x} is not bounded above and {} not below, so each shifted coefficient is an infinite sum",
            by.var
        )));
    }
    let mut sup = t.clone();
    let nonneg = xiv.lo.map_or(false, |l| l >= 0);
    sup.vars[xi] = Interval { lo: if nonneg { Some(0) } else { None }, hi: xiv.hi };
    sup.vars[yi] = Interval {
        lo: yiv.lo,
        hi: if nonneg { yiv.hi.zip(xiv.hi).map(|(a, b)| a + b) } else { None },
    };
    let sup = sup.tightened();
    let r = match out {
        Some(w) => ranges_of(&s.vars, w)?,
        None => {
            if !sup.is_finite() {
                return Err(SeriesError::WindowUnderflow(format!(
                    "shifting {x} by {by} gives an infinite series; an output window is required"
                )));
            }
            sup.vars.iter().map(|iv| (iv.lo.unwrap_or(0), iv.hi.unwrap_or(0))).collect()
        }
    };
    let sign = if by.negative { -1 } else { 1 };
    let mut coeffs = BTreeMap::new();
    let mut need: Option<Vec<Interval>> = None;
    let mut short = false;
    for m in box_points(&r) {
        if !sup.contains(&m) {
            continue;
        }
        let others_ok = (0..m.len()).filter(|&i| i != xi && i != yi).all(|i| t.vars[i].contains(m[i]));
        let krange = Interval::at_least(0)
            .intersect(&xiv.shift(-m[xi]))
            .intersect(&yiv.reflect_from(m[yi]));
        if !others_ok || krange.is_empty() {
            continue;
        }
        let (k0, k1) = (krange.lo.expect("bounded"), krange.hi.expect("certified above"));
        let mut pts: Vec<Interval> = m.iter().map(|&y| Interval::point(y)).collect();
        pts[xi] = Interval::new(m[xi] + k0, m[xi] + k1);
        pts[yi] = Interval::new(m[yi] - k1, m[yi] - k0);
        if !boxed_within(&pts, &s.window) {
            short = true;
            hull_into(&mut need, &pts);
            continue;
        }
        let mut c = C::zero();
        let mut src = m.clone();
        for k in k0..=k1 {
            src[xi] = m[xi] + k;
            src[yi] = m[yi] - k;
            if let Some(v) = s.coeffs.get(&src) {
                let w = binom(m[xi] + k, k).expect("k >= 0") * Rational::sign_power(if sign < 0 { k } else { 0 });
                c.add_scaled(v, &w);
            }
        }
        if !c.is_zero() {
            coeffs.insert(m, c);
        }
    }
    if short {
        return Err(SeriesError::WindowUnderflow(format!(
            "shift of {x} by {by} on {} needs input on {} (have {})",
            describe_ranges(&s.vars, &r),
            describe(&s.vars, &need.unwrap_or_default()),
            s.window_text()
        )));
    }
    Ok(WindowedSeries { vars: s.vars.clone(), coeffs, window: r, support: sup })
}

/// `x -> -x`.
pub fn reflect<C: Coefficient>(s: &WindowedSeries<C>, x: Var) -> WindowedSeries<C> {
    let Some(i) = s.vars.iter().position(|&v| v == x) else { return s.clone() };
    let mut out = s.clone();
    for (e, c) in out.coeffs.iter_mut() {
        if e[i].rem_euclid(2) == 1 {
            *c = c.negated();
        }
    }
    out
}

/// Rename variable `from` to `to`, which must not already occur.
pub fn rename<C: Coefficient>(s: &WindowedSeries<C>, from: Var, to: Var) -> Result<WindowedSeries<C>> {
    if from == to {
        return Ok(s.clone());
    }
    if s.vars.contains(&to) {
        return Err(SeriesError::Malformed(format!("{to} already occurs")));
    }
    let Some(i) = s.vars.iter().position(|&v| v == from) else { return Ok(s.clone()) };
    let mut names = s.vars.clone();
    names[i] = to;
    let new_vars = sorted_vars(names.iter().copied());
    let perm: Vec<usize> = new_vars.iter().map(|v| names.iter().position(|w| w == v).expect("same set")).collect();
    let permute = |e: &[i64]| -> Exps { perm.iter().map(|&j| e[j]).collect() };
    Ok(WindowedSeries {
        coeffs: s.coeffs.iter().map(|(e, c)| (permute(e), c.clone())).collect(),
        window: perm.iter().map(|&j| s.window[j]).collect(),
        support: Support { vars: perm.iter().map(|&j| s.support.vars[j]).collect(), degree: s.support.degree },
        vars: new_vars,
    })
}

/// `d/dx`.
pub fn derivative<C: Coefficient>(s: &WindowedSeries<C>, x: Var) -> WindowedSeries<C> {
    let Some(i) = s.vars.iter().position(|&v| v == x) else {
        let mut z = WindowedSeries::zero(s.vars.clone());
        z.window = s.window.clone();
        return z;
    };
    let mut coeffs = BTreeMap::new();
    for (e, c) in &s.coeffs {
        if e[i] != 0 {
            let mut f = e.clone();
            f[i] -= 1;
            coeffs.insert(f, c.scaled(&Rational::from_integer(e[i])));
        }
    }
    let mut window = s.window.clone();
    window[i] = (window[i].0 - 1, window[i].1 - 1);
    let mut support = s.support.clone();
    support.vars[i] = support.vars[i].shift(-1);
    support.degree = support.degree.shift(-1);
    WindowedSeries { vars: s.vars.clone(), coeffs, window, support }
}

/// Coefficient of `x^-1`, as a series in the remaining variables.
pub fn residue<C: Coefficient>(s: &WindowedSeries<C>, x: Var) -> Result<WindowedSeries<C>> {
    let Some(i) = s.vars.iter().position(|&v| v == x) else {
        let mut z = WindowedSeries::zero(s.vars.clone());
        z.window = s.window.clone();
        return Ok(z);
    };
    let t = s.support.tightened();
    let (l, h) = s.window[i];
    if t.vars[i].contains(-1) && !(l <= -1 && -1 <= h) && !t.is_empty() {
        return Err(SeriesError::WindowUnderflow(format!(
            "residue in {x} needs {x}^-1 but the window is {x}:[{l},{h}]"
        )));
    }
    let drop = |v: &[i64]| -> Exps { v.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &y)| y).collect() };
    let mut vars = s.vars.clone();
    vars.remove(i);
    let mut window = s.window.clone();
    window.remove(i);
    let mut ivs = t.vars.clone();
    ivs.remove(i);
    let support = if t.vars[i].contains(-1) {
        Support { vars: ivs, degree: t.degree.shift(1) }.tightened()
    } else {
        Support::empty(vars.len())
    };
    let coeffs = s.coeffs.iter().filter(|(e, _)| e[i] == -1).map(|(e, c)| (drop(e), c.clone())).collect();
    Ok(WindowedSeries { vars, coeffs, window, support })
}

/// `e^{xD} v = sum_k x^k D^k v / k!` for nilpotent `D` acting on coordinates in `basis`.
pub fn exp_endo(d: &Matrix, basis: &[BasisId], x: Var, v: &VectorCoeff) -> Result<WindowedSeries<VectorCoeff>> {
    if d.rows() != basis.len() || d.cols() != basis.len() {
        return Err(SeriesError::Malformed("matrix does not match the basis".into()));
    }
    let k = d.nilpotency_index().ok_or(SeriesError::NotNilpotent)?;
    let mut cur = coords(basis, v)?;
    let mut terms = Vec::new();
    for j in 0..k {
        let scale = factorial(j as u64).recip().expect("nonzero factorial");
        terms.push((Monomial::var(x, j as i64), from_coords(basis, &cur).scaled(&scale)));
        cur = d.apply(&cur).map_err(|e| SeriesError::Malformed(e.to_string()))?;
    }
    WindowedSeries::polynomial([x], terms)
}
