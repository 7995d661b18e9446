//! Certified over-approximations of where a series can be nonzero.
//!
//! A support is one interval per variable plus an interval for the total degree. The
//! degree constraint is what lets a delta function (degree fixed, every single
//! exponent unbounded) take part in certified products.

use std::cmp::{max, min};

use serde::{Deserialize, Serialize};

/// Closed integer interval; `None` is an infinite end. `lo > hi` is empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

impl Interval {
    pub const FULL: Interval = Interval { lo: None, hi: None };
    pub const EMPTY: Interval = Interval { lo: Some(0), hi: Some(-1) };

    pub fn new(lo: i64, hi: i64) -> Self {
        Interval { lo: Some(lo), hi: Some(hi) }
    }

    pub fn point(x: i64) -> Self {
        Interval::new(x, x)
    }

    pub fn at_least(lo: i64) -> Self {
        Interval { lo: Some(lo), hi: None }
    }

    pub fn at_most(hi: i64) -> Self {
        Interval { lo: None, hi: Some(hi) }
    }

    pub fn is_empty(&self) -> bool {
        matches!((self.lo, self.hi), (Some(l), Some(h)) if l > h)
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_some() && self.hi.is_some()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo.map_or(true, |l| l <= x) && self.hi.map_or(true, |h| x <= h)
    }

    /// Whether every point of `self` lies in `[lo, hi]`.
    pub fn within(&self, lo: i64, hi: i64) -> bool {
        self.is_empty() || (self.lo.map_or(false, |l| l >= lo) && self.hi.map_or(false, |h| h <= hi))
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval::EMPTY;
        }
        Interval { lo: opt_max(self.lo, other.lo), hi: opt_min(self.hi, other.hi) }
    }

    /// Minkowski sum.
    pub fn add(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval::EMPTY;
        }
        Interval {
            lo: self.lo.zip(other.lo).map(|(a, b)| a + b),
            hi: self.hi.zip(other.hi).map(|(a, b)| a + b),
        }
    }

    /// `{x - t : t in self}`.
    pub fn reflect_from(&self, x: i64) -> Interval {
        if self.is_empty() {
            return Interval::EMPTY;
        }
        Interval { lo: self.hi.map(|h| x - h), hi: self.lo.map(|l| x - l) }
    }

    pub fn shift(&self, d: i64) -> Interval {
        if self.is_empty() {
            return Interval::EMPTY;
        }
        Interval { lo: self.lo.map(|l| l + d), hi: self.hi.map(|h| h + d) }
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        if self.is_empty() {
            return *other;
        }
        if other.is_empty() {
            return *self;
        }
        Interval {
            lo: self.lo.zip(other.lo).map(|(a, b)| min(a, b)),
            hi: self.hi.zip(other.hi).map(|(a, b)| max(a, b)),
        }
    }
}

fn opt_max(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(max(x, y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn opt_min(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(min(x, y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Sum of all entries but `skip`; `None` if any of them is infinite.
fn sum_except(ends: &[Option<i64>], skip: usize) -> Option<i64> {
    let mut acc = 0;
    for (i, e) in ends.iter().enumerate() {
        if i != skip {
            acc += (*e)?;
        }
    }
    Some(acc)
}

/// Tighten a box under `sum(x) in degree`. For one sum constraint over a box this is
/// the exact coordinate projection. Returns `None` when the set is empty.
pub fn tighten(boxes: &[Interval], degree: Interval) -> Option<(Vec<Interval>, Interval)> {
    if degree.is_empty() || boxes.iter().any(Interval::is_empty) {
        return None;
    }
    let los: Vec<Option<i64>> = boxes.iter().map(|b| b.lo).collect();
    let his: Vec<Option<i64>> = boxes.iter().map(|b| b.hi).collect();
    let all_lo: Option<i64> = los.iter().copied().sum();
    let all_hi: Option<i64> = his.iter().copied().sum();
    let degree = degree.intersect(&Interval { lo: all_lo, hi: all_hi });
    if degree.is_empty() {
        return None;
    }
    let mut out = Vec::with_capacity(boxes.len());
    for (i, b) in boxes.iter().enumerate() {
        let lo = match (degree.lo, sum_except(&his, i)) {
            (Some(d), Some(s)) => opt_max(b.lo, Some(d - s)),
            _ => b.lo,
        };
        let hi = match (degree.hi, sum_except(&los, i)) {
            (Some(d), Some(s)) => opt_min(b.hi, Some(d - s)),
            _ => b.hi,
        };
        out.push(Interval { lo, hi });
    }
    Some((out, degree))
}

/// Per-variable description of the space a series lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarShape {
    pub lower_truncated: bool,
    pub upper_truncated: bool,
    pub finite_support: bool,
    pub unknown: bool,
}

impl VarShape {
    pub fn of(iv: &Interval) -> Self {
        VarShape {
            lower_truncated: iv.is_empty() || iv.lo.is_some(),
            upper_truncated: iv.is_empty() || iv.hi.is_some(),
            finite_support: iv.is_empty() || iv.is_bounded(),
            unknown: !iv.is_empty() && iv.lo.is_none() && iv.hi.is_none(),
        }
    }
}

/// Where a series may be nonzero: per-variable intervals and a total-degree interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Support {
    pub vars: Vec<Interval>,
    pub degree: Interval,
}

impl Support {
    pub fn empty(n: usize) -> Self {
        Support { vars: vec![Interval::EMPTY; n], degree: Interval::EMPTY }
    }

    pub fn is_empty(&self) -> bool {
        tighten(&self.vars, self.degree).is_none()
    }

    /// The support with every bound implied by the degree constraint made explicit.
    pub fn tightened(&self) -> Support {
        match tighten(&self.vars, self.degree) {
            Some((vars, degree)) => Support { vars, degree },
            None => Support::empty(self.vars.len()),
        }
    }

    pub fn contains(&self, e: &[i64]) -> bool {
        e.iter().zip(&self.vars).all(|(x, iv)| iv.contains(*x)) && self.degree.contains(e.iter().sum())
    }

    pub fn is_finite(&self) -> bool {
        self.tightened().vars.iter().all(|iv| iv.is_empty() || iv.is_bounded())
    }

    /// Support of a product: Minkowski sums, tightened.
    pub fn product(&self, other: &Support) -> Support {
        Support {
            vars: self.vars.iter().zip(&other.vars).map(|(a, b)| a.add(b)).collect(),
            degree: self.degree.add(&other.degree),
        }
        .tightened()
    }

    /// Exact bounding box of `{p in self : m - p in other}`; `Ok(None)` when empty,
    /// `Err(i)` when unbounded in variable `i`.
    pub fn convolution_box(&self, other: &Support, m: &[i64]) -> Result<Option<Vec<Interval>>, usize> {
        let boxes: Vec<Interval> = self
            .vars
            .iter()
            .zip(&other.vars)
            .zip(m)
            .map(|((a, b), &x)| a.intersect(&b.reflect_from(x)))
            .collect();
        let total: i64 = m.iter().sum();
        let degree = self.degree.intersect(&other.degree.reflect_from(total));
        match tighten(&boxes, degree) {
            None => Ok(None),
            Some((b, _)) => match b.iter().position(|iv| !iv.is_bounded()) {
                Some(i) => Err(i),
                None => Ok(Some(b)),
            },
        }
    }

    /// Whether every convolution set of the product is finite, independent of the
    /// output exponent. `Err(i)` names an unbounded variable.
    pub fn certify_product(&self, other: &Support) -> Result<(), usize> {
        let a = self.tightened();
        let b = other.tightened();
        if a.is_empty() || b.is_empty() {
            return Ok(());
        }
        // Which ends of the convolution box are finite does not depend on the output
        // exponent, so it is decided from the infinite ends alone.
        let n = a.vars.len();
        let box_lo: Vec<bool> = (0..n).map(|i| a.vars[i].lo.is_some() || b.vars[i].hi.is_some()).collect();
        let box_hi: Vec<bool> = (0..n).map(|i| a.vars[i].hi.is_some() || b.vars[i].lo.is_some()).collect();
        let deg_lo = a.degree.lo.is_some() || b.degree.hi.is_some();
        let deg_hi = a.degree.hi.is_some() || b.degree.lo.is_some();
        for i in 0..n {
            let others_hi = (0..n).all(|j| j == i || box_hi[j]);
            let others_lo = (0..n).all(|j| j == i || box_lo[j]);
            let lo = box_lo[i] || (deg_lo && others_hi);
            let hi = box_hi[i] || (deg_hi && others_lo);
            if !(lo && hi) {
                return Err(i);
            }
        }
        Ok(())
    }
}
