//! Test-only oracles, written independently of the library's expansion engine.
#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;
/// Exponent vector over a fixed variable order.
pub type Series = HashMap<Vec<i64>, Q>;

pub fn q(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

/// `n(n-1)...(n-k+1)/k!` straight from the definition.
pub fn binom(n: i64, k: i64) -> Q {
    let mut acc = Q::one();
    for i in 0..k {
        acc = acc * q(n - i) / q(i + 1);
    }
    acc
}

pub fn add_into(acc: &mut Series, exps: Vec<i64>, c: Q) {
    if c.is_zero() {
        return;
    }
    let e = acc.entry(exps).or_insert_with(Q::zero);
    *e += c;
}

pub fn prune(s: Series) -> Series {
    s.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Signed variable: (index, sign).
pub type SV = (usize, i64);

/// `(h + t1 + ... + tr)^n` read as `((h + t1) + ...) + tr)^n` and expanded one
/// binomial at a time, the outermost split on the last entry, with every tail power
/// capped at `cap`.
pub fn expand_power(nvars: usize, head: SV, tail: &[SV], n: i64, cap: i64) -> Series {
    let mut out = Series::new();
    match tail.split_last() {
        None => {
            let mut e = vec![0; nvars];
            e[head.0] = n;
            let sign = if head.1 < 0 && n.rem_euclid(2) == 1 { -1 } else { 1 };
            add_into(&mut out, e, q(sign));
        }
        Some((&last, rest)) => {
            let top = if n >= 0 { n.min(cap) } else { cap };
            for j in 0..=top {
                let c = binom(n, j) * q(if last.1 < 0 && j % 2 == 1 { -1 } else { 1 });
                for (mut e, c2) in expand_power(nvars, head, rest, n - j, cap) {
                    e[last.0] += j;
                    add_into(&mut out, e, c.clone() * c2);
                }
            }
        }
    }
    out
}

/// `d^-1 delta(N/d)` for summation index in `[-cap, cap]`.
pub fn expand_delta(nvars: usize, head: SV, tail: &[SV], denom: usize, cap: i64) -> Series {
    let mut out = Series::new();
    for n in -cap..=cap {
        for (mut e, c) in expand_power(nvars, head, tail, n, cap) {
            e[denom] += -n - 1;
            add_into(&mut out, e, c);
        }
    }
    out
}

pub fn multiply(a: &Series, b: &Series) -> Series {
    let mut out = Series::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            add_into(&mut out, e, ca * cb);
        }
    }
    prune(out)
}

pub fn scale(a: &Series, c: &Q) -> Series {
    prune(a.iter().map(|(e, x)| (e.clone(), x * c)).collect())
}

pub fn sum(parts: &[Series]) -> Series {
    let mut out = Series::new();
    for p in parts {
        for (e, c) in p {
            add_into(&mut out, e.clone(), c.clone());
        }
    }
    prune(out)
}

pub fn restrict(s: &Series, lo: i64, hi: i64) -> Series {
    s.iter()
        .filter(|(e, _)| e.iter().all(|&x| lo <= x && x <= hi))
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect()
}
