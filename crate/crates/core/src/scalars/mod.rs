//! Exact scalars: rationals, generalized binomials, sparse vectors and small dense matrices.

mod matrix;
mod rational;
mod vector;

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

pub use matrix::Matrix;
pub use rational::Rational;
pub use vector::{linear_combine, BasisId, VectorCoeff};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("binomial lower index must be nonnegative, got {0}")]
    NegativeLowerIndex(i64),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
}

/// Values that can sit in front of a monomial: plain rationals or vectors over a basis.
pub trait Coefficient:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + serde::Serialize
    + serde::de::DeserializeOwned
    + 'static
{
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    /// `self += by * other`
    fn add_scaled(&mut self, other: &Self, by: &Rational);
    fn scaled(&self, by: &Rational) -> Self;

    fn add_assign_ref(&mut self, other: &Self) {
        self.add_scaled(other, &Rational::one());
    }

    fn negated(&self) -> Self {
        self.scaled(&Rational::from_integer(-1))
    }
}

impl Coefficient for Rational {
    fn zero() -> Self {
        Rational::zero()
    }

    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }

    fn add_scaled(&mut self, other: &Self, by: &Rational) {
        if by.is_one() {
            *self += other;
        } else {
            *self += other * by;
        }
    }

    fn scaled(&self, by: &Rational) -> Self {
        self * by
    }
}

/// Generalized binomial coefficient `n(n-1)...(n-k+1)/k!` for any integer `n`.
pub fn binom(n: i64, k: i64) -> Result<Rational, ScalarError> {
    if k < 0 {
        return Err(ScalarError::NegativeLowerIndex(k));
    }
    Ok(Rational::from_bigint(binom_int(n, k as u64)))
}

/// Integer form of [`binom`]; the quotient is always exact.
pub fn binom_int(n: i64, k: u64) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n) - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// [`binom`] in machine integers, `None` on overflow.
pub fn binom_i128(n: i64, k: u64) -> Option<i128> {
    // Multiplicative form keeps every partial result an integer: C(n,i+1) = C(n,i)(n-i)/(i+1).
    let mut acc: i128 = 1;
    for i in 0..k {
        let f = (n as i128).checked_sub(i as i128)?;
        if f == 0 {
            return Some(0);
        }
        acc = acc.checked_mul(f)? / (i as i128 + 1);
    }
    Some(acc)
}

/// `k!` as a rational.
pub fn factorial(k: u64) -> Rational {
    let mut out = BigInt::one();
    for i in 2..=k {
        out *= BigInt::from(i);
    }
    Rational::from_bigint(out)
}
