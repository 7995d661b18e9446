use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ExprError;

const MAX_NAME: usize = 8;

/// A formal variable. Names are short ASCII identifiers such as `x0` or `y`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    len: u8,
    bytes: [u8; MAX_NAME],
}

impl Var {
    pub fn new(name: &str) -> Result<Self, ExprError> {
        let ok = !name.is_empty()
            && name.len() <= MAX_NAME
            && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
            && name.as_bytes()[0].is_ascii_alphabetic();
        if !ok {
            return Err(ExprError::BadVariable(name.to_string()));
        }
        let mut bytes = [0u8; MAX_NAME];
        bytes[..name.len()].copy_from_slice(name.as_bytes());
        Ok(Var { len: name.len() as u8, bytes })
    }

    /// Panicking constructor for literals known to be valid.
    pub fn named(name: &str) -> Self {
        Var::new(name).expect("valid variable name")
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.bytes[..self.len as usize]).expect("ascii")
    }

    pub fn pos(self) -> SignedVar {
        SignedVar { var: self, negative: false }
    }

    pub fn neg(self) -> SignedVar {
        SignedVar { var: self, negative: true }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Var {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Var::new(s)
    }
}

impl Serialize for Var {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Var {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Var::new(&s).map_err(serde::de::Error::custom)
    }
}

/// `+v` or `-v`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedVar {
    pub var: Var,
    pub negative: bool,
}

impl SignedVar {
    pub fn flip(self) -> Self {
        SignedVar { var: self.var, negative: !self.negative }
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> i64 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    /// Multiply the sign by `s` (only the parity of `s` matters).
    pub fn times(self, negative: bool) -> Self {
        SignedVar { var: self.var, negative: self.negative ^ negative }
    }
}

impl fmt::Display for SignedVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.negative { '-' } else { '+' }, self.var)
    }
}

impl fmt::Debug for SignedVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for SignedVar {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (negative, rest) = match s.as_bytes().first() {
            Some(b'+') => (false, &s[1..]),
            Some(b'-') => (true, &s[1..]),
            _ => (false, s),
        };
        Ok(SignedVar { var: Var::new(rest)?, negative })
    }
}

impl Serialize for SignedVar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SignedVar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Product of integer powers of variables. Zero exponents are never stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(BTreeMap<Var, i64>);

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: Var, exp: i64) -> Self {
        let mut m = Monomial::one();
        m.mul_var(v, exp);
        m
    }

    pub fn from_pairs<I: IntoIterator<Item = (Var, i64)>>(pairs: I) -> Self {
        let mut m = Monomial::one();
        for (v, e) in pairs {
            m.mul_var(v, e);
        }
        m
    }

    pub fn exp(&self, v: Var) -> i64 {
        self.0.get(&v).copied().unwrap_or(0)
    }

    pub fn mul_var(&mut self, v: Var, exp: i64) {
        if exp == 0 {
            return;
        }
        let e = self.0.entry(v).or_insert(0);
        *e += exp;
        if *e == 0 {
            self.0.remove(&v);
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (&v, &e) in &other.0 {
            out.mul_var(v, e);
        }
        out
    }

    /// Remove `v` and return its exponent.
    pub fn take(&mut self, v: Var) -> i64 {
        self.0.remove(&v).unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, i64)> + '_ {
        self.0.iter().map(|(&v, &e)| (v, e))
    }

    pub fn total_degree(&self) -> i64 {
        self.0.values().sum()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
