use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Coefficient, Rational};

/// Opaque name of a basis element of a finite-dimensional coefficient space.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisId(Arc<str>);

impl BasisId {
    pub fn new(name: &str) -> Self {
        BasisId(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for BasisId {
    fn from(s: &str) -> Self {
        BasisId::new(s)
    }
}

impl fmt::Display for BasisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for BasisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for BasisId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for BasisId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(BasisId::new(&s))
    }
}

/// Sparse vector over a named basis. Zero entries are never stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VectorCoeff {
    entries: BTreeMap<BasisId, Rational>,
}

impl VectorCoeff {
    pub fn new() -> Self {
        VectorCoeff::default()
    }

    pub fn basis(id: impl Into<BasisId>) -> Self {
        let mut v = VectorCoeff::new();
        v.entries.insert(id.into(), Rational::one());
        v
    }

    pub fn from_entries<I, B>(entries: I) -> Self
    where
        I: IntoIterator<Item = (B, Rational)>,
        B: Into<BasisId>,
    {
        let mut v = VectorCoeff::new();
        for (b, c) in entries {
            v.add_entry(b.into(), &c);
        }
        v
    }

    pub fn get(&self, id: &BasisId) -> Rational {
        self.entries.get(id).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&BasisId, &Rational)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_entry(&mut self, id: BasisId, c: &Rational) {
        if c.is_zero() {
            return;
        }
        match self.entries.get_mut(&id) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.entries.remove(&id);
                }
            }
            None => {
                self.entries.insert(id, c.clone());
            }
        }
    }
}

impl fmt::Debug for VectorCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for VectorCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("0");
        }
        f.write_str("{")?;
        for (i, (b, c)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}:{c}")?;
        }
        f.write_str("}")
    }
}

impl Coefficient for VectorCoeff {
    fn zero() -> Self {
        VectorCoeff::new()
    }

    fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    fn add_scaled(&mut self, other: &Self, by: &Rational) {
        if by.is_zero() {
            return;
        }
        for (b, c) in &other.entries {
            let term = if by.is_one() { c.clone() } else { c * by };
            self.add_entry(b.clone(), &term);
        }
    }

    fn scaled(&self, by: &Rational) -> Self {
        if by.is_zero() {
            return VectorCoeff::new();
        }
        VectorCoeff {
            entries: self.entries.iter().map(|(b, c)| (b.clone(), c * by)).collect(),
        }
    }
}

/// Exact linear combination `Σ cᵢ·vᵢ`.
pub fn linear_combine<'a, I>(terms: I) -> VectorCoeff
where
    I: IntoIterator<Item = (&'a Rational, &'a VectorCoeff)>,
{
    let mut out = VectorCoeff::new();
    for (c, v) in terms {
        out.add_scaled(v, c);
    }
    out
}
