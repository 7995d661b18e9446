//! JSON form of a structure: `{basis, modes: [{u, n, v, coeff}], vacuum?}`.

use serde::{Deserialize, Serialize};

use super::{Axiom, Result, ValgError, VertexStructure};
use crate::scalars::{BasisId, VectorCoeff};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub u: String,
    pub n: i64,
    pub v: String,
    pub coeff: VectorCoeff,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub basis: Vec<String>,
    pub modes: Vec<ModeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vacuum: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<Axiom>,
}

impl StructureConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ValgError::Invalid(format!("structure config: {e}")))
    }

    pub fn build(&self, fallback_name: &str) -> Result<VertexStructure> {
        let name = self.name.as_deref().unwrap_or(fallback_name);
        let entries = self
            .modes
            .iter()
            .map(|m| (BasisId::new(&m.u), m.n, BasisId::new(&m.v), m.coeff.clone()));
        let s = VertexStructure::new(
            name,
            self.basis.iter().map(|b| BasisId::new(b)).collect(),
            entries,
            self.vacuum.as_deref().map(BasisId::new),
        )?;
        Ok(s.with_tags(self.tags.iter().copied()))
    }

    pub fn of(s: &VertexStructure) -> Self {
        StructureConfig {
            name: Some(s.name.clone()),
            basis: s.basis().iter().map(|b| b.to_string()).collect(),
            modes: s
                .entries()
                .into_iter()
                .map(|(u, n, v, coeff)| ModeEntry { u: u.to_string(), n, v: v.to_string(), coeff })
                .collect(),
            vacuum: s
                .vacuum()
                .and_then(|vac| vac.one.entries().next().map(|(b, _)| b.to_string())),
            tags: s.tags.iter().copied().collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }
}
