//! JSON form of a module: the acting structure's fields plus `{wbasis, wmodes: [{u, n, w, coeff}]}`.

use serde::{Deserialize, Serialize};

use super::ModuleStructure;
use crate::scalars::{BasisId, VectorCoeff};
use crate::valg::{Axiom, ModeEntry, Result, StructureConfig, ValgError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WModeEntry {
    pub u: String,
    pub n: i64,
    pub w: String,
    pub coeff: VectorCoeff,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleConfig {
    #[serde(default)]
    pub name: Option<String>,
    /// Name of the acting structure.
    #[serde(default)]
    pub over: Option<String>,
    pub basis: Vec<String>,
    pub modes: Vec<ModeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vacuum: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<Axiom>,
    pub wbasis: Vec<String>,
    pub wmodes: Vec<WModeEntry>,
}

impl ModuleConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ValgError::Invalid(format!("module config: {e}")))
    }

    pub fn build(&self, fallback_name: &str) -> Result<ModuleStructure> {
        let name = self.name.as_deref().unwrap_or(fallback_name);
        let over = StructureConfig {
            name: Some(self.over.clone().unwrap_or_else(|| format!("{name}-over"))),
            basis: self.basis.clone(),
            modes: self.modes.clone(),
            vacuum: self.vacuum.clone(),
            tags: self.tags.clone(),
        }
        .build(name)?;
        let entries = self
            .wmodes
            .iter()
            .map(|m| (BasisId::new(&m.u), m.n, BasisId::new(&m.w), m.coeff.clone()));
        ModuleStructure::new(name, over, self.wbasis.iter().map(|b| BasisId::new(b)).collect(), entries)
    }

    pub fn of(m: &ModuleStructure) -> Self {
        let s = StructureConfig::of(m.over());
        ModuleConfig {
            name: Some(m.name.clone()),
            over: s.name,
            basis: s.basis,
            modes: s.modes,
            vacuum: s.vacuum,
            tags: s.tags,
            wbasis: m.wbasis().iter().map(|b| b.to_string()).collect(),
            wmodes: m
                .entries()
                .into_iter()
                .map(|(u, n, w, coeff)| WModeEntry { u: u.to_string(), n, w: w.to_string(), coeff })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }
}
