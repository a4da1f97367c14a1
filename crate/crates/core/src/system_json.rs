//! System-spec files: a JSON description of an implicit system with seeds.
//!
//! ```json
//! {
//!   "name": "glob1",
//!   "m": 3, "k": 3,
//!   "mu": ["z3", "0", "0"],
//!   "h": ["z1", "z2", "z3"],
//!   "seeds": [{"q": [[0.3, 0.5], "0.5+0.35j", [0.7, 0.2]], "z": [...]}],
//!   "maps": [{"name": "phi", "psi": "z1*z2"}]
//! }
//! ```
//!
//! Either `h` (canonical form, k = m) or `f` (polynomials in w and z) must
//! be given. Polynomials are strings in the text syntax or structured
//! objects; complex numbers are `[re, im]` pairs or `re+imj` strings.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::catalog::{CatalogEntry, NamedMap, Seed};
use crate::complex_core::{parse_complex, ComplexPoly};
use crate::error::{Error, Result};
use crate::hermitian::MuVector;
use crate::implicit::{ImplicitSystem, SolutionBranch, SystemForm};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolyText {
    Text(String),
    Structured(ComplexPoly),
}

impl PolyText {
    pub fn to_poly(&self) -> Result<ComplexPoly> {
        match self {
            PolyText::Text(s) => s.parse(),
            PolyText::Structured(p) => Ok(p.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexText {
    Pair([f64; 2]),
    Text(String),
}

impl ComplexText {
    pub fn to_complex(&self) -> Result<C64> {
        match self {
            ComplexText::Pair([re, im]) => Ok(C64::new(*re, *im)),
            ComplexText::Text(s) => parse_complex(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub q: Vec<ComplexText>,
    pub z: Vec<ComplexText>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub name: String,
    pub psi: PolyText,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub m: usize,
    pub k: usize,
    pub mu: Vec<PolyText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<PolyText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<PolyText>>,
    #[serde(default)]
    pub seeds: Vec<SeedSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<MapSpec>,
}

/// A parsed and validated system-spec.
#[derive(Clone, Debug)]
pub struct LoadedSystem {
    pub name: String,
    pub system: Arc<ImplicitSystem>,
    pub seeds: Vec<Seed>,
    pub maps: Vec<NamedMap>,
}

fn complex_vec(v: &[ComplexText]) -> Result<Vec<C64>> {
    v.iter().map(ComplexText::to_complex).collect()
}

fn polys(v: &[PolyText]) -> Result<Vec<ComplexPoly>> {
    v.iter().map(PolyText::to_poly).collect()
}

impl SystemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn build(&self) -> Result<LoadedSystem> {
        let mu = MuVector::new(self.m, polys(&self.mu)?)?;
        let system = match (&self.h, &self.f) {
            (Some(h), None) => {
                if self.k != self.m {
                    return Err(Error::InvalidSystem(format!(
                        "canonical form needs k = m, got k={} m={}",
                        self.k, self.m
                    )));
                }
                ImplicitSystem::canonical(mu, polys(h)?)?
            }
            (None, Some(f)) => ImplicitSystem::general(mu, self.k, polys(f)?)?,
            _ => return Err(Error::Parse("exactly one of \"h\" and \"f\" must be given".into())),
        };
        let system = Arc::new(system);
        let mut seeds = Vec::with_capacity(self.seeds.len());
        for s in &self.seeds {
            let (q, z) = (complex_vec(&s.q)?, complex_vec(&s.z)?);
            if q.len() != self.m || z.len() != self.k {
                return Err(Error::DimensionMismatch(format!(
                    "seed has {} q and {} z entries, expected {} and {}",
                    q.len(),
                    z.len(),
                    self.m,
                    self.k
                )));
            }
            SolutionBranch::new(system.clone(), q.clone(), z.clone())?;
            seeds.push(Seed { q, z });
        }
        let maps = self
            .maps
            .iter()
            .map(|ms| {
                Ok(NamedMap {
                    name: ms.name.clone(),
                    psi: ms.psi.to_poly()?,
                    description: String::new(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(LoadedSystem {
            name: self.name.clone().unwrap_or_else(|| "system".into()),
            system,
            seeds,
            maps,
        })
    }

    /// Spec describing a catalog entry (system, seeds and postcompositions).
    pub fn from_entry(entry: &CatalogEntry) -> Self {
        let sys = &entry.system;
        let text = |p: &ComplexPoly| PolyText::Text(p.to_string());
        let (h, f) = match sys.form() {
            SystemForm::Canonical { h } => (Some(h.iter().map(text).collect()), None),
            SystemForm::General { f } => (None, Some(f.iter().map(text).collect())),
        };
        let pair = |c: &C64| ComplexText::Pair([c.re, c.im]);
        let name = match entry.variant {
            Some(v) => format!("{}:{}", entry.name, v.name()),
            None => entry.name.clone(),
        };
        SystemSpec {
            name: Some(name),
            m: sys.m(),
            k: sys.k(),
            mu: sys.mu().entries().iter().map(text).collect(),
            h,
            f,
            seeds: entry
                .seeds
                .iter()
                .map(|s| SeedSpec {
                    q: s.q.iter().map(pair).collect(),
                    z: s.z.iter().map(pair).collect(),
                })
                .collect(),
            maps: entry
                .postcompositions
                .iter()
                .map(|p| MapSpec {
                    name: p.name.clone(),
                    psi: text(&p.psi),
                })
                .collect(),
        }
    }
}

pub fn load_system_spec(text: &str) -> Result<LoadedSystem> {
    SystemSpec::from_json(text)?.build()
}

impl CatalogEntry {
    /// An entry for a user-supplied system: no closed form and no expected
    /// properties.
    pub fn from_loaded(l: LoadedSystem) -> Result<Self> {
        if l.seeds.is_empty() {
            return Err(Error::InvalidSystem("a system-spec needs at least one seed".into()));
        }
        Ok(CatalogEntry {
            name: l.name,
            summary: "user-supplied system".into(),
            m: l.system.m(),
            variant: None,
            system: l.system,
            seeds: l.seeds,
            closed_form: None,
            postcompositions: l.maps,
            expected: Vec::new(),
            scalar_reduction: None,
            sample_radius: 0.25,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{get_example, EXAMPLE_NAMES};

    #[test]
    fn catalog_roundtrip() {
        for name in EXAMPLE_NAMES {
            let e = get_example(name).unwrap();
            let json = SystemSpec::from_entry(&e).to_json().unwrap();
            let loaded = load_system_spec(&json).unwrap();
            assert_eq!(loaded.system.f_polys(), e.system.f_polys(), "{name}");
            assert_eq!(loaded.seeds, e.seeds);
            assert_eq!(loaded.maps.len(), e.postcompositions.len());
        }
    }

    #[test]
    fn text_forms() {
        let json = r#"{"m": 2, "k": 2, "mu": ["0"], "h": ["z1", "z2"],
            "seeds": [{"q": ["1+2j", [0, 1]], "z": ["1+2j", "1j"]}]}"#;
        let l = load_system_spec(json).unwrap();
        assert_eq!(l.seeds[0].q[1], C64::new(0.0, 1.0));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(load_system_spec("{not json"), Err(Error::Parse(_))));
        let both = r#"{"m": 2, "k": 2, "mu": ["0"], "h": ["z1","z2"], "f": ["w1","w2"]}"#;
        assert!(matches!(load_system_spec(both), Err(Error::Parse(_))));
        let bad_seed = r#"{"m": 2, "k": 2, "mu": ["0"], "h": ["z1","z2"], "seeds": [{"q": [[1,0],[0,0]], "z": [[0,0],[0,0]]}]}"#;
        assert!(matches!(load_system_spec(bad_seed), Err(Error::InvalidSeed(_))));
        let bad_poly = r#"{"m": 2, "k": 2, "mu": ["z1 +"], "h": ["z1","z2"]}"#;
        assert!(matches!(load_system_spec(bad_poly), Err(Error::Parse(_))));
    }
}
