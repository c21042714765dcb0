//! Module presentations: generator lists with Adams degrees plus the dual
//! differential on generators, with the `QH_* BP` preset.
//!
//! A presentation is the input to the complex builder. Each generator
//! carries an Adams degree `x <= 0`; the differential assigns each
//! generator a sum of terms `R^a y_j` or `v_i y_j`, every term satisfying
//! the bidegree law (the differential has Adams bidegree `(-1, +1)`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::v_degree;

pub const MODULE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub id: String,
    pub degree: i32,
}

/// One term of the differential of a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffTerm {
    /// `R^a y_target`
    R { a: u32, target: usize },
    /// `v_i y_target`
    V { i: u32, target: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulePresentation {
    name: String,
    generators: Vec<Generator>,
    /// Differential terms per generator index.
    differential: Vec<Vec<DiffTerm>>,
}

impl ModulePresentation {
    pub fn new(
        name: impl Into<String>,
        generators: Vec<Generator>,
        differential: Vec<Vec<DiffTerm>>,
    ) -> Result<Self> {
        let p = ModulePresentation {
            name: name.into(),
            generators,
            differential,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn differential_terms(&self, gen: usize) -> &[DiffTerm] {
        &self.differential[gen]
    }

    pub fn generator_index(&self, id: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.id == id)
    }

    fn validate(&self) -> Result<()> {
        if self.differential.len() != self.generators.len() {
            return Err(Error::Presentation(format!(
                "{} generators but {} differential rows",
                self.generators.len(),
                self.differential.len()
            )));
        }
        let mut seen = BTreeMap::new();
        for (i, g) in self.generators.iter().enumerate() {
            if g.id.is_empty() || !g.id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::Presentation(format!("bad generator id `{}`", g.id)));
            }
            if g.degree > 0 {
                return Err(Error::Presentation(format!(
                    "generator `{}` has positive degree {}",
                    g.id, g.degree
                )));
            }
            if let Some(prev) = seen.insert(g.id.clone(), i) {
                return Err(Error::Presentation(format!(
                    "duplicate generator id `{}` (positions {} and {})",
                    g.id, prev, i
                )));
            }
        }
        for (k, terms) in self.differential.iter().enumerate() {
            let deg_k = self.generators[k].degree;
            for term in terms {
                let (expected, actual, desc) = match *term {
                    DiffTerm::R { a, target } => {
                        let deg_j = self.generators[target].degree;
                        (
                            deg_k - 1,
                            -(a as i32) + deg_j,
                            format!("(R:{a}, {})", self.generators[target].id),
                        )
                    }
                    DiffTerm::V { i, target } => {
                        let deg_j = self.generators[target].degree;
                        (
                            deg_k - 1,
                            v_degree(i) + deg_j,
                            format!("(v:{i}, {})", self.generators[target].id),
                        )
                    }
                };
                if expected != actual {
                    return Err(Error::Presentation(format!(
                        "bidegree law violated on d({}): term {desc} has degree {actual}, expected {expected}",
                        self.generators[k].id
                    )));
                }
            }
        }
        Ok(())
    }

    /// Serializes to the versioned JSON document format.
    pub fn to_json(&self) -> String {
        let doc = ModuleDoc {
            format: MODULE_FORMAT_VERSION,
            name: self.name.clone(),
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorDoc {
                    id: g.id.clone(),
                    degree: g.degree,
                })
                .collect(),
            differential: self
                .generators
                .iter()
                .enumerate()
                .filter(|(k, _)| !self.differential[*k].is_empty())
                .map(|(k, g)| {
                    let terms = self.differential[k]
                        .iter()
                        .map(|t| match *t {
                            DiffTerm::R { a, target } => TermDoc {
                                r: Some(a),
                                v: None,
                                gen: self.generators[target].id.clone(),
                            },
                            DiffTerm::V { i, target } => TermDoc {
                                r: None,
                                v: Some(i),
                                gen: self.generators[target].id.clone(),
                            },
                        })
                        .collect();
                    (g.id.clone(), terms)
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("module serialization")
    }
}

#[derive(Serialize, Deserialize)]
struct ModuleDoc {
    format: u32,
    name: String,
    generators: Vec<GeneratorDoc>,
    differential: BTreeMap<String, Vec<TermDoc>>,
}

#[derive(Serialize, Deserialize)]
struct GeneratorDoc {
    id: String,
    degree: i32,
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    r: Option<u32>,
    #[serde(rename = "v", skip_serializing_if = "Option::is_none")]
    v: Option<u32>,
    gen: String,
}

/// Parses and validates a module document. Rejections carry term-level
/// diagnostics (unknown ids, duplicate ids, bidegree-law violations).
pub fn parse_module(text: &str) -> Result<ModulePresentation> {
    let doc: ModuleDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("module JSON: {e}")))?;
    if doc.format != MODULE_FORMAT_VERSION {
        return Err(Error::Parse(format!(
            "unsupported module format {} (expected {MODULE_FORMAT_VERSION})",
            doc.format
        )));
    }
    let generators: Vec<Generator> = doc
        .generators
        .iter()
        .map(|g| Generator {
            id: g.id.clone(),
            degree: g.degree,
        })
        .collect();
    let index_of = |id: &str| -> Result<usize> {
        generators
            .iter()
            .position(|g| g.id == id)
            .ok_or_else(|| Error::Presentation(format!("unknown generator id `{id}`")))
    };
    let mut differential = vec![Vec::new(); generators.len()];
    for (id, terms) in &doc.differential {
        let k = index_of(id)?;
        for t in terms {
            let target = index_of(&t.gen)?;
            let term = match (t.r, t.v) {
                (Some(a), None) => DiffTerm::R { a, target },
                (None, Some(i)) => DiffTerm::V { i, target },
                _ => {
                    return Err(Error::Parse(format!(
                        "differential term on `{id}` needs exactly one of \"R\" or \"v\""
                    )))
                }
            };
            differential[k].push(term);
        }
    }
    ModulePresentation::new(doc.name, generators, differential)
}

/// The indecomposables of `H_* BP` at p = 2: generators `y_1 .. y_k_max`
/// with `deg(y_k) = -(2^(k+1) - 2)` and
/// `d y_k = sum_{j < k} R^{2^(k+1) - 2^(j+1) + 1} y_j`. The Milnor
/// primitives act trivially, so there are no v-terms.
pub fn bp_preset(k_max: usize) -> Result<ModulePresentation> {
    if k_max < 1 {
        return Err(Error::Presentation("bp preset needs k_max >= 1".into()));
    }
    let generators: Vec<Generator> = (1..=k_max)
        .map(|k| Generator {
            id: format!("y{k}"),
            degree: -((1i32 << (k + 1)) - 2),
        })
        .collect();
    let differential: Vec<Vec<DiffTerm>> = (1..=k_max)
        .map(|k| {
            (1..k)
                .map(|j| DiffTerm::R {
                    a: ((1u32 << (k + 1)) - (1u32 << (j + 1)) + 1),
                    target: j - 1,
                })
                .collect()
        })
        .collect();
    ModulePresentation::new("bp", generators, differential)
}
