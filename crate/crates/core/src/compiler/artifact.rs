//! JSON form of a compiled layer. Rationals are `"num/den"` strings so the
//! file round-trips exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::layer::{CompiledLayer, Verdict};
use super::CompileError;
use crate::algebra::rational::{format_rational, parse_rational};
use crate::algebra::{Constraint, Inequality, LinearExpr, Var};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactFile {
    /// Variable names in data-column order.
    pub variables: Vec<String>,
    pub ordering: Vec<String>,
    pub epsilon: String,
    pub chain: Vec<ChainLevel>,
    pub verdict: String,
    pub unsat_witness: Option<ClauseJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLevel {
    pub var: String,
    pub constraints: Vec<ClauseJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseJson {
    pub disjuncts: Vec<DisjunctJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjunctJson {
    pub coeffs: BTreeMap<String, String>,
    pub bias: String,
}

fn clause_json(c: &Constraint, names: &[String]) -> ClauseJson {
    ClauseJson {
        disjuncts: c
            .disjuncts()
            .iter()
            .map(|d| DisjunctJson {
                coeffs: d.expr().terms().map(|(v, w)| (names[v].clone(), format_rational(w))).collect(),
                bias: format_rational(d.expr().bias()),
            })
            .collect(),
    }
}

fn invalid(msg: impl Into<String>) -> CompileError {
    CompileError::InvalidArtifact(msg.into())
}

fn clause_from_json(c: &ClauseJson, index: &BTreeMap<&str, Var>) -> Result<Constraint, CompileError> {
    let mut ds = Vec::with_capacity(c.disjuncts.len());
    for d in &c.disjuncts {
        let mut terms = Vec::with_capacity(d.coeffs.len());
        for (name, w) in &d.coeffs {
            let v = *index.get(name.as_str()).ok_or_else(|| invalid(format!("unknown variable `{name}`")))?;
            terms.push((v, parse_rational(w).map_err(|e| invalid(e.to_string()))?));
        }
        let bias = parse_rational(&d.bias).map_err(|e| invalid(e.to_string()))?;
        ds.push(Inequality::new(LinearExpr::from_terms(terms, bias)));
    }
    if ds.is_empty() {
        return Err(invalid("clause without disjuncts"));
    }
    Constraint::build(ds).ok_or_else(|| invalid("stored clause is a tautology"))
}

impl ArtifactFile {
    pub fn from_layer(layer: &CompiledLayer, names: &[String]) -> Result<Self, CompileError> {
        if names.len() != layer.dimension() {
            return Err(invalid(format!("{} names for {} variables", names.len(), layer.dimension())));
        }
        let (verdict, unsat_witness) = match layer.verdict() {
            Verdict::Sat => ("sat".to_string(), None),
            Verdict::Unsat(w) => ("unsat".to_string(), Some(clause_json(w, names))),
        };
        Ok(ArtifactFile {
            variables: names.to_vec(),
            ordering: layer.ordering().iter().map(|&v| names[v].clone()).collect(),
            epsilon: format_rational(layer.epsilon()),
            chain: layer
                .levels()
                .iter()
                .zip(layer.ordering())
                .map(|(level, &v)| ChainLevel {
                    var: names[v].clone(),
                    constraints: level.iter().map(|c| clause_json(c, names)).collect(),
                })
                .collect(),
            verdict,
            unsat_witness,
        })
    }

    pub fn to_layer(&self) -> Result<CompiledLayer, CompileError> {
        let mut index = BTreeMap::new();
        for (i, n) in self.variables.iter().enumerate() {
            if index.insert(n.as_str(), i).is_some() {
                return Err(invalid(format!("duplicate variable `{n}`")));
            }
        }
        let lookup = |n: &str| index.get(n).copied().ok_or_else(|| invalid(format!("unknown variable `{n}`")));
        let ordering = self.ordering.iter().map(|n| lookup(n)).collect::<Result<Vec<_>, _>>()?;
        if self.chain.len() != ordering.len() {
            return Err(invalid("chain length differs from the ordering"));
        }
        let mut levels = Vec::with_capacity(self.chain.len());
        for (level, &v) in self.chain.iter().zip(&ordering) {
            if lookup(&level.var)? != v {
                return Err(invalid(format!("chain level for `{}` is out of order", level.var)));
            }
            let mut cs =
                level.constraints.iter().map(|c| clause_from_json(c, &index)).collect::<Result<Vec<_>, _>>()?;
            cs.sort();
            levels.push(cs);
        }
        let verdict = match (self.verdict.as_str(), &self.unsat_witness) {
            ("sat", None) => Verdict::Sat,
            ("unsat", Some(w)) => {
                let w = clause_from_json(w, &index)?;
                if !w.is_unsat_witness() {
                    return Err(invalid("witness clause is not a contradiction"));
                }
                Verdict::Unsat(w)
            }
            (other, _) => return Err(invalid(format!("bad verdict `{other}` or witness"))),
        };
        let epsilon = parse_rational(&self.epsilon).map_err(|e| invalid(e.to_string()))?;
        CompiledLayer::from_parts(self.variables.len(), ordering, levels, verdict, epsilon)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("artifact serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CompileError> {
        serde_json::from_str(text).map_err(|e| invalid(e.to_string()))
    }
}

/// Serializes `layer` with variable `names` in data-column order.
pub fn write_artifact(layer: &CompiledLayer, names: &[String]) -> Result<String, CompileError> {
    Ok(ArtifactFile::from_layer(layer, names)?.to_json())
}

/// Loads a layer and its variable names.
pub fn read_artifact(text: &str) -> Result<(CompiledLayer, Vec<String>), CompileError> {
    let file = ArtifactFile::from_json(text)?;
    let layer = file.to_layer()?;
    Ok((layer, file.variables))
}
