//! Formula to CNF over canonical `>= 0` atoms.

use super::ast::{Atom, Comparison, Formula, ParsedFormula};
use super::NormalizeError;
use crate::algebra::rational::ratio;
use crate::algebra::{prune_subsumed, Constraint, ConstraintSet, Inequality, LinearExpr, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationConfig {
    /// Slack for strict comparisons.
    pub epsilon: Rational,
    pub max_clauses: usize,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        NormalizationConfig { epsilon: ratio(1, 1_000_000), max_clauses: 10_000 }
    }
}

/// A CNF: `None` clauses (tautologies) are already gone, an empty vector
/// is `true`.
type Cnf = Vec<Constraint>;

struct Ctx<'a> {
    cfg: &'a NormalizationConfig,
    line: usize,
    root: &'a Formula,
}

impl Ctx<'_> {
    fn too_many(&self) -> NormalizeError {
        NormalizeError::TooManyClauses { line: self.line, formula: self.root.to_string(), limit: self.cfg.max_clauses }
    }

    fn check(&self, n: usize) -> Result<(), NormalizeError> {
        if n > self.cfg.max_clauses {
            Err(self.too_many())
        } else {
            Ok(())
        }
    }

    /// `e >= 0`, or `e - eps >= 0` when strict.
    fn atom_ineq(&self, e: LinearExpr, strict: bool) -> Inequality {
        if strict {
            Inequality::new(&e - &LinearExpr::constant(self.cfg.epsilon.clone()))
        } else {
            Inequality::new(e)
        }
    }

    /// A comparison after negations are pushed down, as CNF.
    fn literal(&self, atom: &Atom, positive: bool) -> Cnf {
        let cmp = if positive { atom.cmp } else { atom.cmp.negate() };
        let d = &atom.lhs - &atom.rhs;
        let clauses: Vec<Vec<Inequality>> = match cmp {
            Comparison::Ge => vec![vec![self.atom_ineq(d, false)]],
            Comparison::Le => vec![vec![self.atom_ineq(-&d, false)]],
            Comparison::Gt => vec![vec![self.atom_ineq(d, true)]],
            Comparison::Lt => vec![vec![self.atom_ineq(-&d, true)]],
            Comparison::Eq => vec![vec![self.atom_ineq(d.clone(), false)], vec![self.atom_ineq(-&d, false)]],
            Comparison::Ne => vec![vec![self.atom_ineq(d.clone(), true), self.atom_ineq(-&d, true)]],
        };
        clauses.into_iter().filter_map(Constraint::build).collect()
    }

    fn cnf(&self, f: &Formula, positive: bool) -> Result<Cnf, NormalizeError> {
        match f {
            Formula::Atom(a) => Ok(self.literal(a, positive)),
            Formula::Not(g) => self.cnf(g, !positive),
            Formula::And(gs) if positive => self.conj(gs.iter().map(|g| (g, true))),
            Formula::Or(gs) if !positive => self.conj(gs.iter().map(|g| (g, false))),
            Formula::Or(gs) => self.disj(gs.iter().map(|g| (g, true))),
            Formula::And(gs) => self.disj(gs.iter().map(|g| (g, false))),
            // a -> b  ==  not a or b ;  not (a -> b)  ==  a and not b
            Formula::Implies(a, b) if positive => self.disj([(a.as_ref(), false), (b.as_ref(), true)]),
            Formula::Implies(a, b) => self.conj([(a.as_ref(), true), (b.as_ref(), false)]),
        }
    }

    fn conj<'f>(&self, parts: impl IntoIterator<Item = (&'f Formula, bool)>) -> Result<Cnf, NormalizeError> {
        let mut out = Vec::new();
        for (g, pol) in parts {
            out.extend(self.cnf(g, pol)?);
            self.check(out.len())?;
        }
        Ok(prune_subsumed(out))
    }

    fn disj<'f>(&self, parts: impl IntoIterator<Item = (&'f Formula, bool)>) -> Result<Cnf, NormalizeError> {
        // the empty disjunction is false: one clause `-1 >= 0`
        let mut acc: Cnf = vec![Constraint::falsum()];
        for (g, pol) in parts {
            let rhs = self.cnf(g, pol)?;
            self.check(acc.len().saturating_mul(rhs.len()))?;
            let mut next = Vec::with_capacity(acc.len() * rhs.len());
            for a in &acc {
                for b in &rhs {
                    let merged = a.disjuncts().iter().chain(b.disjuncts()).cloned();
                    if let Some(c) = Constraint::build(merged) {
                        next.push(c);
                    }
                }
            }
            acc = prune_subsumed(next);
        }
        Ok(acc)
    }
}

/// Normalizes one formula into a set of disjunctive clauses over
/// `dimension` variables.
pub fn normalize(
    formula: &Formula,
    line: usize,
    dimension: usize,
    cfg: &NormalizationConfig,
) -> Result<ConstraintSet, NormalizeError> {
    let ctx = Ctx { cfg, line, root: formula };
    let clauses = ctx.cnf(formula, true)?;
    Ok(ConstraintSet::new(dimension, clauses)?)
}

/// The conjunction of all formulas, deduplicated and subsumption-pruned.
pub fn normalize_all(
    formulas: &[ParsedFormula],
    dimension: usize,
    cfg: &NormalizationConfig,
) -> Result<ConstraintSet, NormalizeError> {
    let mut all = Vec::new();
    for pf in formulas {
        let ctx = Ctx { cfg, line: pf.line, root: &pf.formula };
        all.extend(ctx.cnf(&pf.formula, true)?);
    }
    Ok(ConstraintSet::new(dimension, prune_subsumed(all))?)
}
